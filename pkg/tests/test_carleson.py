import math

import numpy as np
import pytest

from bergman_lab.carleson import (CarlesonParams, berezin_threshold, carleson_check, default_t,
                                  equivalence_triple, probe_embedding_norm, probe_grid,
                                  schur_boundedness_check, schur_operator_apply,
                                  schur_parameters_valid, triple_hypothesis_holds,
                                  vanishing_profile)
from bergman_lab.config import boundary_atoms
from bergman_lab.errors import ParameterError
from bergman_lab.geometry import make_lattice
from bergman_lab.measure import atomic, lebesgue, truncated, weighted_area
from bergman_lab.quadrature import QuadratureSpec
from bergman_lab.weights import make_standard_weight

SMALL = dict(n_radial=24, n_angular=16)


def test_thresholds():
    assert berezin_threshold(2, 2, 0) == pytest.approx(1.0)
    assert berezin_threshold(2, 1, 0) == pytest.approx(1.5)
    assert default_t(2, 2, 0) == 2.0
    assert default_t(1, 4, 0) == pytest.approx(5.0)


def test_probe_grid_shape_and_radii():
    z = probe_grid(8, 4, 0.999)
    assert z.size == 1 + 7 * 4
    assert np.abs(z).max() == pytest.approx(0.999)
    assert z[0] == 0


def test_params_validation():
    with pytest.raises(ParameterError):
        CarlesonParams(2, 2, t=0.5)
    with pytest.raises(ParameterError):
        CarlesonParams(-1, 2)
    with pytest.raises(ParameterError):
        CarlesonParams(2, 2, truncations=(0.9,))
    p = CarlesonParams(2, 1)
    assert p.regime == "q<p" and p.norm_exponent == 2.0
    assert CarlesonParams(2, 3).regime == "p<=q"


def test_lebesgue_is_isometric_case():
    rep = carleson_check(lebesgue(), CarlesonParams(2, 2, **SMALL))
    for name, v in rep.values().items():
        assert v == pytest.approx(1.0, rel=1e-6), name
    assert rep.verdict == "carleson"


def test_standard_measure_against_own_weight():
    w = make_standard_weight(1.0)
    rep = carleson_check(weighted_area(w), CarlesonParams(2, 2, alpha=1.0, weight=w, **SMALL))
    assert rep.verdict == "carleson"
    assert max(rep.mutual_ratios.values()) < 50


def test_finite_atoms_are_carleson():
    rep = carleson_check(atomic([0.0, 0.5j], [1.0, 0.5]), CarlesonParams(2, 2, **SMALL))
    assert rep.verdict == "carleson"
    assert rep.Q_probe <= 50 * rep.Q_averaging


def test_heavy_boundary_atoms_not_carleson():
    heavy = atomic(1 - 2.0 ** -np.arange(1, 12), np.ones(11))
    rep = carleson_check(heavy, CarlesonParams(2, 2, **SMALL))
    assert rep.verdict == "not_carleson"


def test_integrability_regime_lebesgue():
    rep = carleson_check(lebesgue(), CarlesonParams(2, 1, **SMALL))
    assert rep.Q_averaging == pytest.approx(1.0, abs=1e-3)
    assert rep.verdict == "carleson"


def test_boundary_atoms_diverge_in_integrability_regime():
    rep = carleson_check(boundary_atoms(40, 2, 1, 0), CarlesonParams(2, 1, **SMALL))
    assert rep.verdict == "not_carleson"


def test_probe_norm_is_lower_bound():
    params = CarlesonParams(2, 2, **SMALL)
    # for dA the embedding is an isometry, so every probe gives exactly 1
    assert probe_embedding_norm(lebesgue(), params, probe_grid(8, 4)) == pytest.approx(1.0, rel=1e-8)
    assert probe_embedding_norm(lebesgue(), params, np.zeros(0, dtype=complex)) == 0.0


def test_vanishing_profiles():
    params = CarlesonParams(2, 2)
    compact = vanishing_profile(truncated(lebesgue(), 0.5), params)
    assert compact.shell_sups[-1] == 0.0 and compact.vanishing
    flat = vanishing_profile(lebesgue(), params)
    assert not flat.decaying
    np.testing.assert_allclose(flat.shell_sups, 1.0, rtol=1e-9)
    with pytest.raises(ParameterError):
        vanishing_profile(lebesgue(), params, shells=2)


def test_triple_hypothesis():
    assert triple_hypothesis_holds(0.5, 0.25, 2)
    assert not triple_hypothesis_holds(2, 0.25, 2)
    lat = make_lattice(0.5, 0.99)
    with pytest.raises(ParameterError):
        equivalence_triple(lebesgue(), 2.0, 0.25, 2.0, 0.5, lat)


def test_triple_lebesgue_s1():
    lat = make_lattice(0.5, 0.99)
    q = QuadratureSpec()
    a, b, c = equivalence_triple(lebesgue(), 2.0, 1.0, 2.0, 0.5, lat, q, check_hypothesis=False)
    assert b == pytest.approx(1.0, rel=1e-8)
    assert 1 / 20 < a / b < 20 and 1 / 20 < c / b < 20


def test_triple_within_band_valid_parameters():
    lat = make_lattice(0.5, 0.99)
    m = truncated(lebesgue(), 0.7)
    vals = equivalence_triple(m, 0.5, 0.25, 2.0, 0.5, lat)
    assert all(v > 0 and math.isfinite(v) for v in vals)
    assert max(vals) / min(vals) < 400


def test_schur_constant_oracle():
    # s = 0, sigma = 1, t = 1: T1(0) = int (1 - |xi|^2)^2 dA = 1/3
    w = make_standard_weight(0.0)
    assert schur_operator_apply(lambda z: np.ones(np.shape(z)), 1.0, 0.0, 0.0, w, 0.0) == pytest.approx(1 / 3, abs=1e-8)


def test_schur_parameter_range():
    assert schur_parameters_valid(2.0, 0.0, 1.0, 0.0)
    assert not schur_parameters_valid(2.0, 0.0, 1.0, 5.0)


def test_schur_boundedness_panel():
    funcs = [lambda z: np.ones(np.shape(z)), lambda z: 1 / (1 - 0.9 * z) ** 2]
    chk = schur_boundedness_check(funcs, 2.0, 0.0, 1.0, 0.0)
    assert chk.parameters_valid and chk.stable
    assert chk.max_ratio < 10
