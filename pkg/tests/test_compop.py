import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_lab.carleson import CarlesonParams
from bergman_lab.compop import (CompOpSpec, apply_operator, blaschke_map, expr_map,
                                identity_map, iterate_phi, mobius_map, power_diagnostic,
                                pullback_measure, scale_map, weight_product)
from bergman_lab.errors import ParameterError
from bergman_lab.measure import integrate, total_mass
from bergman_lab.weights import make_standard_weight

points = st.tuples(st.floats(0, 0.95), st.floats(0, 2 * math.pi)).map(
    lambda rt: rt[0] * complex(math.cos(rt[1]), math.sin(rt[1])))
MAPS = [scale_map(0.5j), mobius_map(0.3 + 0.2j), blaschke_map([0.0, 0.5]), expr_map("(z + z^2)/2")]


def test_self_map_audit():
    assert identity_map().is_identity and identity_map().verified
    assert expr_map("z").is_identity
    with pytest.raises(ParameterError):
        expr_map("2*z")
    with pytest.raises(ParameterError):
        scale_map(1.5)
    with pytest.raises(ParameterError):
        mobius_map(1.0)
    with pytest.raises(ParameterError):
        blaschke_map([])


@given(points)
def test_mobius_map_is_involution(z):
    assert abs(iterate_phi(mobius_map(0.6 - 0.1j), 2, z) - z) < 1e-9


@given(points, st.integers(0, 4), st.integers(0, 4), st.sampled_from(range(len(MAPS))))
@settings(max_examples=60)
def test_iterates_form_a_semigroup(z, m, n, k):
    phi = MAPS[k]
    lhs = iterate_phi(phi, m + n, z)
    rhs = iterate_phi(phi, m, iterate_phi(phi, n, z))
    assert abs(lhs - rhs) < 1e-10


@given(points, st.integers(1, 4), st.integers(1, 4), st.sampled_from(range(len(MAPS))))
@settings(max_examples=60)
def test_weight_product_cocycle(z, m, n, k):
    phi = MAPS[k]
    psi = lambda w: 1.5 + 0.5j * w
    lhs = weight_product(psi, phi, m + n, z)
    rhs = weight_product(psi, phi, m, z) * weight_product(psi, phi, n, iterate_phi(phi, m, z))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_iterate_validation():
    with pytest.raises(ParameterError):
        iterate_phi(scale_map(0.5), -1, 0.1)
    with pytest.raises(ParameterError):
        weight_product(lambda z: 1, scale_map(0.5), 0, 0.1)
    assert iterate_phi(scale_map(0.5), 0, 0.3) == 0.3


@pytest.mark.parametrize("n", [1, 2, 5])
def test_pullback_mass_scaling(n, quad):
    spec = CompOpSpec(2.0, identity_map(), p=2.0)
    assert total_mass(pullback_measure(spec, n), quad) == pytest.approx(4.0 ** n, rel=1e-12)


def test_pullback_of_contraction_integrates_like_base(quad):
    # int f dOmega_1 = int f(z/2) dA for psi = 1
    spec = CompOpSpec(1.0, scale_map(0.5), p=2.0)
    m = pullback_measure(spec, 1)
    f = lambda w: np.abs(w) ** 2
    assert float(integrate(m, f, quad)) == pytest.approx(0.25 * 0.5, rel=1e-10)


def test_spec_validation():
    with pytest.raises(ParameterError):
        CompOpSpec(1.0, identity_map(), p=0.0)
    with pytest.raises(ParameterError):
        CompOpSpec(1.0, identity_map(), alpha=-1.0)
    spec = CompOpSpec("2", identity_map())
    assert spec.psi_constant


@pytest.mark.parametrize("psi,phi,n,f", [
    ("1", identity_map(), 0, "z"),
    ("2", identity_map(), 2, "1 + z"),
    ("1/2", scale_map(0.5), 3, "(1 - 0.5*z)^-2"),
    ("1 + z/2", expr_map("z^2"), 1, "z"),
    ("1", mobius_map(0.4), 1, "exp(z)"),
])
def test_cross_path_identity(psi, phi, n, f, quad):
    spec = CompOpSpec(psi, phi, p=2.0, weight=make_standard_weight(1.0), alpha=1.0)
    res = apply_operator(spec, n, f, quad)
    assert res.agrees, (res.direct, res.pullback)
    assert res.norm > 0


def test_apply_operator_values(quad):
    spec = CompOpSpec("2", identity_map(), p=2.0)
    res = apply_operator(spec, 3, "1", quad)
    assert res.function(0.3) == pytest.approx(8.0)
    assert res.norm == pytest.approx(8.0, rel=1e-10)


def _params():
    return CarlesonParams(2.0, 2.0, n_radial=24, n_angular=16)


def test_power_diagnostic_identity():
    diag = power_diagnostic(CompOpSpec(1.0, identity_map()), 4, _params(), spot_checks=())
    assert diag.verdict == "power_bounded"
    assert diag.compactness == "none"
    np.testing.assert_allclose(diag.Q3, 1.0, rtol=1e-9)


def test_power_diagnostic_growth():
    diag = power_diagnostic(CompOpSpec(2.0, identity_map()), 5, _params(), spot_checks=())
    assert diag.verdict == "not_power_bounded"
    for n, q2, q3, q4, errs, _ in diag.rows():
        for v in (q2, q3, q4):
            assert v == pytest.approx(4.0 ** n, rel=0.05)


@pytest.mark.slow
def test_power_diagnostic_contraction():
    diag = power_diagnostic(CompOpSpec(0.5, scale_map(0.5)), 4, _params(), spot_checks=(8,))
    assert diag.verdict == "power_bounded"
    assert diag.compactness == "power_compact_evidence"
    assert all(b < a for a, b in zip(diag.Q3[1:], diag.Q3[2:]))


def test_power_diagnostic_validation():
    spec = CompOpSpec(1.0, identity_map())
    with pytest.raises(ParameterError):
        power_diagnostic(spec, 0)
    with pytest.raises(ParameterError):
        power_diagnostic(spec, 2, CarlesonParams(2.0, 3.0))
