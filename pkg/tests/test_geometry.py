import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_lab.errors import ParameterError
from bergman_lab.geometry import (DiskPoint, covering_multiplicity, make_lattice, mobius,
                                  node_covering_counts, one_minus_abs2, pseudo_disk,
                                  pseudo_disk_params, rho)


def disk_points(bound=0.99):
    return st.tuples(st.floats(0, bound), st.floats(0, 2 * math.pi)).map(
        lambda rt: rt[0] * complex(math.cos(rt[1]), math.sin(rt[1])))


def test_disk_point_rejects_outside():
    with pytest.raises(ParameterError):
        DiskPoint(1.0, 0.0)
    with pytest.raises(ParameterError):
        DiskPoint(float("nan"))
    assert complex(DiskPoint.of(0.3 + 0.4j)) == 0.3 + 0.4j


def test_mobius_known_values():
    assert mobius(0.5, 0.5) == 0
    assert mobius(0.5, 0) == 0.5
    assert rho(0, 0.25j) == pytest.approx(0.25)


@given(disk_points(), disk_points())
def test_mobius_is_involution(a, z):
    assert abs(mobius(a, mobius(a, z)) - z) < 1e-9


@given(disk_points(), disk_points(), disk_points())
def test_rho_is_mobius_invariant(a, z, w):
    assert abs(rho(mobius(a, z), mobius(a, w)) - rho(z, w)) < 1e-8


@given(disk_points(), disk_points())
def test_rho_symmetric_and_bounded(z, w):
    d = rho(z, w)
    assert 0 <= d < 1
    assert d == pytest.approx(rho(w, z), abs=1e-12)


@given(disk_points(0.999))
def test_one_minus_abs2(z):
    assert one_minus_abs2(z) == pytest.approx(1 - abs(z) ** 2, abs=1e-14)


@pytest.mark.parametrize("a,r", [(0.0, 0.5), (0.5, 0.5), (0.9j, 0.3), (-0.99, 0.8)])
def test_pseudo_disk_formula(a, r):
    d = pseudo_disk(a, r)
    s = abs(a) ** 2
    assert d.center_euc == pytest.approx(a * (1 - r * r) / (1 - s * r * r))
    assert d.radius_euc == pytest.approx((1 - s) * r / (1 - s * r * r))
    assert d.area == pytest.approx(d.radius_euc ** 2)


@given(disk_points(0.95), st.floats(0.05, 0.9), st.floats(0, 2 * math.pi))
@settings(max_examples=60)
def test_pseudo_disk_boundary_is_rho_circle(a, r, theta):
    d = pseudo_disk(a, r)
    edge = d.center_euc + d.radius_euc * complex(math.cos(theta), math.sin(theta))
    assert rho(a, edge) == pytest.approx(r, abs=1e-9)


def test_pseudo_disk_params_vectorized():
    a = np.array([0, 0.5, 0.3j])
    c, rad = pseudo_disk_params(a, 0.5)
    for ak, ck, rk in zip(a, c, rad):
        d = pseudo_disk(ak, 0.5)
        assert ck == pytest.approx(d.center_euc)
        assert rk == pytest.approx(d.radius_euc)


@pytest.mark.parametrize("r", [0.0, 1.0, -0.1])
def test_pseudo_disk_rejects_radius(r):
    with pytest.raises(ParameterError):
        pseudo_disk(0, r)


def test_lattice_spec_example():
    lat = make_lattice(0.5, 0.999)
    assert lat.nodes.size == 8926
    assert lat.multiplicity_bound == 17
    assert np.all(np.abs(lat.nodes) < 1)


def test_lattice_separation():
    lat = make_lattice(0.5, 0.99)
    z = lat.nodes
    d = rho(z[:, None], z[None, :])
    np.fill_diagonal(d, 1.0)
    assert d.min() >= 0.25


def test_lattice_covers_and_counts():
    lat = make_lattice(0.5, 0.99, audit_samples=20_000, seed=3)
    lo, hi = covering_multiplicity(lat, 20_000, seed=3)
    assert lo >= 1
    assert hi <= lat.multiplicity_bound
    counts = node_covering_counts(lat)
    assert counts.shape == lat.nodes.shape
    assert counts.min() >= 1


def test_lattice_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        make_lattice(1.5, 0.9)
    with pytest.raises(ParameterError):
        make_lattice(0.5, 1.0)
