import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_lab.errors import AdmissibilityError, ParameterError
from bergman_lab.kernels import (abs_normalized_kernel_power, growth_bound_check, kernel,
                                 kernel_norm, kernel_norm_estimate, normalized_kernel)
from bergman_lab.measure import integrate, lebesgue, weighted_area
from bergman_lab.weights import (beta_mass, make_custom_weight, make_standard_weight,
                                 validate_admissible)

points = st.tuples(st.floats(0, 0.95), st.floats(0, 2 * math.pi)).map(
    lambda rt: rt[0] * complex(math.cos(rt[1]), math.sin(rt[1])))
alphas = st.sampled_from([0.0, 0.5, 1.0, 2.5])


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0, 3.5])
def test_standard_weight_has_unit_mass(alpha, quad):
    w = make_standard_weight(alpha)
    assert float(integrate(weighted_area(w), lambda z: np.ones(z.shape), quad)) == pytest.approx(1.0, abs=1e-10)
    assert beta_mass(alpha) == pytest.approx(1 / (alpha + 1))


def test_standard_weight_values():
    w = make_standard_weight(2.0)
    assert w(0.5) == pytest.approx(3 * 0.75 ** 2)
    assert make_standard_weight(0.0).is_constant


def test_negative_alpha_rejected():
    with pytest.raises(AdmissibilityError):
        make_standard_weight(-0.5)


def test_custom_weight_admissibility():
    profile = lambda r: (1 - r) ** 2
    assert validate_admissible(profile, 1.5).ok
    cert = validate_admissible(profile, 0.5)
    assert not cert.ok and cert.violation.kind == "growth"
    bad = validate_admissible(lambda r: 1 + r, 1.0)
    assert bad.violation.kind == "non_increasing"
    with pytest.raises(AdmissibilityError):
        make_custom_weight(lambda r: 1 + r, 1.0)
    with pytest.raises(ParameterError):
        validate_admissible(profile, 0.0)


def test_kernel_closed_form():
    assert kernel(0, 0.5, 0.5) == pytest.approx(1 / 0.75 ** 2)
    assert kernel(1, 0.3j, 0) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        kernel(-1, 0, 0)


@given(points, points, alphas)
def test_kernel_hermitian(z, w, alpha):
    assert kernel(alpha, z, w) == pytest.approx(np.conj(kernel(alpha, w, z)), rel=1e-10)


@given(points, points, alphas)
@settings(max_examples=50)
def test_kernel_is_analytic_in_z(z, w, alpha):
    # Cauchy-Riemann residual of a centered difference
    h = 1e-6
    dx = (kernel(alpha, z + h, w) - kernel(alpha, z - h, w)) / (2 * h)
    dy = (kernel(alpha, z + 1j * h, w) - kernel(alpha, z - 1j * h, w)) / (2 * h)
    scale = max(1.0, abs(dx))
    assert abs(dx + 1j * dy) / scale < 1e-5


@given(points, points, alphas, st.floats(0.5, 3))
def test_abs_normalized_kernel_power(z, w, alpha, t):
    direct = abs(normalized_kernel(alpha, z, w)) ** t
    assert abs_normalized_kernel_power(alpha, t, z, w) == pytest.approx(direct, rel=1e-9)


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_reproducing_property(alpha, quad):
    m = weighted_area(make_standard_weight(alpha))
    f = lambda w: (w - 0.2) ** 3 + 1j * w
    for z in (0.0, 0.5 + 0.3j, -0.8j):
        val = integrate(m, lambda w: f(w) * kernel(alpha, z, w), quad)
        assert complex(val.value) == pytest.approx(f(z), abs=1e-8)


@pytest.mark.parametrize("z", [0.0, 0.5, 0.9j, 0.99])
def test_kernel_norm_exact_case(z, quad):
    # ||K^0(z, .)||_{A^2} = K(z, z)^(1/2) = 1 / (1 - |z|^2)
    w = make_standard_weight(0.0)
    exact = 1 / (1 - abs(z) ** 2)
    assert kernel_norm(0.0, 2.0, w, z, quad) == pytest.approx(exact, rel=1e-6)
    assert kernel_norm_estimate(0.0, 2.0, w, z) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("alpha,p", [(0.0, 3.0), (1.0, 2.0), (2.0, 1.5)])
def test_kernel_norm_band_unweighted(alpha, p, quad):
    w = make_standard_weight(0.0)
    z = np.array([0.0, 0.5, 0.9, 0.99, 0.999])
    ratio = kernel_norm(alpha, p, w, z, quad) / kernel_norm_estimate(alpha, p, w, z)
    assert ratio.max() / ratio.min() < 10


def test_kernel_norm_scales_with_weight_at_the_probe(quad):
    # for a non-constant weight the norm grows like sigma(z)^(+1/p)
    w = make_standard_weight(1.0)
    z = np.array([0.0, 0.5, 0.9, 0.99, 0.999])
    p = 3.0
    corrected = kernel_norm_estimate(0.0, p, w, z) * w(z) ** (2 / p)
    ratio = kernel_norm(0.0, p, w, z, quad) / corrected
    assert ratio.max() / ratio.min() < 10


def test_growth_bound_is_finite(quad):
    w = make_standard_weight(0.0)
    probes = np.array([0.0, 0.5, 0.9, 0.99])
    val = growth_bound_check(lambda z: 1 / (1 - 0.9 * z) ** 2, 2.0, w, probes, quad)
    assert 0 < val < 10
    assert lebesgue() is not None
