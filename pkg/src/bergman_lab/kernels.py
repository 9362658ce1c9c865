"""Reproducing kernels of the standard weighted Bergman spaces.

``K^alpha(z, w) = (1 - conj(w) z)**-(alpha + 2)`` with the principal branch;
``Re(1 - conj(w) z) > 0`` on the disk, so the branch is continuous there.
"""

import numpy as np

from .errors import ParameterError
from .geometry import one_minus_abs2


def _check_alpha(alpha):
    if alpha < 0:
        raise ParameterError(f"kernel exponent alpha must be >= 0, got {alpha}")


def _squeeze(out):
    return out[()] if np.ndim(out) == 0 else out


def kernel(alpha, z, w):
    """``K^alpha(z, w)``; analytic in ``z``, conjugate-analytic in ``w``."""
    _check_alpha(alpha)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return _squeeze((1.0 - np.conj(w) * z) ** (-(alpha + 2.0)))


def normalized_kernel(alpha, z, w):
    """``k^alpha_z(w) = K^alpha(z, w) / sqrt(K^alpha(z, z))``."""
    z = np.asarray(z, dtype=complex)
    return _squeeze(kernel(alpha, z, w) * one_minus_abs2(z) ** (0.5 * (alpha + 2.0)))


def abs_normalized_kernel_power(alpha, t, z, w):
    """``|k^alpha_z(w)|**t`` evaluated without forming the complex power."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    e = (alpha + 2.0) * t
    return _squeeze(one_minus_abs2(z) ** (0.5 * e) * np.abs(1.0 - np.conj(w) * z) ** (-e))


def kernel_norm_estimate(alpha, p, weight, z):
    """Closed-form size ``1 / (sigma(z)**(1/p) (1 - |z|^2)**((alpha+2) - 2/p))``.

    This is the comparison target for the true ``A^p_sigma`` norm of
    ``K^alpha(z, .)``, not the norm itself.
    """
    if p <= 0:
        raise ParameterError("p must be positive")
    _check_alpha(alpha)
    z = np.asarray(z, dtype=complex)
    out = 1.0 / (weight(z) ** (1.0 / p) * one_minus_abs2(z) ** ((alpha + 2.0) - 2.0 / p))
    return _squeeze(out)


def kernel_norm(alpha, p, weight, z, q=None):
    """``||K^alpha(z, .)||_{A^p_sigma}`` by probe-centered quadrature."""
    from .measure import weighted_area, kernel_integrals
    from .quadrature import QuadratureSpec

    q = q or QuadratureSpec()
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    vals = kernel_integrals(weighted_area(weight), z, p * (alpha + 2.0), q)
    out = vals ** (1.0 / p)
    return _squeeze(out if out.size > 1 else out[0])


def growth_bound_check(f, p, weight, probes, q=None):
    """Max over probes of ``|f(z)|^p sigma(z) (1 - |z|^2)^2 / ||f||^p_{A^p_sigma}``.

    ``f`` is a vectorized callable on complex arrays.
    """
    from .measure import weighted_area, integrate
    from .quadrature import QuadratureSpec

    q = q or QuadratureSpec()
    norm_p = integrate(weighted_area(weight), lambda w: np.abs(f(w)) ** p, q).value
    if not norm_p > 0:
        raise ParameterError("f has zero norm")
    probes = np.atleast_1d(np.asarray(probes, dtype=complex))
    ratio = np.abs(f(probes)) ** p * weight(probes) * one_minus_abs2(probes) ** 2 / norm_p
    return float(np.max(ratio))
