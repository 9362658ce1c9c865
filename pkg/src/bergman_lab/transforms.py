"""Averaging function and t-Berezin transform, with numerical checks of their basic inequalities."""

import numpy as np

from .errors import ParameterError
from .geometry import one_minus_abs2, pseudo_disk, pseudo_disk_params
from .measure import (DEFAULT_QUADRATURE, DensityMeasure, disk_masses, integrate,
                      kernel_integrals, measure_of_pseudo_disk)
from .quadrature import disk_rule, norm_rule


def _squeeze(out, z):
    return out[0] if np.ndim(z) == 0 else out.reshape(np.shape(z))


def averaging(m, r, z, q=None):
    """``Omega(E(z, r)) / |E(z, r)|``; vectorized in ``z``."""
    if not 0.0 < r < 1.0:
        raise ParameterError(f"averaging radius must be in (0, 1), got {r}")
    zz = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    centers, radii = pseudo_disk_params(zz, r)
    out = disk_masses(m, centers, radii, q) / radii ** 2
    return _squeeze(out, z)


def berezin_t(m, t, alpha, z, q=None):
    """``int |k^alpha_z(w)|^t dOmega(w)``; vectorized in ``z``."""
    if not t > 0:
        raise ParameterError("Berezin exponent t must be positive")
    if alpha < 0:
        raise ParameterError("alpha must be >= 0")
    zz = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    e = (alpha + 2.0) * t
    out = kernel_integrals(m, zz, e, q) * one_minus_abs2(zz) ** (0.5 * e)
    return _squeeze(out, z)


def lp_norm(values, weights, p):
    """Weighted ``L^p`` norm; ``p = inf`` gives the maximum of ``|values|``."""
    values = np.abs(np.asarray(values, dtype=float))
    if np.isinf(p):
        return float(values.max()) if values.size else 0.0
    return float(np.sum(weights * values ** p) ** (1.0 / p))


def averaging_operator_bound_check(f, r, p, q=None):
    """``||f_hat_r||_p / ||f||_p`` for a nonnegative function ``f`` on the disk.

    ``p = inf`` is approximated by the maximum over the norm grid.
    """
    q = q or DEFAULT_QUADRATURE
    if not (p >= 1):
        raise ParameterError("p must be >= 1 (or inf)")
    rule = norm_rule(q)
    z = rule.nodes
    fz = np.asarray(f(z), dtype=float)
    if np.any(fz < 0):
        raise ParameterError("f must be nonnegative")
    den = lp_norm(fz, rule.weights, p)
    if not den > 0:
        raise ParameterError("f has zero norm")
    fhat = averaging(DensityMeasure(f), r, z, q)
    return lp_norm(fhat, rule.weights, p) / den


def subharmonic_domination_check(m, h, r, q=None):
    """``int h dOmega / int h Omega_hat_r dA`` for ``h = |analytic|^s``."""
    q = q or DEFAULT_QUADRATURE
    num = float(integrate(m, h, q))
    rule = norm_rule(q)
    z = rule.nodes
    den = float(np.sum(rule.weights * np.asarray(h(z), dtype=float) * averaging(m, r, z, q)))
    if num == 0.0:
        return 0.0
    if den <= 0.0:
        return float("inf")
    return num / den


def disk_subharmonicity_check(m, a, r, R, q=None):
    """``Omega(E(a,R))`` over the mean of ``Omega(E(z,r))`` across ``E(a,R)``."""
    q = q or DEFAULT_QUADRATURE
    big = pseudo_disk(a, R)
    num = measure_of_pseudo_disk(m, big, q)
    rule = disk_rule(q)
    z = big.center_euc + big.radius_euc * rule.nodes
    centers, radii = pseudo_disk_params(z, r)
    inner = disk_masses(m, centers, radii, q)
    # rule weights sum to 1, so this is already the mean over E(a, R)
    mean = float(np.sum(rule.weights * inner))
    if num == 0.0:
        return 0.0
    return num / mean if mean > 0 else float("inf")


def normalized_average(m, weight, s, r, z, q=None):
    """``Omega_hat_r(z) / (sigma(z)^s (1 - |z|^2)^(2(s-1)))``."""
    z = np.asarray(z, dtype=complex)
    return averaging(m, r, z, q) / (weight(z) ** s * one_minus_abs2(z) ** (2.0 * (s - 1.0)))


def radius_independence_check(m, weight, s, p, r, R, q=None):
    """Ratio of the ``L^p`` norms of the normalized averages at radii ``r`` and ``R``."""
    q = q or DEFAULT_QUADRATURE
    if not (0 < r < 1 and 0 < R < 1):
        raise ParameterError("radii must lie in (0, 1)")
    rule = norm_rule(q)
    z = rule.nodes
    a = lp_norm(normalized_average(m, weight, s, r, z, q), rule.weights, p)
    if r == R:
        return 1.0
    b = lp_norm(normalized_average(m, weight, s, R, z, q), rule.weights, p)
    if a == b == 0.0:
        return 1.0
    return a / b if b > 0 else float("inf")
