"""Positive measures on the disk and the integration engine.

A measure is a :class:`DensityMeasure` (``g dA``), an :class:`AtomicMeasure`
or a :class:`PullbackMeasure` (the measure ``Omega_n`` of a weighted
composition operator, characterised by
``int f dOmega_n = int |<psi,phi,n>|^p (f o phi_n) dOmega``).

Besides :func:`integrate` the module exposes two vectorized local
quantities used by the transforms: masses of Euclidean disks
(:func:`disk_masses`) and kernel integrals
``int |1 - conj(w) z|^-e dOmega(w)`` (:func:`kernel_integrals`).  Density
measures evaluate both with rules centered at each probe; pullbacks through a
non-identity map are first pushed forward as a weighted point cloud.
"""

from dataclasses import dataclass
from functools import cached_property
import math
from typing import Callable, Optional

import numpy as np

from . import backend
from .errors import NumericalError, ParameterError
from .geometry import disk_samples, one_minus_abs2
from .quadrature import (QuadratureSpec, disk_rule, global_rule, hyperbolic_cells, support_rule,
                         mobius_rule)

MAX_PULLBACK_DEPTH = 3

# complex elements per temporary block in probe x node broadcasts
_BLOCK = 1 << 21

DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class Estimate:
    value: complex
    error: float

    def __float__(self):
        return float(np.real(self.value))

    def __iter__(self):
        yield self.value
        yield self.error


class Measure:
    """Common base; see the concrete variants."""

    variant = ""

    def scaled(self, c):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class DensityMeasure(Measure):
    """``g dA`` for a nonnegative vectorized ``g``.

    ``radial`` promises ``g`` depends on ``|z|`` only, which lets local
    quantities be computed once per distinct modulus.  ``support_radius``
    (optional) promises ``g = 0`` for ``|z| >= support_radius``.
    """

    density: Callable
    radial: bool = False
    label: str = "density"
    support_radius: Optional[float] = None
    variant = "density"

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        g = np.asarray(self.density(z), dtype=float)
        return np.broadcast_to(g, z.shape)

    def scaled(self, c):
        if c < 0:
            raise ParameterError("measures can only be scaled by c >= 0")
        g = self.density
        return DensityMeasure(lambda z: c * np.asarray(g(z), dtype=float), self.radial,
                              f"{c:g}*{self.label}", self.support_radius)


@dataclass(frozen=True, eq=False)
class AtomicMeasure(Measure):
    points: np.ndarray
    masses: np.ndarray
    label: str = "atomic"
    variant = "atomic"

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex)).ravel()
        ms = np.atleast_1d(np.asarray(self.masses, dtype=float)).ravel()
        if pts.shape != ms.shape:
            raise ParameterError("points and masses must have equal length")
        if pts.size and not np.all(np.abs(pts) < 1.0):
            raise ParameterError("atoms must lie in the open unit disk")
        if ms.size and not np.all(ms > 0):
            raise ParameterError("atomic masses must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", ms)

    @cached_property
    def cloud(self):
        return backend.PointCloud(self.points, self.masses)

    def scaled(self, c):
        if c < 0:
            raise ParameterError("measures can only be scaled by c >= 0")
        if c == 0:
            return zero_measure()
        return AtomicMeasure(self.points, c * self.masses, f"{c:g}*{self.label}")


@dataclass(frozen=True, eq=False)
class PullbackMeasure(Measure):
    """``Omega_n`` for the operator ``f -> psi * (f o phi)`` and exponent ``p``.

    ``psi`` and ``phi`` are vectorized callables.  ``phi_is_identity`` and
    ``radial`` are hints that enable exact density evaluation.
    """

    base: Measure
    psi: Callable
    phi: Callable
    n: int
    p: float
    phi_is_identity: bool = False
    radial: bool = False
    label: str = "pullback"
    variant = "pullback"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError("pullback iterate n must be an integer >= 1")
        if not self.p > 0:
            raise ParameterError("pullback exponent p must be positive")
        if self.depth > MAX_PULLBACK_DEPTH:
            raise ParameterError(f"pullback nesting deeper than {MAX_PULLBACK_DEPTH}")

    @property
    def depth(self):
        d, m = 1, self.base
        while isinstance(m, PullbackMeasure):
            d, m = d + 1, m.base
        return d

    def weight_and_image(self, xi):
        """``(|<psi,phi,n>(xi)|^p, phi_n(xi))`` with the product kept in log form."""
        w = np.asarray(xi, dtype=complex)
        log_mod = np.zeros(w.shape)
        with np.errstate(divide="ignore"):
            for _ in range(self.n):
                log_mod = log_mod + np.log(np.abs(np.broadcast_to(self.psi(w), w.shape)))
                w = np.broadcast_to(self.phi(w), w.shape)
        weight = np.exp(self.p * log_mod)
        return weight, w

    def scaled(self, c):
        return PullbackMeasure(self.base.scaled(c), self.psi, self.phi, self.n, self.p,
                               self.phi_is_identity, self.radial, f"{c:g}*{self.label}")

    def local_form(self, q):
        """A density or atomic measure equal (or close) to this one.

        Through the identity map the pullback is the density
        ``|psi^n|^p g dA`` exactly; otherwise the base is discretized on the
        hyperbolic cell cloud and pushed forward.  Holomorphic self-maps do
        not increase pseudohyperbolic distances, so pushed cells stay small
        relative to the pseudodisks they are tested against.
        """
        key = (q.cell_size, q.cloud_cutoff, q.local_shells, q.disk_panels)
        cache = self.__dict__.setdefault("_local_cache", {})
        if key in cache:
            return cache[key]
        base = self.base
        if isinstance(base, PullbackMeasure):
            base = base.local_form(q)
        if self.phi_is_identity and isinstance(base, DensityMeasure):
            g = base.density

            def density(z, g=g):
                weight, _ = self.weight_and_image(z)
                return np.asarray(g(z), dtype=float) * weight

            out = DensityMeasure(density, base.radial and self.radial, f"local({self.label})",
                                 base.support_radius)
        else:
            pts, wts = discretize(base, q)
            weight, image = self.weight_and_image(pts)
            mass = wts * weight
            keep = mass > 0
            image, mass = compress_cloud(image[keep], mass[keep], 0.5 * q.cell_size)
            out = AtomicMeasure(image, mass, f"cloud({self.label})")
        cache[key] = out
        return out


def lebesgue():
    """Normalized area measure ``dA``."""
    return DensityMeasure(lambda z: np.ones(np.shape(z)), True, "lebesgue")


def weighted_area(weight):
    """``sigma dA`` for a radial weight."""
    return DensityMeasure(lambda z: weight(z), True, f"{weight}*dA")


def radial_density(func, label="radial density"):
    """``g(z) = func(|z|^2)`` for a callable of the real variable ``u = |z|^2``."""
    def density(z):
        u = np.abs(z) ** 2
        return np.real(np.asarray(func(u), dtype=complex)) * np.ones(np.shape(z))
    return DensityMeasure(density, True, label)


def truncated(m, radius):
    """Restriction of a density measure to ``|z| < radius``."""
    if not isinstance(m, DensityMeasure):
        raise ParameterError("only density measures can be truncated")
    if not 0 < radius < 1:
        raise ParameterError("truncation radius must be in (0, 1)")
    g = m.density

    def density(z):
        z = np.asarray(z, dtype=complex)
        return np.where(np.abs(z) < radius, np.asarray(g(z), dtype=float), 0.0)

    return DensityMeasure(density, m.radial, f"{m.label}|<{radius:g}", radius)


def zero_measure():
    return AtomicMeasure(np.zeros(0, dtype=complex), np.zeros(0), "zero")


def atomic(points, masses, label="atomic"):
    return AtomicMeasure(points, masses, label)


# --------------------------------------------------------------------------
# discretization

def discretize(m, q):
    """Weighted point set representing ``m`` (exact for atomic measures)."""
    if isinstance(m, AtomicMeasure):
        return m.points, m.masses
    if isinstance(m, DensityMeasure):
        pts, areas = hyperbolic_cells(q.cell_size, q.cloud_cutoff)
        g = m(pts)
        _check_density(g)
        return pts, g * areas
    if isinstance(m, PullbackMeasure):
        return discretize(m.local_form(q), q)
    raise TypeError(f"unsupported measure {type(m).__name__}")


def compress_cloud(points, masses, cell_size):
    """Merge points sharing a hyperbolic bin into their mass-weighted centroid.

    Bins are rings ``tanh(j * atanh(cell_size))`` split into sectors of
    pseudohyperbolic width about ``cell_size``, so every merge moves mass by
    less than about one cell.  Total mass is preserved exactly.
    """
    if points.size == 0:
        return points, masses
    step = math.atanh(cell_size)
    mod = np.abs(points)
    ring = np.floor(np.arctanh(np.minimum(mod, 1.0 - 1e-16)) / step)
    outer = np.tanh((ring + 1.0) * step)
    sectors = np.maximum(4.0, np.ceil(2.0 * math.pi * outer / (cell_size * (1.0 - outer ** 2))))
    frac = (np.angle(points) + math.pi) / (2.0 * math.pi)
    sector = np.minimum(np.floor(frac * sectors), sectors - 1.0)
    keys = np.stack([ring, sector], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    total = np.bincount(inverse, weights=masses, minlength=uniq.shape[0])
    cx = np.bincount(inverse, weights=masses * points.real, minlength=uniq.shape[0])
    cy = np.bincount(inverse, weights=masses * points.imag, minlength=uniq.shape[0])
    return (cx + 1j * cy) / total, total


def _check_density(g):
    if not np.all(np.isfinite(g)):
        raise NumericalError("density evaluated to a non-finite value")
    if np.any(g < 0):
        raise NumericalError("density took a negative value; measures must be positive")


# --------------------------------------------------------------------------
# integration

def _density_integral(m, f, q):
    if m.support_radius is not None:
        # panel edge at the support boundary; the integrand is smooth inside
        rule = support_rule(q, m.support_radius)
        z = rule.nodes
        g = m(z)
        _check_density(g)
        return np.sum(rule.weights * (g * f(z))), 0.0
    body, tail = global_rule(q)
    zb = body.nodes
    gb = m(zb)
    _check_density(gb)
    vb = gb * f(zb)
    zt = tail.nodes
    gt = m(zt)
    _check_density(gt)
    vt = gt * f(zt)
    main = np.sum(body.weights * vb)
    tail_value = np.sum(tail.weights * vt)
    # the outermost body shell, extrapolated over the neglected annulus
    outer = vb.reshape(body.r.shape[0], body.n_angular)[-1]
    cutoff = q.boundary_cutoff
    tail_proxy = np.mean(outer) * (1.0 - cutoff) * (1.0 + cutoff)
    return main + tail_value, abs(tail_value - tail_proxy)


def integrate(m, f, q=None):
    """Integrate ``f`` against ``m``; returns an :class:`Estimate`.

    For densities the error combines the difference with a half-resolution
    grid and the disagreement between the integrated tail annulus and its
    outermost-shell extrapolation.
    """
    q = q or DEFAULT_QUADRATURE
    if isinstance(m, AtomicMeasure):
        if m.points.size == 0:
            return Estimate(0.0, 0.0)
        value = np.sum(m.masses * f(m.points))
        err = 0.0
    elif isinstance(m, DensityMeasure):
        full, tail_err = _density_integral(m, f, q)
        half, _ = _density_integral(m, f, q.coarsened())
        value, err = full, abs(full - half) + tail_err
    elif isinstance(m, PullbackMeasure):
        def transformed(xi):
            weight, image = m.weight_and_image(xi)
            return weight * f(image)
        value, err = integrate(m.base, transformed, q)
    else:
        raise TypeError(f"unsupported measure {type(m).__name__}")
    if not np.all(np.isfinite(value)):
        raise NumericalError("integral is not finite")
    if np.iscomplexobj(value) and np.imag(value) == 0:
        value = np.real(value)
    return Estimate(value if np.iscomplexobj(value) else float(value), float(err))


def monte_carlo_integrate(m, f, samples, seed=0):
    """Plain Monte Carlo over uniform disk samples; ``(estimate, standard error)``.

    Atomic parts are summed exactly.  Pullbacks are sampled through their
    base with the transformed integrand.
    """
    if samples <= 0:
        raise ParameterError("samples must be a positive integer")
    if isinstance(m, AtomicMeasure):
        return integrate(m, f)
    if isinstance(m, DensityMeasure):
        xs = disk_samples(samples, 1.0, seed)
        vals = m(xs) * f(xs)
        # dA is a probability measure, so the integral is the mean
        mean = np.mean(vals)
        se = float(np.std(vals, ddof=1) / math.sqrt(samples)) if samples > 1 else float("inf")
        return Estimate(mean if np.iscomplexobj(mean) and np.imag(mean) != 0 else float(np.real(mean)), se)
    if isinstance(m, PullbackMeasure):
        def transformed(xi):
            weight, image = m.weight_and_image(xi)
            return weight * f(image)
        return monte_carlo_integrate(m.base, transformed, samples, seed)
    raise TypeError(f"unsupported measure {type(m).__name__}")


def total_mass(m, q=None):
    """Total mass; raises :class:`NumericalError` if it is not finite."""
    est = integrate(m, lambda z: np.ones(np.shape(z)), q)
    value = float(est)
    if not math.isfinite(value) or not math.isfinite(est.error):
        raise NumericalError("measure is not finite")
    return value


# --------------------------------------------------------------------------
# local quantities

def _radial_reduce(centers, *extra):
    """Rotate centers onto the positive axis and deduplicate rows."""
    key = np.stack([np.abs(centers)] + [np.broadcast_to(e, centers.shape) for e in extra], axis=1)
    uniq, inverse = np.unique(key, axis=0, return_inverse=True)
    return uniq, inverse.ravel()


def _density_disk_masses(m, centers, radii, q):
    rule = disk_rule(q)
    v = rule.nodes
    wv = rule.weights
    out = np.empty(centers.shape[0])
    step = max(1, _BLOCK // v.shape[0])
    for s in range(0, centers.shape[0], step):
        c = centers[s:s + step, None]
        rad = radii[s:s + step, None]
        z = c + rad * v[None, :]
        g = m(z)
        _check_density(g)
        out[s:s + step] = (radii[s:s + step] ** 2) * (g @ wv)
    return out


def disk_masses(m, centers, radii, q=None):
    """Measure of each open Euclidean disk ``|w - c| < r`` (disks inside the unit disk)."""
    q = q or DEFAULT_QUADRATURE
    centers = np.atleast_1d(np.asarray(centers, dtype=complex)).ravel()
    radii = np.broadcast_to(np.asarray(radii, dtype=float), centers.shape).astype(float)
    if centers.size == 0:
        return np.zeros(0)
    if isinstance(m, AtomicMeasure):
        if m.points.size == 0:
            return np.zeros(centers.shape[0])
        return backend.disk_sums(centers, radii, m.cloud)
    if isinstance(m, DensityMeasure):
        if m.support_radius is not None:
            outside = np.abs(centers) - radii >= m.support_radius
        else:
            outside = np.zeros(centers.shape, dtype=bool)
        out = np.zeros(centers.shape[0])
        idx = np.flatnonzero(~outside)
        if idx.size:
            if m.radial:
                uniq, inv = _radial_reduce(centers[idx], radii[idx])
                vals = _density_disk_masses(m, uniq[:, 0].astype(complex), uniq[:, 1], q)
                out[idx] = vals[inv]
            else:
                out[idx] = _density_disk_masses(m, centers[idx], radii[idx], q)
        return out
    if isinstance(m, PullbackMeasure):
        return disk_masses(m.local_form(q), centers, radii, q)
    raise TypeError(f"unsupported measure {type(m).__name__}")


def _density_kernel_integrals(m, probes, expo, q):
    rule = mobius_rule(q)
    u = rule.nodes
    wu = rule.weights
    out = np.empty(probes.shape[0])
    step = max(1, _BLOCK // u.shape[0])
    for s in range(0, probes.shape[0], step):
        z = probes[s:s + step, None]
        d = 1.0 - np.conj(z) * u[None, :]
        w = (z - u[None, :]) / d
        g = m(w)
        _check_density(g)
        # w = phi_z(u): |1 - conj(w) z| = (1-|z|^2)/|1 - conj(z) u|, Jacobian (1-|z|^2)^2/|1 - conj(z) u|^4
        integrand = g * np.abs(d) ** (expo - 4.0)
        out[s:s + step] = (integrand @ wu) * one_minus_abs2(z[:, 0]) ** (2.0 - expo)
    return out


def density_kernel_matrix(densities, probes, expo, q=None):
    """``int |1 - conj(w) z|^-expo g_j(w) dA(w)`` for several densities at once.

    Returns an array of shape ``(len(densities), len(probes))``.  The mapped
    nodes and kernel factors are shared across densities, which is what
    makes panels of test functions affordable.
    """
    q = q or DEFAULT_QUADRATURE
    probes = np.atleast_1d(np.asarray(probes, dtype=complex)).ravel()
    rule = mobius_rule(q)
    u = rule.nodes
    wu = rule.weights
    out = np.empty((len(densities), probes.shape[0]))
    step = max(1, _BLOCK // u.shape[0])
    for s in range(0, probes.shape[0], step):
        z = probes[s:s + step, None]
        d = 1.0 - np.conj(z) * u[None, :]
        w = (z - u[None, :]) / d
        factor = np.abs(d) ** (expo - 4.0) * wu[None, :]
        scale = one_minus_abs2(z[:, 0]) ** (2.0 - expo)
        for j, g in enumerate(densities):
            gw = np.asarray(g(w), dtype=float)
            _check_density(gw)
            out[j, s:s + step] = np.sum(gw * factor, axis=1) * scale
    return out


# compact supports up to this radius use a plain rule on the support disk;
# there |1 - conj(w) z| >= 1 - support_radius keeps the kernel smooth
_SUPPORT_RULE_LIMIT = 0.8


def _support_kernel_integrals(m, probes, expo, q):
    rule = disk_rule(q)
    rs = m.support_radius
    w = rs * rule.nodes
    ww = rs * rs * rule.weights
    g = m(w)
    _check_density(g)
    gw = g * ww
    cloud = backend.PointCloud(w, gw)
    return backend.kernel_sums(probes, cloud, expo)


def kernel_integrals(m, probes, expo, q=None):
    """``int |1 - conj(w) z|^(-expo) dOmega(w)`` for each probe ``z``."""
    q = q or DEFAULT_QUADRATURE
    probes = np.atleast_1d(np.asarray(probes, dtype=complex)).ravel()
    if probes.size == 0:
        return np.zeros(0)
    if isinstance(m, AtomicMeasure):
        if m.points.size == 0:
            return np.zeros(probes.shape[0])
        return backend.kernel_sums(probes, m.cloud, expo)
    if isinstance(m, DensityMeasure):
        compute = _density_kernel_integrals
        if m.support_radius is not None and m.support_radius <= _SUPPORT_RULE_LIMIT:
            compute = _support_kernel_integrals
        if m.radial:
            uniq, inv = _radial_reduce(probes)
            return compute(m, uniq[:, 0].astype(complex), expo, q)[inv]
        return compute(m, probes, expo, q)
    if isinstance(m, PullbackMeasure):
        return kernel_integrals(m.local_form(q), probes, expo, q)
    raise TypeError(f"unsupported measure {type(m).__name__}")


def measure_of_pseudo_disk(m, d, q=None):
    """``Omega(E(a, r))`` for a :class:`~bergman_lab.geometry.PseudoDisk`."""
    if isinstance(m, AtomicMeasure):
        # exact pseudohyperbolic membership, independent of the Euclidean form
        from .geometry import rho
        if m.points.size == 0:
            return 0.0
        inside = rho(d.center_hyp, m.points) < d.radius_hyp
        return float(np.sum(m.masses[inside]))
    return float(disk_masses(m, [d.center_euc], [d.radius_euc], q)[0])
