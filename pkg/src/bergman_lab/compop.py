"""Weighted composition operators ``f -> psi * (f o phi)`` and their powers.

The ``n``-th power acts by ``C^n f = <psi, phi, n> * (f o phi_n)`` where
``<psi, phi, n> = prod_{j<n} psi o phi_j``.  Its behaviour on
``A^p_sigma -> L^p(Omega)`` is read off the pullback measures ``Omega_n``
through the Carleson statistics of :mod:`bergman_lab.carleson`.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional, Tuple

import numpy as np

from . import expr as _expr
from .carleson import CarlesonParams, berezin_ratio, averaging_ratio, probe_grid, vanishing_profile
from .errors import ParameterError
from .measure import (DEFAULT_QUADRATURE, AtomicMeasure, DensityMeasure, Estimate,
                      Measure, PullbackMeasure, integrate, total_mass, weighted_area)
from .weights import AdmissibleWeight, make_standard_weight

AUDIT_RADIUS = 0.999
AUDIT_POINTS = 4096
AUDIT_MARGIN = 1e-6


# --------------------------------------------------------------------------
# self-maps

def audit_grid(points=AUDIT_POINTS, radius=AUDIT_RADIUS):
    """``sqrt(points)`` circles of radii up to ``radius`` with as many angles each."""
    side = int(round(math.sqrt(points)))
    radii = radius * np.sqrt((np.arange(side) + 1.0) / side)
    theta = 2.0 * math.pi * np.arange(side) / side
    return (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


@dataclass(frozen=True)
class SelfMap:
    """An analytic self-map of the disk.

    ``verified`` records the audit: every point of a 4096-point grid in
    ``|z| <= 0.999`` maps into the disk and the maximum modulus on the
    circle ``|z| = 0.999`` is at most ``1 - 1e-6``.
    """

    func: Callable
    label: str
    kind: str = "expr"
    is_identity: bool = False
    verified: bool = False
    audit_max: float = math.nan

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(np.asarray(self.func(z), dtype=complex), z.shape)


def _audit(func):
    with np.errstate(all="ignore"):
        grid = audit_grid()
        inside = np.abs(np.broadcast_to(func(grid), grid.shape))
        circle = AUDIT_RADIUS * np.exp(2j * math.pi * np.arange(AUDIT_POINTS) / AUDIT_POINTS)
        edge = np.abs(np.broadcast_to(func(circle), circle.shape))
    if not (np.all(np.isfinite(inside)) and np.all(np.isfinite(edge))):
        return False, math.inf
    top = float(max(inside.max(), edge.max()))
    ok = bool(np.all(inside < 1.0) and edge.max() <= 1.0 - AUDIT_MARGIN)
    return ok, top


def make_self_map(func, label, kind="expr", is_identity=False, require=True):
    """Audit ``func`` and wrap it; raises if the audit fails and ``require``."""
    ok, top = _audit(func)
    if require and not ok:
        raise ParameterError(f"{label} is not a verified self-map of the disk "
                             f"(max audited modulus {top:.9g})")
    return SelfMap(func, label, kind, is_identity, ok, top)


def identity_map():
    return make_self_map(lambda z: np.asarray(z, dtype=complex), "z", "identity", True)


def scale_map(lam):
    lam = complex(lam)
    if not abs(lam) <= 1.0:
        raise ParameterError("scale factor must satisfy |lambda| <= 1")
    return make_self_map(lambda z: lam * np.asarray(z, dtype=complex), f"scale({lam:g})",
                         "scale", lam == 1.0)


def mobius_map(a):
    """The involution ``(a - z)/(1 - conj(a) z)``."""
    a = complex(a)
    if not abs(a) < 1.0:
        raise ParameterError("Mobius parameter must lie in the open disk")
    return make_self_map(lambda z: (a - z) / (1.0 - np.conj(a) * z), f"mobius({a:g})", "mobius")


def blaschke_map(zeros):
    """Finite Blaschke product ``prod (a_k - z)/(1 - conj(a_k) z)``."""
    zs = [complex(a) for a in zeros]
    if not zs:
        raise ParameterError("a Blaschke product needs at least one zero")
    if not all(abs(a) < 1.0 for a in zs):
        raise ParameterError("Blaschke zeros must lie in the open disk")

    def func(z):
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape, dtype=complex)
        for a in zs:
            out = out * (a - z) / (1.0 - np.conj(a) * z)
        return out

    return make_self_map(func, "blaschke(" + ", ".join(f"{a:g}" for a in zs) + ")", "blaschke")


def expr_map(src):
    """Self-map given by an expression in ``z``."""
    e = _expr.parse(src) if isinstance(src, str) else src
    is_id = _expr.strip_offsets(e.root) == _expr.Var("z")
    return make_self_map(lambda z: _expr.evaluate(e, z), _expr.pretty(e), "expr", is_id)


def _require_verified(phi):
    if not phi.verified:
        raise ParameterError(f"self-map {phi.label} failed verification")


def iterate_phi(phi, n, z):
    """``phi_n(z)``, the ``n``-fold composition (``phi_0`` is the identity)."""
    if int(n) != n or n < 0:
        raise ParameterError("iteration count must be an integer >= 0")
    _require_verified(phi)
    w = np.asarray(z, dtype=complex)
    for _ in range(int(n)):
        w = phi(w)
        if not np.all(np.abs(w) < 1.0):
            raise ParameterError(f"iterate of {phi.label} left the disk")
    return w[()] if w.ndim == 0 else w


def _log_product(psi, phi, n, z):
    """``(sum log|psi o phi_j|, sum arg psi o phi_j, phi_n)`` over ``j < n``."""
    w = np.asarray(z, dtype=complex)
    log_mod = np.zeros(w.shape)
    phase = np.zeros(w.shape)
    with np.errstate(divide="ignore"):
        for _ in range(n):
            v = np.broadcast_to(np.asarray(psi(w), dtype=complex), w.shape)
            log_mod = log_mod + np.log(np.abs(v))
            phase = phase + np.angle(v)
            w = phi(w)
    return log_mod, phase, w


def weight_product(psi, phi, n, z):
    """``<psi, phi, n>(z) = prod_{j=0}^{n-1} psi(phi_j(z))``.

    Accumulated as a log-modulus and a phase, so intermediate products
    cannot overflow.
    """
    if int(n) != n or n < 1:
        raise ParameterError("n must be an integer >= 1")
    log_mod, phase, _ = _log_product(psi, phi, int(n), z)
    with np.errstate(over="ignore"):
        out = np.exp(log_mod) * np.exp(1j * phase)
    return out[()] if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# operator specification

def _as_function(f):
    if isinstance(f, str):
        e = _expr.parse(f)
        return lambda z: _expr.evaluate(e, z), e
    if isinstance(f, _expr.Expr):
        return (lambda z: _expr.evaluate(f, z)), f
    if isinstance(f, (int, float, complex)):
        c = complex(f)
        return (lambda z: np.full(np.shape(z), c, dtype=complex)), None
    return f, None


@dataclass(frozen=True)
class CompOpSpec:
    """``C_{psi,phi}`` with exponent ``p`` acting into ``L^p(base_measure)``.

    ``psi`` may be a number, an expression string, an :class:`Expr` or a
    vectorized callable.  ``base_measure`` defaults to ``sigma dA``.
    """

    psi: object
    phi: SelfMap
    p: float = 2.0
    weight: Optional[AdmissibleWeight] = None
    alpha: float = 0.0
    base_measure: Optional[Measure] = None
    psi_func: Callable = field(init=False, repr=False, compare=False)
    psi_constant: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.p > 0 or math.isinf(self.p):
            raise ParameterError("p must be positive and finite")
        if self.alpha < 0:
            raise ParameterError("alpha must be >= 0")
        _require_verified(self.phi)
        if self.weight is None:
            object.__setattr__(self, "weight", make_standard_weight(self.alpha))
        if self.base_measure is None:
            object.__setattr__(self, "base_measure", weighted_area(self.weight))
        func, e = _as_function(self.psi)
        constant = isinstance(self.psi, (int, float, complex)) or (e is not None and e.is_constant)
        object.__setattr__(self, "psi_func", func)
        object.__setattr__(self, "psi_constant", bool(constant))
        if not isinstance(self.base_measure, AtomicMeasure):
            total_mass(self.base_measure)


def pullback_measure(spec, n):
    """``Omega_n``: ``int f dOmega_n = int |<psi,phi,n>|^p (f o phi_n) dOmega``."""
    base = spec.base_measure
    radial = spec.phi.is_identity and spec.psi_constant
    return PullbackMeasure(base, spec.psi_func, spec.phi.func, int(n), spec.p,
                           phi_is_identity=spec.phi.is_identity, radial=radial,
                           label=f"Omega_{int(n)}")


@dataclass(frozen=True)
class OperatorApplication:
    """``C^n f`` with its ``L^p(Omega)`` norm computed along two paths.

    ``direct`` integrates ``|C^n f|^p`` against the base measure;
    ``pullback`` integrates ``|f|^p`` against the discretized ``Omega_n``.
    """

    function: Callable
    direct: Estimate
    pullback: Estimate
    p: float

    @property
    def norm(self):
        return float(self.direct) ** (1.0 / self.p)

    @property
    def discrepancy(self):
        return abs(float(self.direct) - float(self.pullback))

    @property
    def agrees(self):
        return self.discrepancy <= self.direct.error + self.pullback.error


def _pullback_integral(m, g, q):
    """``int g dOmega_n`` through the local form, with a resolution-based error."""
    coarse = m.local_form(q)
    fine = m.local_form(q.refined())
    if isinstance(fine, DensityMeasure):
        return integrate(fine, g, q)
    a = float(np.real(integrate(coarse, g, q).value))
    b = float(np.real(integrate(fine, g, q).value))
    return Estimate(b, abs(a - b))


def apply_operator(spec, n, f, q=None):
    """``C^n f`` and ``||C^n f||^p_{L^p(Omega)}`` by the direct and pullback paths."""
    q = q or DEFAULT_QUADRATURE
    if int(n) != n or n < 0:
        raise ParameterError("n must be an integer >= 0")
    n = int(n)
    f, _ = _as_function(f)
    psi, phi = spec.psi_func, spec.phi

    def cn_f(z):
        z = np.asarray(z, dtype=complex)
        if n == 0:
            return np.broadcast_to(np.asarray(f(z), dtype=complex), z.shape)
        log_mod, phase, w = _log_product(psi, phi, n, z)
        vals = np.broadcast_to(np.asarray(f(w), dtype=complex), z.shape)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(log_mod + 1j * phase) * vals

    p = spec.p
    direct = integrate(spec.base_measure, lambda z: np.abs(cn_f(z)) ** p, q)
    if n == 0:
        pull = direct
    else:
        m = pullback_measure(spec, n)
        pull = _pullback_integral(m, lambda w: np.abs(np.asarray(f(w))) ** p, q)
    return OperatorApplication(cn_f, direct, pull, p)


# --------------------------------------------------------------------------
# power diagnostics

# relative slack when comparing successive Q values
TREND_TOL = 0.01
BURN_IN = 2
SPOT_CHECKS = (16, 24)


@dataclass(frozen=True)
class PowerDiagnostic:
    n_values: Tuple[int, ...]
    Q2: Tuple[float, ...]
    Q3: Tuple[float, ...]
    Q4: Tuple[float, ...]
    errors: dict  # name -> per-n refinement differences
    profiles: tuple
    verdict: str
    compactness: str
    reasons: Tuple[str, ...] = ()

    def rows(self):
        """``(n, Q2, Q3, Q4, errors, profile)`` per iterate."""
        for i, n in enumerate(self.n_values):
            errs = tuple(self.errors[k][i] for k in ("Q2", "Q3", "Q4"))
            yield n, self.Q2[i], self.Q3[i], self.Q4[i], errs, self.profiles[i]


def _power_stats(m, params, q):
    lat = params.lattice()
    probes = np.concatenate([probe_grid(params.n_radial, params.n_angular,
                                        params.truncations[-1]), lat.nodes])
    q2 = float(np.max(berezin_ratio(m, params, probes, q)))
    q3 = float(np.max(averaging_ratio(m, params, probes, q)))
    q4 = float(np.max(averaging_ratio(m, params, lat.nodes, q, radius=lat.r)))
    return q2, q3, q4


def _trend(seq, tol=TREND_TOL):
    """``'flat_or_decreasing'``, ``'growing'`` or ``'mixed'`` beyond the burn-in."""
    tail = seq[BURN_IN - 1:]
    if len(tail) < 2:
        return "flat_or_decreasing"
    steps = [_ratio(a, b) for a, b in zip(tail, tail[1:])]
    if all(s <= 1.0 + tol for s in steps):
        return "flat_or_decreasing"
    if all(s > 1.0 + tol for s in steps):
        return "growing"
    return "mixed"


def _ratio(a, b):
    if a > 0:
        return b / a
    return 1.0 if b == 0 else math.inf


def power_diagnostic(spec, n_max=12, params=None, q=None, spot_checks=SPOT_CHECKS,
                     shells=8, refine=True):
    """Carleson statistics of ``Omega_n`` for ``n = 1..n_max`` and spot checks.

    ``Q2`` is the sup of the normalized Berezin transform, ``Q3`` the sup of
    ``Omega^_{n,R} / sigma`` and ``Q4`` the maximum over lattice nodes, all
    with ``q = p``.  The verdict is ``power_bounded`` when every Q sequence
    is finite, refinement-stable at its maximum and non-increasing (within
    ``TREND_TOL``) after the burn-in; ``not_power_bounded`` when some
    sequence is not finite or grows at every step after the burn-in;
    ``inconclusive`` otherwise.  Compactness evidence is reported when some
    ``Omega_n`` has a vanishing shell profile.
    """
    q = q or DEFAULT_QUADRATURE
    if int(n_max) != n_max or n_max < 1:
        raise ParameterError("n_max must be an integer >= 1")
    if params is None:
        params = CarlesonParams(spec.p, spec.p, alpha=spec.alpha, weight=spec.weight)
    if params.q != params.p or params.p != spec.p:
        raise ParameterError("power diagnostics use q = p equal to the operator exponent")
    from .carleson import carleson_check
    first = carleson_check(pullback_measure(spec, 1), params, q, refine=False)
    if first.verdict == "not_carleson":
        raise ParameterError("C_{psi,phi} appears unbounded (Omega_1 is not a Carleson "
                             "measure); power diagnostics need a bounded operator")
    ns = list(range(1, int(n_max) + 1)) + [k for k in spot_checks if k > n_max]
    stats, profiles = [], []
    for n in ns:
        m = pullback_measure(spec, n)
        stats.append(_power_stats(m, params, q))
        profiles.append(vanishing_profile(m, params, shells, q, refine=refine))
    if refine:
        refined = [_power_stats(pullback_measure(spec, n), params, q.refined()) for n in ns]
    else:
        refined = stats
    names = ("Q2", "Q3", "Q4")
    cols = {name: [s[i] for s in stats] for i, name in enumerate(names)}
    errors = {name: tuple(abs(r[i] - s[i]) for r, s in zip(refined, stats))
              for i, name in enumerate(names)}
    reasons = []
    stable = True
    for name in names:
        seq = cols[name]
        k = int(np.argmax(seq))
        if seq[k] > 0 and not errors[name][k] < 0.1 * seq[k]:
            stable = False
            reasons.append(f"max {name} changes by 10% or more under refinement")
    trends = {name: _trend(cols[name]) for name in cols}
    finite = all(math.isfinite(v) for seq in cols.values() for v in seq)
    if not finite:
        verdict = "not_power_bounded"
        reasons.append("a statistic is not finite")
    elif any(t == "growing" for t in trends.values()):
        verdict = "not_power_bounded"
        reasons += [f"{k} grows at every step after n={BURN_IN}" for k, t in trends.items()
                    if t == "growing"]
    elif stable and all(t == "flat_or_decreasing" for t in trends.values()):
        verdict = "power_bounded"
    else:
        verdict = "inconclusive"
        reasons += [f"{k} trend is {t}" for k, t in trends.items() if t != "flat_or_decreasing"]
    compact = "power_compact_evidence" if any(p.vanishing for p in profiles) else "none"
    return PowerDiagnostic(tuple(ns), tuple(cols["Q2"]), tuple(cols["Q3"]), tuple(cols["Q4"]),
                           errors, tuple(profiles), verdict, compact, tuple(reasons))
