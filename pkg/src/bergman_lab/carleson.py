"""Numerical Carleson-measure diagnostics.

For a positive measure ``Omega`` and exponents ``0 < p, q < inf`` the
embedding ``A^p_sigma -> L^q(Omega)`` is tested through four quantities:

* the normalized ``t``-Berezin transform,
* the normalized averaging function over pseudohyperbolic disks,
* the same averages sampled on an ``r``-lattice,
* a kernel-test lower bound for ``||i||^q``.

When ``p <= q`` each quantity is a supremum over probe points; when
``q < p`` the first three are ``L^{p/(p-q)}`` (or ``l^{p/(p-q)}``) norms.
All sups and norms are evaluated on nested truncations ``|z| <= tau`` and
the verdict looks at how they grow as ``tau -> 1``.
"""

from dataclasses import dataclass, field
import math
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import ParameterError
from .geometry import Lattice, make_lattice, one_minus_abs2
from .measure import (DEFAULT_QUADRATURE, DensityMeasure, density_kernel_matrix,
                      kernel_integrals, weighted_area)
from .quadrature import QuadratureSpec, norm_rule
from .transforms import averaging, berezin_t, lp_norm
from .weights import AdmissibleWeight, make_standard_weight

TRUNCATIONS = (0.9, 0.99, 0.999)
# verdict thresholds on the ratio Q(tau_next) / Q(tau)
GROWTH_PERSISTENT = 1.25
GROWTH_SINGLE = 2.0
STABLE_STEP = 0.10
STABLE_REFINEMENT = 0.10

QUANTITIES = ("berezin", "averaging", "lattice", "probe")


def berezin_threshold(p, q, alpha):
    """Lower bound on ``t`` required for the Berezin characterisation."""
    if p <= q:
        return 2.0 * q / (p * (alpha + 2.0))
    return 2.0 * (q + p) / (p * (alpha + 2.0))


def default_t(p, q, alpha):
    """``t = 2`` when admissible, otherwise one unit above the threshold."""
    bound = berezin_threshold(p, q, alpha)
    return 2.0 if 2.0 > bound else bound + 1.0


def probe_grid(n_radial=64, n_angular=64, truncation=TRUNCATIONS[-1]):
    """Probe points on radii ``1 - (1 - tau)**(i/(n_radial-1))``.

    The innermost radius is 0 and contributes a single probe; odd rings are
    rotated by half an angular step.
    """
    if n_radial < 2 or n_angular < 1:
        raise ParameterError("probe grid needs n_radial >= 2 and n_angular >= 1")
    if not 0.0 < truncation < 1.0:
        raise ParameterError("truncation must be in (0, 1)")
    i = np.arange(n_radial)
    radii = 1.0 - (1.0 - truncation) ** (i / (n_radial - 1))
    radii[0] = 0.0
    pts = [np.zeros(1, dtype=complex)]
    for k, rad in enumerate(radii[1:], start=1):
        theta = 2.0 * math.pi * (np.arange(n_angular) + 0.5 * (k % 2)) / n_angular
        pts.append(rad * np.exp(1j * theta))
    return np.concatenate(pts)


@dataclass(frozen=True)
class CarlesonParams:
    """Exponents and auxiliary parameters of a Carleson test.

    ``weight`` defaults to the standard weight with exponent ``alpha``;
    ``alpha`` is the kernel exponent used in the Berezin transform.
    """

    p: float
    q: float
    t: Optional[float] = None
    R: float = 0.5
    alpha: float = 0.0
    weight: Optional[AdmissibleWeight] = None
    lattice_r: float = 0.5
    lattice_truncation: float = TRUNCATIONS[-1]
    truncations: Tuple[float, ...] = TRUNCATIONS
    n_radial: int = 64
    n_angular: int = 64

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0) or math.isinf(self.p) or math.isinf(self.q):
            raise ParameterError("p and q must be positive and finite")
        if self.alpha < 0:
            raise ParameterError("alpha must be >= 0")
        if not 0.0 < self.R < 1.0:
            raise ParameterError("R must be in (0, 1)")
        if not 0.0 < self.lattice_r < 1.0:
            raise ParameterError("lattice radius must be in (0, 1)")
        taus = tuple(float(x) for x in self.truncations)
        if len(taus) < 2 or any(not 0 < a < b < 1 for a, b in zip(taus, taus[1:])):
            raise ParameterError("truncations must be increasing values in (0, 1), at least two")
        object.__setattr__(self, "truncations", taus)
        if self.t is None:
            object.__setattr__(self, "t", default_t(self.p, self.q, self.alpha))
        bound = berezin_threshold(self.p, self.q, self.alpha)
        if not self.t > bound:
            rel = "2q/(p(alpha+2))" if self.p <= self.q else "2(q+p)/(p(alpha+2))"
            raise ParameterError(f"t={self.t:g} must exceed {rel} = {bound:.6g}")
        if self.weight is None:
            object.__setattr__(self, "weight", make_standard_weight(self.alpha))

    @property
    def regime(self):
        return "p<=q" if self.p <= self.q else "q<p"

    @property
    def norm_exponent(self):
        """``p/(p-q)`` in the ``q < p`` regime, ``inf`` otherwise."""
        return math.inf if self.p <= self.q else self.p / (self.p - self.q)

    def lattice(self):
        return _cached_lattice(self.lattice_r, self.lattice_truncation)


_LATTICES: Dict[Tuple[float, float], Lattice] = {}


def _cached_lattice(r, tau):
    key = (float(r), float(tau))
    if key not in _LATTICES:
        _LATTICES[key] = make_lattice(r, tau)
    return _LATTICES[key]


# --------------------------------------------------------------------------
# pointwise normalized quantities

def berezin_ratio(m, params, z, q=None):
    """``Omega~_t(z) / (sigma(z)^(q/p) (1 - |z|^2)^e)``.

    The exponent is ``e = 2q/p - (alpha+2) t/2`` for ``p <= q`` and
    ``e = 2 - (alpha+2) t/2`` for ``q < p``.
    """
    z = np.asarray(z, dtype=complex)
    p, qq, t, a = params.p, params.q, params.t, params.alpha
    if params.p <= params.q:
        e = 2.0 * qq / p - 0.5 * (a + 2.0) * t
    else:
        e = 2.0 - 0.5 * (a + 2.0) * t
    den = params.weight(z) ** (qq / p) * one_minus_abs2(z) ** e
    return berezin_t(m, t, a, z, q) / den


def averaging_ratio(m, params, z, q=None, radius=None):
    """``Omega^_R(z) / (sigma(z)^(q/p) (1 - |z|^2)^(2(q-p)/p))``."""
    z = np.asarray(z, dtype=complex)
    radius = params.R if radius is None else radius
    p, qq = params.p, params.q
    den = params.weight(z) ** (qq / p) * one_minus_abs2(z) ** (2.0 * (qq - p) / p)
    return averaging(m, radius, z, q) / den


def integrability_ratio(m, params, z, q=None):
    """``Omega^_R(z) / sigma(z)^(q/p)``, whose ``L^{p/(p-q)}`` norm is tested when ``q < p``."""
    z = np.asarray(z, dtype=complex)
    return averaging(m, params.R, z, q) / params.weight(z) ** (params.q / params.p)


def lattice_sequence(m, params, q=None, lattice=None):
    """``(nodes, values)`` of the averaging ratio at the lattice radius."""
    lat = lattice or params.lattice()
    nodes = lat.nodes
    return nodes, averaging_ratio(m, params, nodes, q, radius=lat.r)


def probe_embedding_ratio(m, params, z, q=None):
    """``int |K(w, z)|^q dOmega(w) / ||K(., z)||^q_{A^p_sigma}`` at each probe.

    Every value is a lower bound for ``||i||^q``.
    """
    qq = q or DEFAULT_QUADRATURE
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    a = params.alpha
    num = kernel_integrals(m, z, params.q * (a + 2.0), qq)
    norm_p = kernel_integrals(weighted_area(params.weight), z, params.p * (a + 2.0), qq)
    return num / norm_p ** (params.q / params.p)


def probe_embedding_norm(m, params, probes, q=None):
    """Sup of :func:`probe_embedding_ratio` over ``probes`` (0 for no probes)."""
    vals = probe_embedding_ratio(m, params, probes, q)
    return float(vals.max()) if vals.size else 0.0


# --------------------------------------------------------------------------
# the check

@dataclass(frozen=True)
class CarlesonReport:
    """Result of :func:`carleson_check`.

    ``Q_*`` are the values at the largest truncation (for ``q < p`` the norm
    over the whole disk); ``errors`` holds the change under quadrature
    refinement.  ``by_truncation`` lists each quantity at every truncation.
    """

    regime: str
    p: float
    q: float
    t: float
    R: float
    Q_berezin: float
    Q_averaging: float
    Q_lattice: float
    Q_probe: float
    errors: Dict[str, float]
    by_truncation: Dict[str, Tuple[float, ...]]
    truncations: Tuple[float, ...]
    mutual_ratios: Dict[str, Optional[float]]
    verdict: str
    reasons: Tuple[str, ...] = field(default_factory=tuple)

    def values(self):
        return {"berezin": self.Q_berezin, "averaging": self.Q_averaging,
                "lattice": self.Q_lattice, "probe": self.Q_probe}


def _growth(a, b):
    if a > 0:
        return b / a
    return 1.0 if b == 0 else math.inf


def _sup_profile(z, vals, taus):
    mod = np.abs(z)
    out = []
    for tau in taus:
        sel = vals[mod <= tau + 1e-12]
        out.append(float(np.max(sel)) if sel.size else 0.0)
    return tuple(out)


def _norm_profile(z, vals, weights, expo, taus):
    mod = np.abs(z)
    out = [lp_norm(vals[mod <= tau], weights[mod <= tau], expo) for tau in taus]
    return tuple(out)


def _evaluate(m, params, q):
    """Per-truncation profiles and full values of the four quantities."""
    taus = params.truncations
    lat = params.lattice()
    nodes = lat.nodes
    lat_vals = averaging_ratio(m, params, nodes, q, radius=lat.r)
    probes = probe_grid(params.n_radial, params.n_angular, taus[-1])
    probe_vals = probe_embedding_ratio(m, params, probes, q)
    prof = {}
    full = {}
    if params.p <= params.q:
        z = np.concatenate([probes, nodes])
        ber = berezin_ratio(m, params, z, q)
        avg = averaging_ratio(m, params, z, q)
        prof["berezin"] = _sup_profile(z, ber, taus)
        prof["averaging"] = _sup_profile(z, avg, taus)
        prof["lattice"] = _sup_profile(nodes, lat_vals, taus)
        for k in ("berezin", "averaging", "lattice"):
            full[k] = prof[k][-1]
    else:
        s = params.norm_exponent
        rule = norm_rule(q)
        z, wz = rule.nodes, rule.weights
        ber = berezin_ratio(m, params, z, q)
        avg = integrability_ratio(m, params, z, q)
        prof["berezin"] = _norm_profile(z, ber, wz, s, taus)
        prof["averaging"] = _norm_profile(z, avg, wz, s, taus)
        ones = np.ones(nodes.shape[0])
        prof["lattice"] = _norm_profile(nodes, lat_vals, ones, s, taus)
        full["berezin"] = lp_norm(ber, wz, s)
        full["averaging"] = lp_norm(avg, wz, s)
        full["lattice"] = lp_norm(lat_vals, ones, s)
    prof["probe"] = _sup_profile(probes, probe_vals, taus)
    full["probe"] = prof["probe"][-1]
    return prof, full


def _verdict(prof, full, refined):
    reasons = []
    vals = list(full.values())
    if not all(math.isfinite(v) for v in vals):
        return "not_carleson", ("a diagnostic is not finite",)
    grows = False
    settled = True
    for name, seq in prof.items():
        g = [_growth(a, b) for a, b in zip(seq, seq[1:])]
        if g[-1] >= GROWTH_SINGLE:
            grows = True
            reasons.append(f"{name} grows by {g[-1]:.3g}x at the last truncation step")
        elif all(x >= GROWTH_PERSISTENT for x in g):
            grows = True
            reasons.append(f"{name} grows by at least {GROWTH_PERSISTENT}x at every step")
        if not abs(g[-1] - 1.0) < STABLE_STEP:
            settled = False
    if grows:
        return "not_carleson", tuple(reasons)
    drift = {k: _growth(full[k], refined[k]) for k in full}
    stable = all(abs(d - 1.0) < STABLE_REFINEMENT for d in drift.values())
    if settled and stable:
        return "carleson", ("all diagnostics settled and refinement-stable",)
    if not settled:
        reasons.append("diagnostics still drifting at the last truncation step")
    if not stable:
        reasons.append("diagnostics change under quadrature refinement")
    return "inconclusive", tuple(reasons)


def carleson_check(m, params, q=None, refine=True):
    """Evaluate the four diagnostics and classify ``m``.

    The verdict is ``not_carleson`` if some diagnostic is not finite, grows
    at least ``GROWTH_SINGLE``-fold over the last truncation step, or grows
    at least ``GROWTH_PERSISTENT``-fold at every step; ``carleson`` if every
    diagnostic changes by less than ``STABLE_STEP`` over the last step and
    by less than ``STABLE_REFINEMENT`` under a doubled quadrature;
    ``inconclusive`` otherwise.
    """
    q = q or DEFAULT_QUADRATURE
    prof, full = _evaluate(m, params, q)
    if refine:
        _, refined = _evaluate(m, params, q.refined())
    else:
        refined = dict(full)
    errors = {k: abs(refined[k] - full[k]) for k in full}
    verdict, reasons = _verdict(prof, full, refined)
    ratios = {}
    for i, a in enumerate(QUANTITIES):
        for b in QUANTITIES[i + 1:]:
            ratios[f"{a}/{b}"] = full[a] / full[b] if full[b] > 0 else None
    return CarlesonReport(
        regime=params.regime, p=params.p, q=params.q, t=params.t, R=params.R,
        Q_berezin=full["berezin"], Q_averaging=full["averaging"],
        Q_lattice=full["lattice"], Q_probe=full["probe"], errors=errors,
        by_truncation=prof, truncations=params.truncations, mutual_ratios=ratios,
        verdict=verdict, reasons=reasons)


# --------------------------------------------------------------------------
# vanishing profile

@dataclass(frozen=True)
class VanishingProfile:
    shell_edges: np.ndarray
    shell_sups: np.ndarray
    trend: float
    decaying: bool
    vanishing: bool
    shell_errors: Optional[np.ndarray] = None


def _shell_sups(m, params, edges, q, radii_per_shell):
    n_ang = params.n_angular
    theta = 2.0 * math.pi * np.arange(n_ang) / n_ang
    sups = np.empty(edges.size - 1)
    for j in range(edges.size - 1):
        # include each shell's inner edge, where sups of decaying profiles sit
        rad = edges[j] + (edges[j + 1] - edges[j]) * np.arange(radii_per_shell) / radii_per_shell
        z = (rad[:, None] * np.exp(1j * theta)[None, :]).ravel()
        if j == 0:
            z = np.concatenate([[0.0], z[np.abs(z) > 0]])
        sups[j] = float(np.max(averaging_ratio(m, params, z, q)))
    return sups


def vanishing_profile(m, params, shells=8, q=None, truncation=TRUNCATIONS[-1],
                      radii_per_shell=4, refine=False):
    """Sup of the averaging ratio over each shell ``edges[j] <= |z| < edges[j+1]``.

    Edges are ``1 - (1 - truncation)**(j/shells)``.  ``decaying`` means the
    last shell sup is below a tenth of the first; ``vanishing`` additionally
    requires it to be below ``1e-3`` times the global sup.  A profile that is
    identically zero in the last shell counts as vanishing.  With ``refine``
    the sups are recomputed on doubled quadrature and ``shell_errors`` holds
    the differences.
    """
    if int(shells) != shells or shells < 3:
        raise ParameterError("shells must be an integer >= 3")
    if not 0.0 < truncation < 1.0:
        raise ParameterError("truncation must be in (0, 1)")
    q = q or DEFAULT_QUADRATURE
    edges = 1.0 - (1.0 - truncation) ** (np.arange(int(shells) + 1) / shells)
    sups = _shell_sups(m, params, edges, q, radii_per_shell)
    errors = None
    if refine:
        errors = np.abs(_shell_sups(m, params, edges, q.refined(), radii_per_shell) - sups)
    first, last, top = sups[0], sups[-1], float(sups.max())
    trend = _growth(first, last)
    if last == 0.0:
        decaying = vanishing = True
    else:
        decaying = bool(last < 0.1 * first)
        vanishing = bool(decaying and last < 1e-3 * top)
    return VanishingProfile(edges, sups, trend, decaying, vanishing, errors)


# --------------------------------------------------------------------------
# general-s equivalence triple

def triple_hypothesis_holds(t, s, p):
    """``t < s + 1/p < 1``."""
    inv = 0.0 if math.isinf(p) else 1.0 / p
    return t < s + inv < 1.0


def equivalence_triple(m, t, s, p, R, lat, q=None, weight=None, alpha=0.0,
                       check_hypothesis=True):
    """``(||M~_{t,s}||_p, ||M^_{R,s}||_p, l^p lattice norm)``.

    ``M~_{t,s} = Omega~_t / (sigma^s (1-|z|^2)^(2s - (alpha+2)t/2))``,
    ``M^_{R,s} = Omega^_R / (sigma^s (1-|z|^2)^(2(s-1)))`` and the lattice
    entries are ``Omega^_r(z_k) / (sigma^s(z_k) (1-|z_k|^2)^(2(s-1-1/p)))``
    with ``r`` the lattice radius.  ``p`` may be ``inf``.

    With ``check_hypothesis`` the parameters must satisfy
    ``t < s + 1/p < 1``; pass ``False`` to evaluate the three norms outside
    that range.
    """
    if not p >= 1:
        raise ParameterError("p must be >= 1 (or inf)")
    if not t > 0:
        raise ParameterError("t must be positive")
    if not 0.0 < R < 1.0:
        raise ParameterError("R must be in (0, 1)")
    if check_hypothesis and not triple_hypothesis_holds(t, s, p):
        raise ParameterError(f"hypothesis t < s + 1/p < 1 fails for t={t:g}, s={s:g}, p={p:g}")
    q = q or DEFAULT_QUADRATURE
    weight = weight or make_standard_weight(alpha)
    inv = 0.0 if math.isinf(p) else 1.0 / p
    rule = norm_rule(q)
    z, wz = rule.nodes, rule.weights
    sig = weight(z) ** s
    d = one_minus_abs2(z)
    m_tilde = berezin_t(m, t, alpha, z, q) / (sig * d ** (2.0 * s - 0.5 * (alpha + 2.0) * t))
    m_hat = averaging(m, R, z, q) / (sig * d ** (2.0 * (s - 1.0)))
    nodes = lat.nodes
    entries = averaging(m, lat.r, nodes, q) / (
        weight(nodes) ** s * one_minus_abs2(nodes) ** (2.0 * (s - 1.0 - inv)))
    return (lp_norm(m_tilde, wz, p), lp_norm(m_hat, wz, p),
            lp_norm(entries, np.ones(nodes.shape[0]), p))


# --------------------------------------------------------------------------
# Schur-type integral operator

def schur_parameters_valid(p, alpha, t, s):
    """``(1 - p)/p < s < (alpha + 2) t / 2 + 1/p``."""
    return (1.0 - p) / p < s < 0.5 * (alpha + 2.0) * t + 1.0 / p


def schur_operator_apply(f, t, s, alpha, w, z, q=None):
    """``T_{t,s} |f| (z)`` for a vectorized ``f``; vectorized in ``z``.

    ``T_{t,s} f(z) = sigma^s(z) (1-|z|^2)^((alpha+2)t - 2s)
    int |K^alpha(z, xi)|^t f(xi) / (sigma^s(xi) (1-|xi|^2)^(2(s-1))) dA(xi)``.
    """
    if not t > 0:
        raise ParameterError("t must be positive")
    if alpha < 0:
        raise ParameterError("alpha must be >= 0")
    q = q or DEFAULT_QUADRATURE
    zz = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()

    def density(xi):
        fx = np.abs(np.asarray(f(xi))) * np.ones(np.shape(xi))
        return fx / (w(xi) ** s * one_minus_abs2(xi) ** (2.0 * (s - 1.0)))

    e = (alpha + 2.0) * t
    vals = kernel_integrals(DensityMeasure(density), zz, e, q)
    out = w(zz) ** s * one_minus_abs2(zz) ** (e - 2.0 * s) * vals
    return out[0] if np.ndim(z) == 0 else out.reshape(np.shape(z))


@dataclass(frozen=True)
class SchurCheck:
    ratios: np.ndarray
    max_ratio: float
    refined_max: float
    drift: float
    parameters_valid: bool

    @property
    def stable(self):
        return bool(math.isfinite(self.max_ratio) and self.drift < 0.10)


def _schur_ratios(functions, p, t, s, alpha, w, q):
    rule = norm_rule(q)
    z, wz = rule.nodes, rule.weights

    def density(f):
        return lambda xi: (np.abs(np.asarray(f(xi)))
                           / (w(xi) ** s * one_minus_abs2(xi) ** (2.0 * (s - 1.0))))

    e = (alpha + 2.0) * t
    vals = density_kernel_matrix([density(f) for f in functions], z, e, q)
    tf = w(z) ** s * one_minus_abs2(z) ** (e - 2.0 * s) * vals
    out = []
    for f, row in zip(functions, tf):
        fz = np.abs(np.asarray(f(z)))
        out.append(lp_norm(row, wz, p) / lp_norm(fz, wz, p))
    return np.array(out)


# a lighter default for the panel check; refinement doubles it
SCHUR_QUADRATURE = QuadratureSpec(local_shells=8, local_angular=16, norm_shells=8,
                                  norm_angular=16)


def schur_boundedness_check(functions, p, alpha, t, s, w=None, q=None):
    """``||T_{t,s} f||_p / ||f||_p`` over test functions (applied to ``|f|``).

    The maximum is recomputed with refined quadrature; ``drift`` is the
    relative change.  ``parameters_valid`` reports whether ``(p, alpha, t, s)``
    is in the range where boundedness is guaranteed.
    """
    if not p >= 1:
        raise ParameterError("p must be >= 1")
    q = q or SCHUR_QUADRATURE
    w = w or make_standard_weight(alpha)
    ratios = _schur_ratios(functions, p, t, s, alpha, w, q)
    refined = _schur_ratios(functions, p, t, s, alpha, w, q.refined())
    mx, rmx = float(ratios.max()), float(refined.max())
    drift = abs(rmx - mx) / mx if mx > 0 else 0.0
    return SchurCheck(ratios, mx, rmx, drift, schur_parameters_valid(p, alpha, t, s))
