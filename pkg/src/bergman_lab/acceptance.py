"""The acceptance suite: eleven end-to-end numerical criteria.

Each ``criterion_*`` function runs one criterion at its stated tolerance and
returns a :class:`CriterionResult`.  ``selftest`` in the CLI and the test
suite both call these functions.
"""

from dataclasses import dataclass
import math
import time

import numpy as np

from .carleson import CarlesonParams, carleson_check, schur_boundedness_check, schur_operator_apply
from .carleson import vanishing_profile
from .compop import (CompOpSpec, apply_operator, expr_map, identity_map, power_diagnostic,
                     scale_map)
from .config import boundary_atoms
from .geometry import covering_multiplicity, make_lattice
from .kernels import kernel_norm, kernel_norm_estimate
from .measure import (DEFAULT_QUADRATURE, DensityMeasure, PullbackMeasure, atomic, integrate,
                      lebesgue, monte_carlo_integrate, truncated, weighted_area)
from .transforms import averaging, berezin_t
from .weights import make_standard_weight


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number, name, func):
    t0 = time.perf_counter()
    passed, detail = func()
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)


def _probes(count, r_max, seed=0):
    """``count`` probes with moduli spread up to ``r_max`` (the last exactly ``r_max``)."""
    rng = np.random.default_rng(seed)
    radii = r_max * np.sqrt(np.linspace(0.0, 1.0, count))
    return radii * np.exp(2j * math.pi * rng.random(count))


# --------------------------------------------------------------------------

def criterion_1():
    """Reproducing identity for the Berezin transform of ``dA_alpha``."""
    def run():
        t0 = time.perf_counter()
        z = _probes(20, 0.99, seed=1)
        worst = 0.0
        for alpha in (0.0, 1.0, 2.0):
            m = weighted_area(make_standard_weight(alpha))
            worst = max(worst, float(np.max(np.abs(berezin_t(m, 2.0, alpha, z) - 1.0))))
        elapsed = time.perf_counter() - t0
        return worst <= 1e-4 and elapsed < 60.0, f"max |B - 1| = {worst:.3e} (tol 1e-4), {elapsed:.1f}s"
    return _timed(1, "reproducing identity", run)


def criterion_2():
    """Averaging function of Lebesgue measure is identically 1."""
    def run():
        z = _probes(40, 0.999, seed=2)
        m = lebesgue()
        worst = max(float(np.max(np.abs(averaging(m, r, z) - 1.0))) for r in (0.3, 0.5, 0.7))
        return worst <= 1e-6, f"max |avg - 1| = {worst:.3e} (tol 1e-6)"
    return _timed(2, "averaging identity", run)


def criterion_3():
    """Covering audit of the ``(0.5, 0.999)`` lattice."""
    def run():
        lat = make_lattice(0.5, 0.999, audit_samples=100_000)
        lo, hi = covering_multiplicity(lat, 100_000)
        ok = lo >= 1 and lat.multiplicity_bound <= 64
        return ok, (f"{lat.nodes.size} nodes, min covering {lo}, max {hi}, "
                    f"recorded M = {lat.multiplicity_bound} (need min >= 1, M <= 64)")
    return _timed(3, "lattice covering", run)


def criterion_4():
    """True kernel norm against the closed-form size estimate."""
    def run():
        w = make_standard_weight(0.0)
        z = np.array([0.0, 0.5, 0.9, 0.99, 0.999])
        ratio = kernel_norm(0.0, 2.0, w, z) / kernel_norm_estimate(0.0, 2.0, w, z)
        band = float(ratio.max() / ratio.min())
        exact = float(np.max(np.abs(ratio - 1.0)))
        ok = band < 10.0 and exact < 1e-6
        return ok, f"band ratio {band:.6f} (< 10), max |ratio - 1| = {exact:.2e} (exact case, tol 1e-6)"
    return _timed(4, "kernel-norm band", run)


def equivalence_panel():
    """The eight measures of the ``p <= q`` equivalence panel."""
    lat = make_lattice(0.6, 0.99, audit_samples=1000)
    nodes = lat.nodes
    rng = np.random.default_rng(5)
    few = 0.85 * np.sqrt(rng.random(12)) * np.exp(2j * math.pi * rng.random(12))
    return [
        ("lebesgue", lebesgue()),
        ("dA_1", weighted_area(make_standard_weight(1.0))),
        ("dA_2", weighted_area(make_standard_weight(2.0))),
        ("lattice atoms", atomic(nodes, (1.0 - np.abs(nodes) ** 2) ** 2, "lattice atoms")),
        ("interior atoms", atomic(few, 0.1 + rng.random(12), "interior atoms")),
        ("disk |z|<0.5", truncated(lebesgue(), 0.5)),
        ("|1+z|^2 on |z|<0.6",
         DensityMeasure(lambda z: np.where(np.abs(z) < 0.6, np.abs(1.0 + z) ** 2, 0.0),
                        False, "|1+z|^2 on |z|<0.6", 0.6)),
        ("pullback psi=1/2 phi=z/2",
         PullbackMeasure(lebesgue(), lambda z: np.full(np.shape(z), 0.5 + 0j),
                         lambda z: 0.5 * np.asarray(z), 1, 2.0)),
    ]


def _band_ok(report, band):
    v = report.values()
    pairs = [("berezin", "averaging"), ("averaging", "lattice"), ("probe", "averaging")]
    ratios = [v[a] / v[b] for a, b in pairs]
    in_band = all(1.0 / band <= r <= band for r in ratios)
    drift = max(report.errors[k] / v[k] for k in v if v[k] > 0)
    return in_band, drift, ratios


def criterion_5():
    """Equivalence surrogate for the four ``p <= q`` quantities."""
    def run():
        t0 = time.perf_counter()
        params = CarlesonParams(2.0, 2.0)
        failures = []
        worst_ratio, worst_drift = 1.0, 0.0
        for name, m in equivalence_panel():
            rep = carleson_check(m, params)
            in_band, drift, ratios = _band_ok(rep, 50.0)
            worst_ratio = max([worst_ratio] + [max(r, 1.0 / r) for r in ratios])
            worst_drift = max(worst_drift, drift)
            if not in_band or not drift < 0.10:
                failures.append(name)
        elapsed = time.perf_counter() - t0
        ok = not failures and elapsed < 600.0
        detail = (f"worst pairwise ratio {worst_ratio:.3g} (band 50), worst refinement drift "
                  f"{worst_drift:.2e} (< 0.1), {elapsed:.0f}s")
        if failures:
            detail += f"; failing: {', '.join(failures)}"
        return ok, detail
    return _timed(5, "p<=q equivalence panel", run)


def criterion_6():
    """The ``q < p`` regime on Lebesgue measure and a divergent atom family."""
    def run():
        params = CarlesonParams(2.0, 1.0)
        rep = carleson_check(lebesgue(), params)
        err = abs(rep.Q_averaging - 1.0)
        bad = carleson_check(boundary_atoms(40, 2.0, 1.0, 0.0), params)
        ok = err <= 1e-3 and rep.verdict == "carleson" and bad.verdict == "not_carleson"
        return ok, (f"||M_R||_2 = {rep.Q_averaging:.9f} (1 +- 1e-3), verdict {rep.verdict}; "
                    f"boundary atoms verdict {bad.verdict}")
    return _timed(6, "q<p regime", run)


def criterion_7():
    """Vanishing profiles of a compactly supported measure and of Lebesgue."""
    def run():
        params = CarlesonParams(2.0, 2.0)
        comp = vanishing_profile(truncated(lebesgue(), 0.5), params)
        flat = vanishing_profile(lebesgue(), params)
        spread = float(flat.shell_sups.max() / flat.shell_sups.min())
        ok = comp.shell_sups[-1] == 0.0 and comp.vanishing and not flat.decaying and spread < 1.01
        return ok, (f"compact tail sup = {float(comp.shell_sups[-1])!r}, lebesgue shells within "
                    f"factor {spread:.6f}, decaying={flat.decaying}")
    return _timed(7, "vanishing dichotomy", run)


def criterion_8():
    """Power diagnostics for three operators."""
    def run():
        ident = power_diagnostic(CompOpSpec(1.0, identity_map(), 2.0))
        grow = power_diagnostic(CompOpSpec(2.0, identity_map(), 2.0))
        contr = power_diagnostic(CompOpSpec(0.5, scale_map(0.5), 2.0))
        scaling = 0.0
        for col in (grow.Q2, grow.Q3, grow.Q4):
            for i, n in enumerate(grow.n_values):
                if n <= 8:
                    scaling = max(scaling, abs(col[i] / (col[0] * 4.0 ** (n - 1)) - 1.0))
        q3 = [v for n, v in zip(contr.n_values, contr.Q3) if n >= 2]
        monotone = all(b < a for a, b in zip(q3, q3[1:]))
        ok = (ident.verdict == "power_bounded" and grow.verdict == "not_power_bounded"
              and scaling <= 0.05 and contr.verdict == "power_bounded"
              and contr.compactness == "power_compact_evidence" and monotone)
        return ok, (f"identity {ident.verdict}; psi=2 {grow.verdict}, max deviation from 4^n "
                    f"{scaling:.2e} (<= 0.05); contraction {contr.verdict}/{contr.compactness}, "
                    f"Q3 decreasing for n >= 2: {monotone}")
    return _timed(8, "power dynamics", run)


CROSS_PATH_FUNCTIONS = ("1", "z", "z^2 + 1", "exp(z)", "kernel(0; 0.5)")


def criterion_9():
    """Direct operator norms against pullback-measure integrals."""
    def run():
        spec = CompOpSpec("0.5 + 0.25*z", expr_map("0.5*z + 0.2"), 2.0)
        worst = 0.0
        failures = 0
        for f in CROSS_PATH_FUNCTIONS:
            for n in (1, 2, 3):
                app = apply_operator(spec, n, f)
                bound = app.direct.error + app.pullback.error
                worst = max(worst, app.discrepancy / bound if bound > 0 else math.inf)
                failures += not app.agrees
        return failures == 0, f"{15 - failures}/15 agree, worst discrepancy/bound {worst:.3f}"
    return _timed(9, "cross-path identity", run)


def oracle_panel():
    """Ten ``(label, measure, integrand)`` triples for the Monte Carlo comparison."""
    leb = lebesgue()
    da1 = weighted_area(make_standard_weight(1.0))

    def kpow(a, t, alpha=0.0):
        e = (alpha + 2.0) * t
        return lambda w: (1.0 - abs(a) ** 2) ** (0.5 * e) * np.abs(1.0 - np.conj(w) * a) ** (-e)

    return [
        ("1", leb, lambda w: np.ones(np.shape(w))),
        ("|z|^2", leb, lambda w: np.abs(w) ** 2),
        ("|z|^6", leb, lambda w: np.abs(w) ** 6),
        ("Re(z)^2", leb, lambda w: np.real(w) ** 2),
        ("|1+z|^2", leb, lambda w: np.abs(1.0 + w) ** 2),
        ("exp(-|z|^2)", da1, lambda w: np.exp(-np.abs(w) ** 2)),
        ("|k_0.9|^1", leb, kpow(0.9, 1.0)),
        ("|k_0.9i|^0.5 dA_1", da1, kpow(0.9j, 0.5, 1.0)),
        ("|k_0.9|^0.75", leb, kpow(0.9, 0.75)),
        ("|k_-0.5|^2", leb, kpow(-0.5, 2.0)),
    ]


def criterion_10():
    """Deterministic quadrature against Monte Carlo with 10^5 samples."""
    def run():
        seed = DEFAULT_QUADRATURE.seed
        worst = 0.0
        bad = []
        for k, (label, m, f) in enumerate(oracle_panel()):
            quad = integrate(m, f)
            mc = monte_carlo_integrate(m, f, 100_000, seed=seed + k)
            z = abs(float(quad) - float(mc.value)) / (mc.error + quad.error)
            worst = max(worst, z)
            if z > 3.0:
                bad.append(label)
        detail = f"worst |quad - mc| = {worst:.2f} standard errors (<= 3)"
        if bad:
            detail += f"; failing: {', '.join(bad)}"
        return not bad, detail
    return _timed(10, "Monte Carlo oracle", run)


def schur_panel(count=20, degree=4, seed=11):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        c = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
        out.append(lambda z, c=c: np.polyval(c, z))
    return out


def criterion_11():
    """Schur-type operator: stable norm ratios and a closed-form value."""
    def run():
        chk = schur_boundedness_check(schur_panel(), 2.0, 0.0, 2.0, 0.0)
        one = schur_operator_apply(lambda z: np.ones(np.shape(z)), 2.0, 0.0, 0.0,
                                   make_standard_weight(0.0), 0.0)
        err = abs(one - 1.0 / 3.0)
        ok = chk.stable and chk.parameters_valid and err <= 1e-4
        return ok, (f"max ||Tf||/||f|| = {chk.max_ratio:.6f}, refinement drift {chk.drift:.2e} "
                    f"(< 0.1); T1(0) - 1/3 = {err:.2e} (tol 1e-4)")
    return _timed(11, "Schur boundedness", run)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11)

# criteria cheap enough for ``selftest fast``
FAST = (criterion_1, criterion_2, criterion_4, criterion_6, criterion_7)


def run_all(level="full", echo=None):
    """Run the suite; ``echo`` receives each result line as it completes."""
    chosen = CRITERIA if level == "full" else FAST
    results = []
    for crit in chosen:
        res = crit()
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
