"""Radial weights on the disk and their admissibility checks."""

from dataclasses import dataclass
import math
from typing import Callable, Optional

import numpy as np

from .errors import AdmissibilityError, ParameterError

# relative slack for monotonicity comparisons on the validation grid
_MONO_RTOL = 1e-12


@dataclass(frozen=True)
class Violation:
    kind: str  # "positivity", "non_increasing" or "growth"
    r_left: float
    r_right: float
    value_left: float
    value_right: float

    def __str__(self):
        return (f"{self.kind} violated between r={self.r_left:.6g} "
                f"({self.value_left:.6g}) and r={self.r_right:.6g} ({self.value_right:.6g})")


@dataclass(frozen=True)
class Certificate:
    delta: float
    grid_size: int
    r_max: float
    violation: Optional[Violation] = None

    @property
    def ok(self):
        return self.violation is None

    def __bool__(self):
        return self.ok


def validation_grid(grid_size, depth=10):
    """Grid on ``[0, 1)`` refined geometrically toward 1 (``1 - r`` down to ``10**-depth``)."""
    if grid_size < 2:
        raise ParameterError("grid_size must be at least 2")
    return 1.0 - np.logspace(0.0, -depth, grid_size)


def validate_admissible(profile, delta, grid_size=10_000):
    """Check positivity and both monotonicity conditions on a grid.

    ``profile`` must be non-increasing and ``profile(r) * (1 - r)**-(1 + delta)``
    non-decreasing.  Returns a :class:`Certificate`; its ``violation`` names
    the first failing adjacent pair.
    """
    if not delta > 0:
        raise ParameterError("delta must be positive")
    r = validation_grid(grid_size)
    v = np.asarray(profile(r), dtype=float) * np.ones_like(r)
    bad = np.flatnonzero(~(v > 0) | ~np.isfinite(v))
    if bad.size:
        i = bad[0]
        j = max(i - 1, 0)
        return Certificate(delta, grid_size, r[-1], Violation("positivity", r[j], r[i], v[j], v[i]))
    up = np.flatnonzero(v[1:] > v[:-1] * (1.0 + _MONO_RTOL))
    if up.size:
        i = up[0]
        return Certificate(delta, grid_size, r[-1],
                           Violation("non_increasing", r[i], r[i + 1], v[i], v[i + 1]))
    # compare in log form; (1 - r) is exact on this grid
    g = np.log(v) - (1.0 + delta) * np.log1p(-r)
    down = np.flatnonzero(g[1:] < g[:-1] - _MONO_RTOL * np.maximum(1.0, np.abs(g[:-1])))
    if down.size:
        i = down[0]
        return Certificate(delta, grid_size, r[-1],
                           Violation("growth", r[i], r[i + 1], math.exp(g[i]), math.exp(g[i + 1])))
    return Certificate(delta, grid_size, r[-1])


@dataclass(frozen=True)
class AdmissibleWeight:
    """A radial weight ``sigma(z) = normalization * profile(|z|)``.

    ``alpha`` is set for the standard family and ``None`` for custom profiles.
    """

    profile: Callable
    delta: float
    kind: str = "custom"
    alpha: Optional[float] = None
    normalization: float = 1.0
    label: str = ""

    def __call__(self, z):
        return eval_weight(self, z)

    def radial(self, r):
        return self.normalization * np.asarray(self.profile(np.asarray(r, dtype=float)), dtype=float)

    @property
    def is_constant(self):
        return self.kind == "standard" and self.alpha == 0.0

    def __str__(self):
        return self.label or (f"standard(alpha={self.alpha})" if self.kind == "standard" else "custom")


def eval_weight(w, z):
    r = np.abs(np.asarray(z, dtype=complex))
    out = w.radial(r) * np.ones_like(r)
    return out[()] if out.ndim == 0 else out


def _standard_profile(alpha):
    a1 = alpha + 1.0

    def profile(r):
        r = np.asarray(r, dtype=float)
        return a1 * ((1.0 - r) * (1.0 + r)) ** alpha

    return profile


def make_standard_weight(alpha):
    """``(alpha + 1)(1 - r**2)**alpha``, normalized so ``sigma dA`` has unit mass."""
    alpha = float(alpha)
    if alpha < 0.0:
        raise AdmissibilityError(
            f"standard weight with alpha={alpha} < 0 is increasing in r, hence not admissible")
    delta = max(alpha - 1.0, 1e-3)
    return AdmissibleWeight(_standard_profile(alpha), delta, "standard", alpha, 1.0,
                            f"standard(alpha={alpha:g})")


def make_custom_weight(profile, delta, grid_size=10_000, label="custom", normalization=1.0):
    """Wrap a radial profile after validating admissibility."""
    if normalization <= 0:
        raise ParameterError("normalization must be positive")
    cert = validate_admissible(profile, delta, grid_size)
    if not cert.ok:
        raise AdmissibilityError(f"profile is not admissible: {cert.violation}")
    return AdmissibleWeight(profile, float(delta), "custom", None, float(normalization), label)


def beta_mass(alpha):
    """Closed form of ``int_D (1 - |z|^2)^alpha dA = 1/(alpha + 1)``."""
    return 1.0 / (alpha + 1.0)
