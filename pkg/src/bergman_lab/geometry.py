"""Pseudohyperbolic geometry of the unit disk.

Points are plain Python/numpy complex numbers; every function accepts
scalars or arrays.  :class:`DiskPoint` exists for callers that want the
``|z| < 1`` invariant enforced at construction.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import backend
from .errors import ConstructionError, ParameterError

#: width of the exclusion band used when comparing membership predicates
BOUNDARY_EXCLUSION = 1e-10


@dataclass(frozen=True)
class DiskPoint:
    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ParameterError("disk point must be finite")
        if self.re * self.re + self.im * self.im >= 1.0:
            raise ParameterError(f"point {complex(self.re, self.im)} is not in the open unit disk")

    @classmethod
    def of(cls, z):
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self):
        return complex(self.re, self.im)


def as_disk_array(z, name="z"):
    """Coerce to a complex array and check it lies in the open disk."""
    arr = np.asarray(z, dtype=complex)
    if arr.size and not np.all(np.abs(arr) < 1.0):
        raise ParameterError(f"{name} must lie in the open unit disk")
    return arr


def mobius(a, z):
    """The involutive automorphism ``(a - z) / (1 - conj(a) z)``."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    out = (a - z) / (1.0 - np.conj(a) * z)
    return out[()] if out.ndim == 0 else out


def rho(a, z):
    """Pseudohyperbolic distance ``|mobius(a, z)|``."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    # |1 - conj(a) z| = |1 - conj(z) a|, so the formula is symmetric as written
    out = np.abs(a - z) / np.abs(1.0 - np.conj(a) * z)
    return out[()] if out.ndim == 0 else out


def one_minus_abs2(z):
    """``1 - |z|**2`` computed as ``(1-|z|)(1+|z|)`` to limit cancellation."""
    m = np.abs(z)
    return (1.0 - m) * (1.0 + m)


@dataclass(frozen=True)
class PseudoDisk:
    """The pseudohyperbolic disk ``E(a, r)`` with its Euclidean parameters."""

    center_hyp: complex
    radius_hyp: float
    center_euc: complex
    radius_euc: float
    area: float

    def contains(self, z):
        """Euclidean membership test (open disk)."""
        return np.abs(np.asarray(z, dtype=complex) - self.center_euc) < self.radius_euc


def pseudo_disk(a, r):
    """Return ``E(a, r)``; area is normalized so the unit disk has area 1."""
    if not 0.0 < r < 1.0:
        raise ParameterError(f"pseudohyperbolic radius must be in (0, 1), got {r}")
    a = complex(a)
    if abs(a) >= 1.0:
        raise ParameterError("center must lie in the open unit disk")
    s = abs(a) ** 2
    denom = 1.0 - s * r * r
    center = a * (1.0 - r * r) / denom
    radius = (1.0 - s) * r / denom
    return PseudoDisk(a, float(r), center, radius, radius * radius)


def pseudo_disk_params(a, r):
    """Vectorized Euclidean ``(center, radius)`` of ``E(a, r)`` for arrays ``a``."""
    a = np.asarray(a, dtype=complex)
    s = np.abs(a) ** 2
    denom = 1.0 - s * r * r
    return a * (1.0 - r * r) / denom, one_minus_abs2(a) * r / denom


# --------------------------------------------------------------------------
# r-lattices

@dataclass(frozen=True)
class Ring:
    radius: float
    count: int
    offset: float


@dataclass(frozen=True)
class Lattice:
    """A finite r-lattice.

    ``truncation_radius`` is the radius of the disk over which the covering
    property is audited; ``rings`` is empty for hand-built node sets.
    """

    r: float
    nodes: np.ndarray
    multiplicity_bound: int
    truncation_radius: float
    rings: tuple = field(default=())
    audit_samples: int = 0
    audit_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ParameterError("lattice r must be in (0, 1)")
        if not 0.0 < self.truncation_radius < 1.0:
            raise ParameterError("truncation radius must be in (0, 1)")
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=complex).ravel())

    def __len__(self):
        return self.nodes.shape[0]

    @property
    def cover_radius(self):
        return 0.5 * (1.0 + self.r)


def _ring_count(radius, r):
    """Fewest equally spaced nodes on ``|z| = radius`` with neighbour distance <= r."""
    if radius == 0.0:
        return 1

    def step(d):
        e = complex(math.cos(d), math.sin(d))
        return abs(radius - radius * e) / abs(1.0 - radius * radius * e)

    # step(d) increases on [0, pi]; bisect for the largest admissible angle
    if step(math.pi) <= r:
        return 2
    lo, hi = 0.0, math.pi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if step(mid) <= r:
            lo = mid
        else:
            hi = mid
    n = max(2, math.ceil(2.0 * math.pi / lo))
    while step(2.0 * math.pi / n) > r:
        n += 1
    return n


def lattice_rings(r, truncation_radius):
    """Hyperbolic annuli with pseudohyperbolic gap ``r`` out to ``truncation_radius``."""
    step = math.atanh(r)
    rings = [Ring(0.0, 1, 0.0)]
    j = 0
    while rings[-1].radius < truncation_radius:
        j += 1
        radius = math.tanh(j * step)
        if radius >= 1.0:
            raise ParameterError("truncation radius too close to 1 for double precision")
        n = _ring_count(radius, r)
        # stagger alternate rings by half an angular step
        offset = (math.pi / n) if j % 2 else 0.0
        rings.append(Ring(radius, n, offset))
    return tuple(rings)


def _ring_nodes(rings):
    parts = []
    for ring in rings:
        theta = ring.offset + 2.0 * math.pi * np.arange(ring.count) / ring.count
        parts.append(ring.radius * np.exp(1j * theta))
    return np.concatenate(parts)


def disk_samples(count, radius, seed):
    """Uniform samples (area measure) in ``|z| <= radius``."""
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    v = rng.random(count)
    return radius * np.sqrt(u) * np.exp(2j * math.pi * v)


def make_lattice(r, truncation_radius, audit_samples=100_000, seed=0):
    """Build and audit an r-lattice covering ``|z| <= truncation_radius``.

    Nodes sit on annuli ``tanh(j * atanh(r))`` with angular spacing of
    pseudohyperbolic length at most ``r``.  The covering sum,
    with disks of radius ``(1 + r)/2``, is audited on uniform samples; its
    maximum becomes the recorded multiplicity bound.
    """
    if not 0.0 < r < 1.0:
        raise ParameterError(f"lattice r must be in (0, 1), got {r}")
    if not r <= truncation_radius < 1.0:
        raise ParameterError(
            f"truncation radius must satisfy r <= t < 1, got r={r}, t={truncation_radius}")
    if audit_samples <= 0:
        raise ParameterError("audit_samples must be positive")
    rings = lattice_rings(r, truncation_radius)
    nodes = _ring_nodes(rings)
    provisional = Lattice(r, nodes, 1, truncation_radius, rings)
    lo, hi = covering_multiplicity(provisional, audit_samples, seed)
    if lo < 1:
        raise ConstructionError(f"lattice construction failed its covering audit (min count {lo})")
    return Lattice(r, nodes, int(hi), truncation_radius, rings, audit_samples, seed)


def _structured_counts(lat, samples, radius):
    """Covering counts using the ring structure to prune candidate nodes."""
    counts = np.zeros(samples.shape[0], dtype=np.int64)
    smod = np.abs(samples)
    sang = np.angle(samples)
    order = np.argsort(smod, kind="stable")
    sorted_mod = smod[order]
    for ring in lat.rings:
        if ring.radius == 0.0:
            counts += smod < radius
            continue
        c, rad = pseudo_disk_params(ring.radius, radius)
        c = float(np.real(c))
        lo = np.searchsorted(sorted_mod, c - rad, side="left")
        hi = np.searchsorted(sorted_mod, c + rad, side="right")
        if lo >= hi:
            continue
        idx = order[lo:hi]
        s = samples[idx]
        dtheta = 2.0 * math.pi / ring.count
        half_width = math.asin(min(1.0, rad / c)) if c > rad else math.pi
        span = int(math.ceil(half_width / dtheta)) + 1
        span = min(span, ring.count // 2 + 1)
        if 2 * span + 1 >= ring.count:
            # window covers the whole ring: test every node once
            ks = np.broadcast_to(np.arange(ring.count)[None, :], (idx.shape[0], ring.count))
        else:
            k0 = np.rint((sang[idx] - ring.offset) / dtheta).astype(np.int64)
            ks = np.mod(k0[:, None] + np.arange(-span, span + 1)[None, :], ring.count)
        theta = ring.offset + dtheta * ks
        centers = c * np.exp(1j * theta)
        inside = np.abs(s[:, None] - centers) < rad
        counts[idx] += inside.sum(axis=1)
    return counts


def covering_counts(lat, samples, radius=None):
    """Number of disks ``E(z_k, radius)`` containing each sample.

    Defaults to the multiplicity radius ``(1 + r)/2``.
    """
    radius = lat.cover_radius if radius is None else radius
    samples = np.asarray(samples, dtype=complex).ravel()
    if lat.rings:
        return _structured_counts(lat, samples, radius)
    centers, rads = pseudo_disk_params(lat.nodes, radius)
    return backend.cover_counts(samples, centers, rads)


def covering_multiplicity(lat, samples, seed=None):
    """Min and max of the covering sum over uniform samples in ``|z| <= truncation``."""
    if samples <= 0:
        raise ParameterError("samples must be a positive integer")
    seed = lat.audit_seed if seed is None else seed
    pts = disk_samples(samples, lat.truncation_radius, seed)
    counts = covering_counts(lat, pts)
    return int(counts.min()), int(counts.max())


def node_covering_counts(lat):
    """Covering sum evaluated at each lattice node (used for node tables)."""
    return covering_counts(lat, lat.nodes)
