"""Quadrature rules on the unit disk.

Three families are used:

* the global polar grid: Gauss-Legendre radial panels whose edges accumulate
  geometrically toward ``boundary_cutoff``, one extra panel on
  ``[cutoff, 1)`` and a uniform trapezoid rule in angle (a variant for
  compactly supported densities ends its panels at the support radius);
* centered rules: the same construction on a unit disk that callers map
  onto a Euclidean disk (affinely) or onto the whole disk through a Mobius
  map centered at a probe;
* the hyperbolic cell cloud: one node per cell of pseudohyperbolic size
  ``cell_size``, used to discretize measures before pushing them forward.

All weights are with respect to normalized area ``dA = dx dy / pi``.
"""

from dataclasses import dataclass, replace
from functools import lru_cache
import math

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class QuadratureSpec:
    radial_shells: int = 256
    angular_nodes: int = 256
    boundary_cutoff: float = 0.9995
    seed: int = 42
    gauss_order: int = 4
    # probe-centered rules
    local_shells: int = 32
    local_angular: int = 64
    disk_panels: int = 4
    disk_angular: int = 32
    # grid for L^p norms of derived functions
    norm_shells: int = 32
    norm_angular: int = 32
    # pushforward cloud
    cell_size: float = 0.08
    cloud_cutoff: float = 0.995

    def __post_init__(self):
        if self.radial_shells < 4:
            raise ParameterError("radial_shells must be >= 4")
        if self.angular_nodes < 8:
            raise ParameterError("angular_nodes must be >= 8")
        if not 0.0 < self.boundary_cutoff < 1.0:
            raise ParameterError("boundary_cutoff must be in (0, 1)")
        if not 0.0 < self.cloud_cutoff < 1.0:
            raise ParameterError("cloud_cutoff must be in (0, 1)")
        if not 0.0 < self.cell_size < 0.5:
            raise ParameterError("cell_size must be in (0, 0.5)")
        if self.gauss_order < 1:
            raise ParameterError("gauss_order must be >= 1")
        for name in ("local_shells", "disk_panels", "norm_shells"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1")
        for name in ("local_angular", "disk_angular", "norm_angular"):
            if getattr(self, name) < 4:
                raise ParameterError(f"{name} must be >= 4")

    def refined(self):
        """Double the resolution of every rule."""
        return replace(
            self,
            radial_shells=2 * self.radial_shells, angular_nodes=2 * self.angular_nodes,
            local_shells=2 * self.local_shells, local_angular=2 * self.local_angular,
            disk_panels=2 * self.disk_panels, disk_angular=2 * self.disk_angular,
            norm_shells=2 * self.norm_shells, norm_angular=2 * self.norm_angular,
            cell_size=0.5 * self.cell_size)

    def coarsened(self):
        """Half resolution of the global grid (used for error estimates)."""
        return replace(self, radial_shells=max(4, self.radial_shells // 2),
                       angular_nodes=max(8, self.angular_nodes // 2))


@lru_cache(maxsize=None)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_nodes(edges, order):
    x, w = gauss_legendre(order)
    a = np.asarray(edges[:-1])[:, None]
    b = np.asarray(edges[1:])[:, None]
    half = 0.5 * (b - a)
    r = (a + half * (1.0 + x[None, :])).ravel()
    wr = (half * w[None, :]).ravel()
    return r, wr


def geometric_edges(shells, cutoff):
    """Panel edges ``1 - (1 - cutoff)**(j/shells)``, from 0 to ``cutoff``."""
    j = np.arange(shells + 1) / shells
    edges = 1.0 - (1.0 - cutoff) ** j
    edges[0] = 0.0
    edges[-1] = cutoff
    return edges


@dataclass(frozen=True)
class PolarRule:
    """Tensor rule: ``sum_ij wr[i] * 2 r[i] / n * f(r[i] e^{i theta_j})``."""

    r: np.ndarray
    wr: np.ndarray
    n_angular: int

    @property
    def theta(self):
        return 2.0 * math.pi * (np.arange(self.n_angular) + 0.5) / self.n_angular

    @property
    def nodes(self):
        return (self.r[:, None] * np.exp(1j * self.theta)[None, :]).ravel()

    @property
    def weights(self):
        w = self.wr * 2.0 * self.r / self.n_angular
        return np.repeat(w, self.n_angular)

    @property
    def radial_weights(self):
        """Weights for integrands depending on ``|z|`` only."""
        return self.wr * 2.0 * self.r


@lru_cache(maxsize=64)
def _geometric_rule(shells, angular, cutoff, order):
    r, wr = _panel_nodes(geometric_edges(shells, cutoff), order)
    return PolarRule(r, wr, angular)


@lru_cache(maxsize=64)
def _tail_rule(angular, cutoff, order):
    r, wr = _panel_nodes(np.array([cutoff, 1.0]), order)
    return PolarRule(r, wr, angular)


@lru_cache(maxsize=64)
def _uniform_rule(panels, angular, order):
    r, wr = _panel_nodes(np.linspace(0.0, 1.0, panels + 1), order)
    return PolarRule(r, wr, angular)


def global_rule(q):
    """``(body, tail)`` rules covering ``|z| < cutoff`` and ``cutoff <= |z| < 1``."""
    body = _geometric_rule(q.radial_shells, q.angular_nodes, q.boundary_cutoff, q.gauss_order)
    tail = _tail_rule(q.angular_nodes, q.boundary_cutoff, q.gauss_order)
    return body, tail


def outer_shell_radius(q):
    return float(_geometric_rule(q.radial_shells, q.angular_nodes, q.boundary_cutoff,
                                 q.gauss_order).r[-1])


def mobius_rule(q):
    """Whole-disk rule in the variable ``u`` for probe-centered integrals."""
    body = _geometric_rule(q.local_shells, q.local_angular, q.boundary_cutoff, q.gauss_order)
    tail = _tail_rule(q.local_angular, q.boundary_cutoff, q.gauss_order)
    r = np.concatenate([body.r, tail.r])
    wr = np.concatenate([body.wr, tail.wr])
    return PolarRule(r, wr, q.local_angular)


def disk_rule(q):
    """Rule on the closed unit disk with uniform radial panels (for affine maps)."""
    return _uniform_rule(q.disk_panels, q.disk_angular, q.gauss_order)


@lru_cache(maxsize=64)
def _support_rule(shells, angular, radius, order):
    r, wr = _panel_nodes(np.linspace(0.0, radius, shells + 1), order)
    return PolarRule(r, wr, angular)


def support_rule(q, radius):
    """Rule on ``|z| < radius`` with uniform panels ending exactly at ``radius``."""
    return _support_rule(max(4, q.radial_shells // 4), q.angular_nodes, float(radius),
                         q.gauss_order)


def norm_rule(q):
    """Coarse whole-disk rule for L^p norms of expensive derived functions."""
    body = _geometric_rule(q.norm_shells, q.norm_angular, q.boundary_cutoff, q.gauss_order)
    tail = _tail_rule(q.norm_angular, q.boundary_cutoff, q.gauss_order)
    return PolarRule(np.concatenate([body.r, tail.r]), np.concatenate([body.wr, tail.wr]),
                     q.norm_angular)


@lru_cache(maxsize=16)
def hyperbolic_cells(cell_size, cutoff):
    """Cell centers and exact cell areas of a pseudohyperbolically uniform partition.

    Ring edges are ``tanh(j * atanh(cell_size))`` up to the first edge beyond
    ``cutoff``; a final ring extends to 1.  Each ring is split into sectors of
    pseudohyperbolic width about ``cell_size``.
    """
    step = math.atanh(cell_size)
    edges = [0.0]
    j = 0
    while edges[-1] < cutoff:
        j += 1
        edges.append(math.tanh(j * step))
    edges.append(1.0)
    centers = []
    areas = []
    counts = []
    for a, b in zip(edges[:-1], edges[1:]):
        mid = math.sqrt(0.5 * (a * a + b * b))
        ref = min(mid, edges[-2]) if b == 1.0 else mid
        n = max(4, math.ceil(2.0 * math.pi * ref / (cell_size * (1.0 - ref * ref))))
        counts.append(n)
        theta = 2.0 * math.pi * (np.arange(n) + 0.5 * (len(counts) % 2)) / n
        centers.append(mid * np.exp(1j * theta))
        areas.append(np.full(n, (b * b - a * a) / n))
    pts = np.concatenate(centers)
    wts = np.concatenate(areas)
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts
