"""Selection of the hot-kernel implementation.

The compiled extension is used when it imports; otherwise the numpy
fallback is used.  ``BERGMAN_LAB_BACKEND=python`` forces the fallback and
``BERGMAN_LAB_THREADS`` caps the worker count of the compiled kernels.
"""

import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on build
    _ckernels = None

_forced = os.environ.get("BERGMAN_LAB_BACKEND", "").strip().lower()

if _ckernels is not None and _forced != "python":
    _impl = _ckernels
    NAME = "cython"
else:
    _impl = _pykernels
    NAME = "python"

HAVE_COMPILED = _ckernels is not None


def thread_count():
    env = os.environ.get("BERGMAN_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


class PointCloud:
    """Weighted points in the disk, pre-sorted by modulus for band pruning."""

    __slots__ = ("x", "y", "mod", "w")

    def __init__(self, points, weights):
        points = np.asarray(points, dtype=complex).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        mod = np.abs(points)
        order = np.argsort(mod, kind="stable")
        self.x = _f64(points.real[order])
        self.y = _f64(points.imag[order])
        self.mod = _f64(mod[order])
        self.w = _f64(weights[order])

    def __len__(self):
        return self.x.shape[0]

    @property
    def points(self):
        return self.x + 1j * self.y

    def scaled(self, c):
        out = PointCloud.__new__(PointCloud)
        out.x, out.y, out.mod = self.x, self.y, self.mod
        out.w = self.w * c
        return out


def disk_sums(centers, radii, cloud, impl=None):
    """Cloud weight inside each open Euclidean disk ``|p - c| < r``."""
    impl = impl or _impl
    centers = np.asarray(centers, dtype=complex).ravel()
    radii = _f64(np.broadcast_to(np.asarray(radii, dtype=float), centers.shape))
    return impl.disk_sums(_f64(centers.real), _f64(centers.imag), radii,
                          cloud.x, cloud.y, cloud.mod, cloud.w, thread_count())


def kernel_sums(probes, cloud, expo, impl=None):
    """``sum_j w_j |1 - conj(p_j) z|**(-expo)`` for every probe ``z``."""
    impl = impl or _impl
    probes = np.asarray(probes, dtype=complex).ravel()
    return impl.kernel_sums(_f64(probes.real), _f64(probes.imag),
                            cloud.x, cloud.y, cloud.w, float(expo), thread_count())


def cover_counts(samples, centers, radii, impl=None):
    """How many open disks contain each sample."""
    impl = impl or _impl
    samples = np.asarray(samples, dtype=complex).ravel()
    centers = np.asarray(centers, dtype=complex).ravel()
    radii = _f64(np.broadcast_to(np.asarray(radii, dtype=float), centers.shape))
    return impl.cover_counts(_f64(samples.real), _f64(samples.imag),
                             _f64(centers.real), _f64(centers.imag), radii,
                             thread_count())
