# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
from cython.parallel import prange
from libc.math cimport sqrt, pow


cdef Py_ssize_t _lower_bound(const double[::1] a, double x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = a.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef double _disk_sum_one(double cx, double cy, double r,
                          const double[::1] px, const double[::1] py,
                          const double[::1] pmod, const double[::1] pw) noexcept nogil:
    cdef double c = sqrt(cx * cx + cy * cy)
    cdef double hi = c + r
    cdef double r2 = r * r
    cdef double acc = 0.0
    cdef double dx, dy
    cdef Py_ssize_t j = _lower_bound(pmod, c - r)
    cdef Py_ssize_t n = pmod.shape[0]
    while j < n and pmod[j] <= hi:
        dx = px[j] - cx
        dy = py[j] - cy
        if dx * dx + dy * dy < r2:
            acc = acc + pw[j]
        j = j + 1
    return acc


def disk_sums(const double[::1] cx, const double[::1] cy, const double[::1] rad,
              const double[::1] px, const double[::1] py,
              const double[::1] pmod, const double[::1] pw, int nthreads=1):
    cdef Py_ssize_t m = cx.shape[0], i
    out = np.zeros(m)
    cdef double[::1] o = out
    for i in prange(m, nogil=True, num_threads=nthreads, schedule="static"):
        o[i] = _disk_sum_one(cx[i], cy[i], rad[i], px, py, pmod, pw)
    return out


cdef inline double _ipow(double x, long n) noexcept nogil:
    cdef double r = 1.0
    while n > 0:
        if n & 1:
            r = r * x
        x = x * x
        n = n >> 1
    return r


cdef double _kernel_sum_one(double zx, double zy, const double[::1] px,
                            const double[::1] py, const double[::1] pw,
                            double half) noexcept nogil:
    # half = -expo/2; integer and half-integer exponents avoid pow()
    cdef double acc = 0.0
    cdef double re, im, d2, inv
    cdef Py_ssize_t j
    cdef long twice = <long>(-2.0 * half)
    cdef bint exact = (<double>twice == -2.0 * half) and twice >= 0
    cdef long whole = twice >> 1
    cdef bint odd = twice & 1
    for j in range(px.shape[0]):
        re = 1.0 - (px[j] * zx + py[j] * zy)
        im = px[j] * zy - py[j] * zx
        d2 = re * re + im * im
        if exact:
            inv = 1.0 / d2
            if odd:
                acc = acc + pw[j] * _ipow(inv, whole) * sqrt(inv)
            else:
                acc = acc + pw[j] * _ipow(inv, whole)
        else:
            acc = acc + pw[j] * pow(d2, half)
    return acc


def kernel_sums(const double[::1] zx, const double[::1] zy,
                const double[::1] px, const double[::1] py,
                const double[::1] pw, double expo, int nthreads=1):
    cdef Py_ssize_t m = zx.shape[0], i
    cdef double half = -0.5 * expo
    out = np.empty(m)
    cdef double[::1] o = out
    for i in prange(m, nogil=True, num_threads=nthreads, schedule="static"):
        o[i] = _kernel_sum_one(zx[i], zy[i], px, py, pw, half)
    return out


cdef long _cover_one(double sx, double sy, const double[::1] cx,
                     const double[::1] cy, const double[::1] rad) noexcept nogil:
    cdef long count = 0
    cdef double dx, dy
    cdef Py_ssize_t k
    for k in range(cx.shape[0]):
        dx = sx - cx[k]
        dy = sy - cy[k]
        if dx * dx + dy * dy < rad[k] * rad[k]:
            count = count + 1
    return count


def cover_counts(const double[::1] sx, const double[::1] sy,
                 const double[::1] cx, const double[::1] cy,
                 const double[::1] rad, int nthreads=1):
    cdef Py_ssize_t m = sx.shape[0], i
    out = np.empty(m, dtype=np.int64)
    cdef long long[::1] o = out
    for i in prange(m, nogil=True, num_threads=nthreads, schedule="static"):
        o[i] = _cover_one(sx[i], sy[i], cx, cy, rad)
    return out
