"""Pure numpy implementations of the hot reduction kernels.

These mirror ``_ckernels.pyx`` one-to-one and are used when the compiled
extension is unavailable or ``BERGMAN_LAB_BACKEND=python`` is set.  Every
output element is an independent reduction, so results do not depend on how
work is split.
"""

import numpy as np

# elements per temporary block in the broadcast kernels
_BLOCK = 1 << 21


def disk_sums(cx, cy, rad, px, py, pmod, pw, nthreads=1):
    """Sum of point weights falling strictly inside each Euclidean disk.

    ``pmod`` must be sorted ascending (points ordered by modulus); it is used
    to restrict each disk to the band of moduli it can touch.
    """
    cx = np.asarray(cx, dtype=float)
    cy = np.asarray(cy, dtype=float)
    rad = np.asarray(rad, dtype=float)
    out = np.zeros(cx.shape[0])
    if pmod.shape[0] == 0:
        return out
    cmod = np.hypot(cx, cy)
    lo = np.searchsorted(pmod, cmod - rad, side="left")
    hi = np.searchsorted(pmod, cmod + rad, side="right")
    for i in range(cx.shape[0]):
        a, b = lo[i], hi[i]
        if a >= b:
            continue
        dx = px[a:b] - cx[i]
        dy = py[a:b] - cy[i]
        inside = dx * dx + dy * dy < rad[i] * rad[i]
        out[i] = pw[a:b][inside].sum()
    return out


def kernel_sums(zx, zy, px, py, pw, expo, nthreads=1):
    """``out[i] = sum_j pw[j] * |1 - conj(p_j) z_i|**(-expo)``."""
    zx = np.asarray(zx, dtype=float)
    zy = np.asarray(zy, dtype=float)
    n = max(px.shape[0], 1)
    step = max(1, _BLOCK // n)
    out = np.empty(zx.shape[0])
    for s in range(0, zx.shape[0], step):
        ax = zx[s:s + step, None]
        ay = zy[s:s + step, None]
        re = 1.0 - (px[None, :] * ax + py[None, :] * ay)
        im = px[None, :] * ay - py[None, :] * ax
        d2 = re * re + im * im
        out[s:s + step] = (pw[None, :] * d2 ** (-0.5 * expo)).sum(axis=1)
    return out


def cover_counts(sx, sy, cx, cy, rad, nthreads=1):
    """Number of disks strictly containing each sample point."""
    sx = np.asarray(sx, dtype=float)
    sy = np.asarray(sy, dtype=float)
    n = max(cx.shape[0], 1)
    step = max(1, _BLOCK // n)
    r2 = rad * rad
    out = np.empty(sx.shape[0], dtype=np.int64)
    for s in range(0, sx.shape[0], step):
        dx = sx[s:s + step, None] - cx[None, :]
        dy = sy[s:s + step, None] - cy[None, :]
        out[s:s + step] = (dx * dx + dy * dy < r2[None, :]).sum(axis=1)
    return out
