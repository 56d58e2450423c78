"""NumPy reference implementation of the pair kernels.

Both backends implement the same two primitives over a chunk of point pairs
(x_i, y_i):

* ``pair_power_sums``: accumulate v_i * t_i^z for t_i = |x_i - y_i| and
  v_i = w_x[i] * w_y[i] (optionally times <n_x[i], n_y[i]>), returning the
  running sums and sums of squares needed for mean / variance estimates.
* ``pair_hist``: bin the weights v_i by t_i into a fixed edge grid.

Coincident pairs (t = 0) are skipped by ``pair_power_sums`` and counted.
"""
from __future__ import annotations

import numpy as np


def pair_power_sums(xp, xw, yp, yw, re_z, im_z, xn=None, yn=None, use_log=False):
    diff = xp - yp
    t2 = np.einsum("ij,ij->i", diff, diff)
    v = xw * yw
    if xn is not None:
        v = v * np.einsum("ij,ij->i", xn, yn)
    zero = t2 == 0.0
    n_zero = int(np.count_nonzero(zero))
    if n_zero:
        keep = ~zero
        v = v[keep]
        t2 = t2[keep]
    if use_log:
        v = v * (0.5 * np.log(t2))
    if im_z != 0.0:
        lt = 0.5 * np.log(t2)
        mod = np.exp(re_z * lt)
        kr = v * mod * np.cos(im_z * lt)
        ki = v * mod * np.sin(im_z * lt)
        return (
            float(kr.sum()),
            float(ki.sum()),
            float((kr * kr).sum()),
            float((ki * ki).sum()),
            n_zero,
        )
    if re_z == 0.0:
        kr = v
    else:
        kr = v * t2 ** (0.5 * re_z)
    return float(kr.sum()), 0.0, float((kr * kr).sum()), 0.0, n_zero


def pair_hist(xp, xw, yp, yw, edges, mass, sq, cnt, xn=None, yn=None):
    """Accumulate weighted pair distances into ``mass``/``sq``/``cnt`` in
    place. Bins are right-open; distances at or beyond the last edge are
    clipped into the top bin and counted in the returned overflow."""
    diff = xp - yp
    t = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    v = xw * yw
    if xn is not None:
        v = v * np.einsum("ij,ij->i", xn, yn)
    nb = mass.shape[0]
    idx = np.searchsorted(edges[1:-1], t, side="right")
    n_clip = int(np.count_nonzero(t >= edges[-1]))
    mass += np.bincount(idx, weights=v, minlength=nb)
    sq += np.bincount(idx, weights=v * v, minlength=nb)
    cnt += np.bincount(idx, minlength=nb).astype(np.int64)
    return 0, n_clip
