# cython: language_level=3
"""Compiled pair kernels: fused distance / power / histogram loops."""
from libc.math cimport cos, exp, log, pow, sin, sqrt

import numpy as np

cimport numpy as cnp


def pair_power_sums(const double[:, ::1] xp, const double[::1] xw,
                    const double[:, ::1] yp, const double[::1] yw,
                    double re_z, double im_z,
                    const double[:, ::1] xn=None, const double[:, ::1] yn=None,
                    bint use_log=False):
    cdef Py_ssize_t n = xp.shape[0]
    cdef Py_ssize_t d = xp.shape[1]
    cdef Py_ssize_t i, k, n_zero = 0
    cdef double t2, c, v, lt, mod, kr, ki
    cdef double s_re = 0.0, s_im = 0.0, q_re = 0.0, q_im = 0.0
    cdef bint use_normal = xn is not None
    cdef bint complex_z = im_z != 0.0
    cdef bint zero_z = re_z == 0.0
    for i in range(n):
        t2 = 0.0
        for k in range(d):
            c = xp[i, k] - yp[i, k]
            t2 += c * c
        if t2 == 0.0:
            n_zero += 1
            continue
        v = xw[i] * yw[i]
        if use_normal:
            c = 0.0
            for k in range(d):
                c += xn[i, k] * yn[i, k]
            v *= c
        if use_log:
            v *= 0.5 * log(t2)
        if complex_z:
            lt = 0.5 * log(t2)
            mod = exp(re_z * lt)
            kr = v * mod * cos(im_z * lt)
            ki = v * mod * sin(im_z * lt)
            s_re += kr
            s_im += ki
            q_re += kr * kr
            q_im += ki * ki
        else:
            if not zero_z:
                kr = v * pow(t2, 0.5 * re_z)
            else:
                kr = v
            s_re += kr
            q_re += kr * kr
    return s_re, s_im, q_re, q_im, n_zero


def pair_hist(const double[:, ::1] xp, const double[::1] xw,
              const double[:, ::1] yp, const double[::1] yw,
              const double[::1] edges, double[::1] mass, double[::1] sq,
              long long[::1] cnt,
              const double[:, ::1] xn=None, const double[:, ::1] yn=None):
    cdef Py_ssize_t n = xp.shape[0]
    cdef Py_ssize_t d = xp.shape[1]
    cdef Py_ssize_t nb = mass.shape[0]
    cdef Py_ssize_t i, k, lo, hi, mid
    cdef Py_ssize_t n_clip = 0
    cdef double t2, t, c, v
    cdef double top = edges[edges.shape[0] - 1]
    cdef bint use_normal = xn is not None
    for i in range(n):
        t2 = 0.0
        for k in range(d):
            c = xp[i, k] - yp[i, k]
            t2 += c * c
        t = sqrt(t2)
        v = xw[i] * yw[i]
        if use_normal:
            c = 0.0
            for k in range(d):
                c += xn[i, k] * yn[i, k]
            v *= c
        if t >= top:
            n_clip += 1
            lo = nb - 1
        else:
            # right-open bins over edges[1:-1]
            lo = 0
            hi = nb - 1
            while lo < hi:
                mid = (lo + hi) >> 1
                if t < edges[mid + 1]:
                    hi = mid
                else:
                    lo = mid + 1
        mass[lo] += v
        sq[lo] += v * v
        cnt[lo] += 1
    return 0, n_clip
