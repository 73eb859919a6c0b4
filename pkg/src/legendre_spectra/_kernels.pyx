# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled product kernel; same contract as ``_fallback.legendre_product``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def legendre_product(a, b, Py_ssize_t n_out, Py_ssize_t m_max=-1):
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t na = av.shape[0] - 1
    cdef Py_ssize_t nb = bv.shape[0] - 1
    out_arr = np.zeros(n_out if n_out > 0 else 0)
    if n_out <= 0 or na < 0 or nb < 0:
        return out_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t kmax = na + nb + 1
    lam_arr = np.empty(kmax + 1)
    cdef double[::1] lam = lam_arr
    ta_arr = np.empty(na + 1)
    tb_arr = np.empty(nb + 1)
    cdef double[::1] ta = ta_arr
    cdef double[::1] tb = tb_arr
    cdef Py_ssize_t r, m, n, p, lo, hi, m_stop, top
    cdef double s, scale
    lam[0] = 1.0
    for r in range(1, kmax + 1):
        lam[r] = lam[r - 1] * (r - 0.5) / r
    m_stop = na if na < nb else nb
    if m_max >= 0 and m_max < m_stop:
        m_stop = m_max
    for m in range(m_stop + 1):
        # lam-weighted tails: ta[p] = lam[p] a[m + p], tb[q] = lam[q] b[m + q]
        for p in range(na - m + 1):
            ta[p] = lam[p] * av[m + p]
        for p in range(nb - m + 1):
            tb[p] = lam[p] * bv[m + p]
        top = na + nb - 2 * m + 1
        if top > n_out:
            top = n_out
        for n in range(top):
            lo = n - (nb - m)
            if lo < 0:
                lo = 0
            hi = na - m
            if hi > n:
                hi = n
            s = 0.0
            for p in range(lo, hi + 1):
                s += ta[p] * tb[n - p]
            scale = lam[m] * (2 * n + 1) / (2.0 * (n + m + 1) * lam[n + m + 1])
            out[n] += scale * s
    return out_arr
