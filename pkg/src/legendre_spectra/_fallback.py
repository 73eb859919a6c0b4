"""NumPy implementation of the product kernel.

For a fixed outer index ``m`` the inner double sum over ``(n, ell)`` is a
discrete convolution of the two coefficient tails weighted by
``lam[r] = (1/2)_r / r!``::

    S(n, m) = sum_{p + q = n} lam[p] lam[q] a[m + p] b[m + q]

and the linearization weight factors as
``A[m, n+2m, ell] = lam[m] lam[p] lam[q] (2n+1) / (2 (n+m+1) lam[n+m+1])``.
"""
from functools import lru_cache

import numpy as np

from .legendre_core import half_ratio_table

# Repeated products of one shape (the time stepper) use a cached dense weight
# tensor W[n, i, j]; larger shapes fall back to per-m convolutions.
_DENSE_LIMIT = 2_000_000


@lru_cache(maxsize=8)
def _dense_weights(na, nb, n_out, m_max):
    lam = half_ratio_table(n_out + na + nb + 1)
    i = np.arange(na + 1)[:, None]
    j = np.arange(nb + 1)[None, :]
    W = np.zeros((n_out, na + 1, nb + 1))
    for n in range(n_out):
        twice_m = i + j - n
        m = twice_m // 2
        ok = (twice_m >= 0) & (twice_m % 2 == 0) & (m <= np.minimum(i, j))
        if m_max >= 0:
            ok &= m <= m_max
        mm, p, q = np.where(ok, m, 0), np.where(ok, i - m, 0), np.where(ok, j - m, 0)
        w = lam[mm] * lam[p] * lam[q] * (2 * n + 1) / (2.0 * (n + mm + 1) * lam[n + mm + 1])
        W[n] = np.where(ok, w, 0.0)
    W = W.reshape(n_out, -1)
    W.setflags(write=False)
    return W


def legendre_product(a, b, n_out, m_max=-1):
    """Legendre coefficients of a product, truncated in output degree and in ``m``.

    Returns ``out[n]`` for ``n < n_out``::

        out[n] = sum_{m=0}^{m_max} sum_{ell=m}^{n+m} a[n+2m-ell] b[ell] A[m, n+2m, ell]

    with indices beyond the stored coefficients read as zero. ``m_max < 0``
    means no limit on ``m``.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    na, nb = a.shape[0] - 1, b.shape[0] - 1
    out = np.zeros(n_out)
    if n_out <= 0 or na < 0 or nb < 0:
        return out
    if n_out * (na + 1) * (nb + 1) <= _DENSE_LIMIT:
        W = _dense_weights(na, nb, n_out, m_max if m_max >= 0 else -1)
        return W @ np.outer(a, b).ravel()
    lam = half_ratio_table(na + nb + 1)
    m_stop = min(na, nb)
    if m_max >= 0:
        m_stop = min(m_stop, m_max)
    for m in range(m_stop + 1):
        ta = lam[: na - m + 1] * a[m:]
        tb = lam[: nb - m + 1] * b[m:]
        conv = np.convolve(ta, tb)
        top = min(n_out, conv.shape[0])
        n = np.arange(top)
        scale = lam[m] * (2 * n + 1) / (2.0 * (n + m + 1) * lam[n + m + 1])
        out[:top] += scale * conv[:top]
    return out
