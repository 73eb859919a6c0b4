"""Select the compiled kernels when available, else the NumPy fallback.

Set ``LEGENDRE_SPECTRA_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
legendre_product = _fallback.legendre_product

if not os.environ.get("LEGENDRE_SPECTRA_PURE_PYTHON"):
    try:
        from . import _kernels
    except ImportError:
        _kernels = None
    else:
        BACKEND = "cython"
        legendre_product = _kernels.legendre_product
