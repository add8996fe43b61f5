"""Kernel backend selection: compiled extension if present, else pure Python.

Set IWAHEIGHTS_FORCE_PURE=1 to skip the compiled core (used by the benchmark
and by tests that compare the two backends).
"""

import os

if os.environ.get("IWAHEIGHTS_FORCE_PURE") == "1":
    from iwaheights._kernels_py import BACKEND, cyclic_mul, poly_mul_trunc
else:
    try:
        from iwaheights._speedups import BACKEND, cyclic_mul, poly_mul_trunc
    except ImportError:
        from iwaheights._kernels_py import BACKEND, cyclic_mul, poly_mul_trunc

__all__ = ["BACKEND", "poly_mul_trunc", "cyclic_mul"]
