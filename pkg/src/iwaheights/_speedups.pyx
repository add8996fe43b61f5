# cython: boundscheck=False, wraparound=False
"""Compiled convolution kernels; semantics identical to ``_kernels_py``.

Coefficients are small nonnegative residues (mod p^k with p^k <= a few
thousand at desk scale), so long long accumulation never overflows.
"""

BACKEND = "cython"


def poly_mul_trunc(list a, list b, long long mod, Py_ssize_t cap):
    """Coefficients of a*b mod `mod`, truncated to degree `cap` inclusive."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef Py_ssize_t n = la + lb - 1
    if cap + 1 < n:
        n = cap + 1
    if n <= 0:
        return []
    cdef list out = [0] * n
    cdef Py_ssize_t i, j, top
    cdef long long ai, acc
    for i in range(min(la, n)):
        ai = a[i]
        if ai == 0:
            continue
        top = lb
        if n - i < top:
            top = n - i
        for j in range(top):
            acc = <long long> out[i + j] + ai * <long long> b[j]
            out[i + j] = acc % mod
    return out


def cyclic_mul(list a, list b, long long mod):
    """Cyclic convolution of equal-length coefficient lists mod `mod`."""
    cdef Py_ssize_t n = len(a)
    cdef list out = [0] * n
    cdef Py_ssize_t i, j, t
    cdef long long ai, acc
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(n):
            t = i + j
            if t >= n:
                t -= n
            acc = <long long> out[t] + ai * <long long> b[j]
            out[t] = acc % mod
    return out
