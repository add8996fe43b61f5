"""Exact linear algebra over Z/p^k.

Z/p^k is a chain ring, so every matrix has a canonical Howell normal form:
an echelon basis whose pivots are powers of p, closed under the "shadow"
rows p^(k-v) * row.  Reduction against a Howell basis is a canonical coset
representative, which is what makes submodule membership, quotient
enumeration, and kernel computations exact.

Vectors are lists of reduced residues; matrices are lists of rows.
"""

from __future__ import annotations

from typing import Optional, Sequence


def pval(x: int, p: int, k: int) -> int:
    """p-adic valuation of a residue mod p^k (valuation of 0 is k)."""
    x %= p**k
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def unit_inv(x: int, m: int) -> int:
    return pow(x, -1, m)


def _pivot_col(row: Sequence[int]) -> int:
    for c, x in enumerate(row):
        if x != 0:
            return c
    return -1


def howell(rows: Sequence[Sequence[int]], p: int, k: int) -> list[list[int]]:
    """Canonical Howell normal form of the row span, sorted by pivot column.

    Pivot entries are exact powers of p; entries above each pivot are reduced
    into [0, pivot).  Two row sets span the same module iff their Howell
    forms are identical.
    """
    m = p**k
    work = []
    width = 0
    for r in rows:
        rr = [x % m for x in r]
        width = max(width, len(rr))
        if any(rr):
            work.append(rr)
    for r in work:
        r.extend([0] * (width - len(r)))
    pivots: list[list[int]] = []
    for c in range(width):
        best = -1
        best_v = k + 1
        for i, r in enumerate(work):
            if r[c] != 0:
                v = pval(r[c], p, k)
                if v < best_v:
                    best_v = v
                    best = i
        if best < 0:
            continue
        row = work.pop(best)
        v = best_v
        u = row[c] // p**v
        ui = unit_inv(u, m)
        row = [(x * ui) % m for x in row]
        pv = p**v
        nxt = []
        for r in work:
            if r[c] != 0:
                q = r[c] // pv
                r = [(x - q * y) % m for x, y in zip(r, row)]
            if any(r):
                nxt.append(r)
        work = nxt
        if v > 0:
            shadow = [(x * p ** (k - v)) % m for x in row]
            if any(shadow):
                work.append(shadow)
        pivots.append(row)
    # upward reduction for canonical form: reduce each row against every
    # later pivot row, in pivot-column order, exactly like reduce_vector
    for j in range(len(pivots)):
        row = pivots[j]
        for i in range(j + 1, len(pivots)):
            c = _pivot_col(pivots[i])
            q = row[c] // pivots[i][c]
            if q:
                row = [(x - q * y) % m for x, y in zip(row, pivots[i])]
        pivots[j] = row
    return pivots


def reduce_vector(v: Sequence[int], hrows: Sequence[Sequence[int]], p: int, k: int) -> list[int]:
    """Canonical representative of v modulo the span of a Howell basis."""
    m = p**k
    out = [x % m for x in v]
    for r in hrows:
        c = _pivot_col(r)
        q = out[c] // r[c]
        if q:
            out = [(x - q * y) % m for x, y in zip(out, r)]
    return out


def span_contains(v: Sequence[int], hrows: Sequence[Sequence[int]], p: int, k: int) -> bool:
    return not any(reduce_vector(v, hrows, p, k))


def span_size(hrows: Sequence[Sequence[int]], p: int, k: int) -> int:
    size = 1
    for r in hrows:
        v = pval(r[_pivot_col(r)], p, k)
        size *= p ** (k - v)
    return size


def right_kernel(mat: Sequence[Sequence[int]], ncols: int, p: int, k: int) -> list[list[int]]:
    """Generators of {u in (Z/p^k)^ncols : mat . u = 0}."""
    nrows = len(mat)
    aug = []
    for j in range(ncols):
        row = [mat[i][j] for i in range(nrows)]
        row.extend(1 if t == j else 0 for t in range(ncols))
        aug.append(row)
    gens = []
    for r in howell(aug, p, k):
        if not any(r[:nrows]):
            gens.append(r[nrows:])
    return gens


def solve_combination(
    rows: Sequence[Sequence[int]], target: Sequence[int], p: int, k: int
) -> Optional[list[int]]:
    """One coefficient vector a with sum(a_i * rows_i) = target, or None."""
    m = p**k
    n = len(rows)
    if n == 0:
        return [] if not any(x % m for x in target) else None
    width = len(rows[0])
    aug = [list(r) + [1 if t == i else 0 for t in range(n)] for i, r in enumerate(rows)]
    H = howell(aug, p, k)
    v = [x % m for x in target] + [0] * n
    for r in H:
        c = _pivot_col(r)
        if c >= width:
            continue
        q = v[c] // r[c]
        if q:
            v = [(x - q * y) % m for x, y in zip(v, r)]
    if any(v[:width]):
        return None
    return [(-x) % m for x in v[width:]]


def span_intersection(
    rows_a: Sequence[Sequence[int]], rows_b: Sequence[Sequence[int]], p: int, k: int
) -> list[list[int]]:
    """Generators of span(rows_a) & span(rows_b)."""
    m = p**k
    ra, rb = len(rows_a), len(rows_b)
    if ra == 0 or rb == 0:
        return []
    width = len(rows_a[0])
    mat = [
        [rows_a[i][c] for i in range(ra)] + [(-rows_b[j][c]) % m for j in range(rb)]
        for c in range(width)
    ]
    gens = []
    for u in right_kernel(mat, ra + rb, p, k):
        vec = [0] * width
        for i in range(ra):
            if u[i]:
                vec = [(x + u[i] * y) % m for x, y in zip(vec, rows_a[i])]
        if any(vec):
            gens.append(vec)
    return howell(gens, p, k)


def preimage_span(
    mat: Sequence[Sequence[int]],
    span_rows: Sequence[Sequence[int]],
    ncols: int,
    p: int,
    k: int,
) -> list[list[int]]:
    """Generators of {x : mat . x in span(span_rows)} (mat maps columns)."""
    m = p**k
    nout = len(mat)
    rs = len(span_rows)
    stacked = [list(mat[i]) + [(-span_rows[j][i]) % m for j in range(rs)] for i in range(nout)]
    gens = [u[:ncols] for u in right_kernel(stacked, ncols + rs, p, k)]
    return howell([g for g in gens if any(g)], p, k)


def matvec(mat: Sequence[Sequence[int]], v: Sequence[int], m: int) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) % m for row in mat]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], m: int) -> list[list[int]]:
    nb = len(b[0])
    return [[sum(row[t] * b[t][j] for t in range(len(b))) % m for j in range(nb)] for row in a]


def det_int(mat: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (fraction-free Bareiss)."""
    n = len(mat)
    if n == 0:
        return 1
    M = [list(row) for row in mat]
    sign = 1
    prev = 1
    for i in range(n - 1):
        piv = next((r for r in range(i, n) if M[r][i] != 0), None)
        if piv is None:
            return 0
        if piv != i:
            M[i], M[piv] = M[piv], M[i]
            sign = -sign
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                M[r][c] = (M[r][c] * M[i][i] - M[r][i] * M[i][c]) // prev
            M[r][i] = 0
        prev = M[i][i]
    return sign * M[n - 1][n - 1]


def det_is_unit(mat: Sequence[Sequence[int]], p: int) -> bool:
    return det_int(mat) % p != 0


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]
