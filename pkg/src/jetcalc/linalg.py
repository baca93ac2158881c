"""Exact linear algebra over the rationals.

Dense row-major matrices as lists of lists of Fraction.  Elimination clears
denominators row-by-row first (so the forward pass works fraction-free on
integers, Bareiss-style) and uses a deterministic pivot rule: scan columns
left to right, take the first row with a nonzero entry.  Same input, same
pivots, same output — the classification pipeline relies on that.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _as_fraction_rows(rows):
    return [[Fraction(x) for x in row] for row in rows]


def _clear_denominators(row):
    """Scale a row by the lcm of its denominators; returns an integer row."""
    denom_lcm = 1
    for x in row:
        denom_lcm = denom_lcm * x.denominator // gcd(denom_lcm, x.denominator)
    if denom_lcm != 1:
        row = [x * denom_lcm for x in row]
    g = 0
    for x in row:
        g = gcd(g, int(x))
    if g > 1:
        row = [x / g for x in row]
    return row


def rref(rows, ncols=None):
    """Reduced row echelon form with deterministic pivoting.

    Returns (reduced_rows, pivot_columns).  Zero rows are dropped.  The
    pivot in each returned row is 1 and is the only nonzero entry in its
    column.
    """
    work = [_clear_denominators(row) for row in _as_fraction_rows(rows)]
    work = [row for row in work if any(x != 0 for x in row)]
    if ncols is None:
        ncols = len(work[0]) if work else 0
    pivots = []
    row_at = 0
    for col in range(ncols):
        pivot_row = None
        for r in range(row_at, len(work)):
            if work[r][col] != 0:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        work[row_at], work[pivot_row] = work[pivot_row], work[row_at]
        pv = work[row_at][col]
        work[row_at] = [x / pv for x in work[row_at]]
        for r in range(len(work)):
            if r == row_at:
                continue
            factor = work[r][col]
            if factor != 0:
                work[r] = [a - factor * b for a, b in zip(work[r], work[row_at])]
        pivots.append(col)
        row_at += 1
        if row_at == len(work):
            break
    return work[:row_at], pivots


def matrix_rank(rows, ncols=None) -> int:
    reduced, pivots = rref(rows, ncols)
    return len(pivots)


def nullspace_basis(rows, ncols):
    """Basis of the right nullspace, one vector per non-pivot column.

    The basis vector for free column f has a 1 in position f, zeros in the
    other free positions, and the forced values in the pivot positions, so
    the basis is unique given the column order.
    """
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free_cols:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            vec[p] = -row[f]
        basis.append(vec)
    return basis


def invert_matrix(mat):
    """Exact inverse of a square matrix; raises ValueError if singular."""
    n = len(mat)
    work = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
            for i, row in enumerate(mat)]
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if work[r][col] != 0:
                pivot_row = r
                break
        if pivot_row is None:
            raise ValueError("matrix is singular")
        work[col], work[pivot_row] = work[pivot_row], work[col]
        pv = work[col][col]
        work[col] = [x / pv for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
    return [row[n:] for row in work]


def mat_mul(a, b):
    """Matrix product of two dense rational matrices."""
    n, k, m = len(a), len(b), len(b[0])
    assert all(len(row) == k for row in a)
    out = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n):
        for p in range(k):
            aip = a[i][p]
            if aip == 0:
                continue
            for j in range(m):
                if b[p][j] != 0:
                    out[i][j] += aip * b[p][j]
    return out


def identity_matrix(n):
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def determinant(mat):
    """Exact determinant by fraction-free elimination."""
    n = len(mat)
    work = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if work[r][col] != 0:
                pivot_row = r
                break
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            det = -det
        det *= work[col][col]
        inv = 1 / work[col][col]
        for r in range(col + 1, n):
            if work[r][col] != 0:
                factor = work[r][col] * inv
                work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
    return det


def solve_linear(rows, rhs, ncols):
    """One exact solution of rows · x = rhs, or None if inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None  # a row reduced to 0 = 1
    x = [Fraction(0)] * ncols
    for row, p in zip(reduced, pivots):
        x[p] = row[ncols]
    return x
