"""Exact integer linear algebra for small cellular chain systems.

Solves A x = b over the integers by column reduction with a tracked
unimodular transform, and exposes a kernel basis so callers can search
the (low-dimensional) solution lattice for a canonical representative.
Everything uses Python ints; matrices here have at most a few dozen rows
and columns.
"""

from __future__ import annotations

from fractions import Fraction


def _column_echelon(
    A: list[list[int]],
) -> tuple[list[list[int]], list[list[int]], list[int]]:
    """Reduce A (m x n) to column echelon form H = A @ V, V unimodular.

    Returns (H, V, pivots); pivots[j] is the pivot row of column j for
    j < rank, and H[pivot[j]][j] > 0.
    """
    m = len(A)
    n = len(A[0]) if A else 0
    H = [row[:] for row in A]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap(j, k):
        for row in H:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def addmul(j, k, q):
        # col_j += q * col_k
        for row in H:
            row[j] += q * row[k]
        for row in V:
            row[j] += q * row[k]

    def negate(j):
        for row in H:
            row[j] = -row[j]
        for row in V:
            row[j] = -row[j]

    pivots: list[int] = []
    col = 0
    for row in range(m):
        if col >= n:
            break
        while True:
            nz = [j for j in range(col, n) if H[row][j] != 0]
            if not nz:
                break
            jmin = min(nz, key=lambda j: abs(H[row][j]))
            done = True
            for j in nz:
                if j == jmin:
                    continue
                q = H[row][j] // H[row][jmin]
                addmul(j, jmin, -q)
                if H[row][j] != 0:
                    done = False
            if done:
                if jmin != col:
                    swap(col, jmin)
                break
        if H[row][col] != 0:
            if H[row][col] < 0:
                negate(col)
            pivots.append(row)
            col += 1
    return H, V, pivots


def _kernel(V: list[list[int]], rank: int, n: int) -> list[list[int]]:
    return [[V[i][j] for i in range(n)] for j in range(rank, n)]


def solve_integer(
    A: list[list[int]], b: list[int]
) -> tuple[list[int] | None, list[list[int]]]:
    """Solve A x = b over ZZ.

    Returns (particular_solution_or_None, kernel_basis).  The kernel basis
    spans all integer solutions of A x = 0.
    """
    n = len(A[0]) if A else 0
    m = len(A)
    if n == 0:
        return ([] if all(v == 0 for v in b) else None), []
    H, V, pivots = _column_echelon(A)
    rank = len(pivots)
    y = [0] * n
    resid = list(b)
    for j in range(rank):
        r = pivots[j]
        if resid[r] % H[r][j] != 0:
            return None, _kernel(V, rank, n)
        y[j] = resid[r] // H[r][j]
        if y[j]:
            for i in range(m):
                resid[i] -= y[j] * H[i][j]
    if any(v != 0 for v in resid):
        return None, _kernel(V, rank, n)
    x = [sum(V[i][j] * y[j] for j in range(rank)) for i in range(n)]
    return x, _kernel(V, rank, n)


def solvable_rational(A: list[list[int]], b: list[int]) -> bool:
    """Whether A x = b has a rational solution (torsion-free use only)."""
    m = len(A)
    n = len(A[0]) if A else 0
    M = [[Fraction(A[i][j]) for j in range(n)] + [Fraction(b[i])] for i in range(m)]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        M[r] = [x / M[r][c] for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        r += 1
        if r == m:
            break
    return all(row[n] == 0 for row in M[r:])
