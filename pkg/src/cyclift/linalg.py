"""Dense linear algebra over exact fields and over p-adic rings.

Matrices are lists of rows.  Entries only need +, -, *, ``inverse()`` and
``is_zero()``; when entries expose ``valuation_or_none()`` the pivot of least
valuation is chosen, which is what makes elimination numerically sound over a
discrete valuation ring.
"""

from __future__ import annotations

from typing import Any, List, Optional, Sequence, Tuple

Matrix = List[List[Any]]


def _pivot_rank(x: Any) -> Tuple[int, Any]:
    fn = getattr(x, "valuation_or_none", None)
    if fn is not None:
        v = fn()
        return (0, v) if v is not None else (1, 0)
    return (0, 0) if not x.is_zero() else (1, 0)


def _choose_pivot(M: Matrix, col: int, start: int) -> Optional[int]:
    best, best_key = None, None
    for r in range(start, len(M)):
        key = _pivot_rank(M[r][col])
        if key[0] == 1:
            continue
        if best_key is None or key < best_key:
            best, best_key = r, key
    return best


def det(M: Matrix, one: Any) -> Any:
    n = len(M)
    A = [list(row) for row in M]
    d = one
    for c in range(n):
        r = _choose_pivot(A, c, c)
        if r is None:
            return one * 0 if hasattr(one, "__mul__") else 0
        if r != c:
            A[c], A[r] = A[r], A[c]
            d = -d
        piv = A[c][c]
        d = d * piv
        inv = piv.inverse()
        for rr in range(c + 1, n):
            if A[rr][c].is_zero():
                continue
            f = A[rr][c] * inv
            A[rr] = [a - f * b for a, b in zip(A[rr], A[c])]
    return d


def solve(M: Matrix, rhs: Sequence[Any]) -> List[Any]:
    """Solve M x = rhs for square invertible M."""
    n = len(M)
    A = [list(row) + [rhs[i]] for i, row in enumerate(M)]
    for c in range(n):
        r = _choose_pivot(A, c, c)
        if r is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[r] = A[r], A[c]
        inv = A[c][c].inverse()
        A[c] = [a * inv for a in A[c]]
        for rr in range(n):
            if rr != c and not A[rr][c].is_zero():
                f = A[rr][c]
                A[rr] = [a - f * b for a, b in zip(A[rr], A[c])]
    return [A[i][n] for i in range(n)]


def inverse(M: Matrix, one: Any) -> Matrix:
    n = len(M)
    zero = one - one
    cols = []
    for j in range(n):
        e = [one if i == j else zero for i in range(n)]
        cols.append(solve(M, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def rank(M: Matrix) -> int:
    A = [list(row) for row in M]
    if not A:
        return 0
    rows, cols = len(A), len(A[0])
    rk = 0
    for c in range(cols):
        r = _choose_pivot(A, c, rk)
        if r is None:
            continue
        A[rk], A[r] = A[r], A[rk]
        inv = A[rk][c].inverse()
        for rr in range(rk + 1, rows):
            if not A[rr][c].is_zero():
                f = A[rr][c] * inv
                A[rr] = [a - f * b for a, b in zip(A[rr], A[rk])]
        rk += 1
        if rk == rows:
            break
    return rk


def matmul(A: Matrix, B: Matrix) -> Matrix:
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = None
            for k, a in enumerate(row):
                term = a * B[k][j]
                acc = term if acc is None else acc + term
            new.append(acc)
        out.append(new)
    return out


def matvec(A: Matrix, x: Sequence[Any]) -> List[Any]:
    out = []
    for row in A:
        acc = None
        for a, b in zip(row, x):
            term = a * b
            acc = term if acc is None else acc + term
        out.append(acc)
    return out
