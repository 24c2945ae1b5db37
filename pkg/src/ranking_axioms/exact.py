"""Small exact linear algebra over :class:`fractions.Fraction`."""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction


class SingularMatrixError(ArithmeticError):
    pass


def solve(A: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve the square system ``A x = b`` by Gauss-Jordan elimination."""
    n = len(A)
    rows = [[Fraction(x) for x in A[i]] + [Fraction(b[i])] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError(f"no pivot in column {col}")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        piv = rows[col][col]
        rows[col] = [x / piv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [row[n] for row in rows]


def inverse(A: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(A)
    cols = [solve(A, [int(i == j) for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def components(adjacency: Sequence[Sequence[int]]) -> list[list[int]]:
    """Connected components (sorted vertex lists) of a graph given by its weight matrix."""
    n = len(adjacency)
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack, comp = [start], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in range(n):
                if adjacency[v][w] and not seen[w]:
                    seen[w] = True
                    stack.append(w)
        out.append(sorted(comp))
    return out
