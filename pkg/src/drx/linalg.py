"""Exact dense linear solving over the rationals (fraction-free enough at desk scale)."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .errors import SingularSystem


def solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> List[Fraction]:
    """Solve a (possibly overdetermined) system exactly by Gaussian elimination.

    Every equation must be satisfied by the returned solution; an
    underdetermined or inconsistent system raises SingularSystem.
    """
    m = len(rows)
    if m == 0:
        raise SingularSystem("empty system")
    n = len(rows[0])
    a = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for col in range(n):
        sel = None
        for i in range(r, m):
            if a[i][col] != 0:
                sel = i
                break
        if sel is None:
            continue
        a[r], a[sel] = a[sel], a[r]
        inv = Fraction(1) / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(col)
        r += 1
        if r == m:
            break
    if len(piv_cols) < n:
        raise SingularSystem(f"rank {len(piv_cols)} < {n} unknowns")
    for i in range(r, m):
        if a[i][n] != 0:
            raise SingularSystem("inconsistent system (no exact polynomial fits the data)")
    x = [Fraction(0)] * n
    for i, col in enumerate(piv_cols):
        x[col] = a[i][n]
    return x
