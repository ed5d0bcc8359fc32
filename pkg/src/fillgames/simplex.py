"""Exact rational simplex with lexicographic objectives.

Maximizes a priority-ordered list of linear objectives over
``A x <= b, x >= 0`` with ``b >= 0`` (so the all-slack basis is feasible
and no phase 1 is needed).  Entering columns are chosen by Bland's rule on
lexicographically positive reduced-cost vectors and leaving rows by Bland's
rule among minimum ratios, which rules out cycling; this is the classic
way to obtain a deterministic optimal vertex, here the lexicographically
greatest one when the secondary objectives are the coordinate directions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .errors import EngineError

ZERO = Fraction(0)


def lex_maximize(
    objectives: Sequence[Sequence[Fraction]],
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
) -> List[Fraction]:
    """Return the x maximizing the objectives in priority order."""
    nvar = len(objectives[0])
    m = len(rows)
    if any(b < 0 for b in rhs):
        raise EngineError("simplex requires a non-negative right-hand side")
    width = nvar + m
    tableau = []
    for i in range(m):
        row = [Fraction(v) for v in rows[i]] + [ZERO] * m + [Fraction(rhs[i])]
        row[nvar + i] = Fraction(1)
        tableau.append(row)
    obj = [[Fraction(v) for v in c] + [ZERO] * m for c in objectives]
    basis = list(range(nvar, nvar + m))

    while True:
        entering = -1
        for j in range(width):
            column = [o[j] for o in obj]
            sign = next((c for c in column if c != 0), ZERO)
            if sign > 0:
                entering = j
                break
        if entering < 0:
            break
        leaving = -1
        best_ratio = None
        for i in range(m):
            coeff = tableau[i][entering]
            if coeff > 0:
                ratio = tableau[i][width] / coeff
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            raise EngineError("linear program is unbounded")
        pivot_row = tableau[leaving]
        pivot = pivot_row[entering]
        if pivot != 1:
            tableau[leaving] = pivot_row = [v / pivot for v in pivot_row]
        for i in range(m):
            if i != leaving and tableau[i][entering] != 0:
                factor = tableau[i][entering]
                row = tableau[i]
                tableau[i] = [v - factor * p for v, p in zip(row, pivot_row)]
        for k in range(len(obj)):
            factor = obj[k][entering]
            if factor != 0:
                obj[k] = [v - factor * p for v, p in zip(obj[k], pivot_row[:width])]
        basis[leaving] = entering

    x = [ZERO] * nvar
    for i, var in enumerate(basis):
        if var < nvar:
            x[var] = tableau[i][width]
    return x
