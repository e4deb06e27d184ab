"""
Exact two-phase simplex over the rationals.

Solves  min c.x  subject to  A x = b, x >= 0  with fractions.Fraction and Bland's
rule, so it never cycles and never rounds.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Optional, Sequence

LPStatus = Literal["optimal", "infeasible", "unbounded"]


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


class SimplexTableau:
    """Dense tableau with an explicit basis; the last column is the right-hand side."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows
        self.basis = basis

    @property
    def width(self) -> int:
        return len(self.rows[0]) - 1 if self.rows else 0

    def pivot(self, r: int, j: int) -> None:
        row = self.rows[r]
        piv = row[j]
        self.rows[r] = row = [v / piv for v in row]
        for k, other in enumerate(self.rows):
            if k != r and other[j] != 0:
                f = other[j]
                self.rows[k] = [a - f * b for a, b in zip(other, row)]
        self.basis[r] = j

    def reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        reduced = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                for j in range(self.width):
                    reduced[j] -= cb * self.rows[i][j]
        return reduced

    def run(self, cost: Sequence[Fraction], allowed: int) -> LPStatus:
        """Minimize cost over the first `allowed` columns with Bland's rule."""
        while True:
            reduced = self.reduced_costs(cost)
            entering = next((j for j in range(allowed) if reduced[j] < 0), None)
            if entering is None:
                return "optimal"

            leaving, best = None, None
            for i, row in enumerate(self.rows):
                if row[entering] > 0:
                    ratio = row[-1] / row[entering]
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leaving]):
                        leaving, best = i, ratio
            if leaving is None:
                return "unbounded"
            self.pivot(leaving, entering)

    def solution(self, size: int) -> tuple[Fraction, ...]:
        x = [Fraction(0)] * size
        for i, b in enumerate(self.basis):
            if b < size:
                x[b] = self.rows[i][-1]
        return tuple(x)


def lp_minimize(c: Sequence, A_eq: Sequence[Sequence], b_eq: Sequence) -> LPResult:
    """Minimize c.x over {x >= 0 : A_eq x = b_eq} exactly."""
    m = len(A_eq)
    size = len(c) if c is not None else (len(A_eq[0]) if A_eq else 0)
    cost = [Fraction(v) for v in c] if c is not None else [Fraction(0)] * size

    if m == 0:
        if any(v < 0 for v in cost):
            return LPResult("unbounded")
        return LPResult("optimal", tuple([Fraction(0)] * size), Fraction(0))

    # phase one: artificial identity block, rows sign-normalized so b >= 0
    rows = []
    for i, (row, rhs) in enumerate(zip(A_eq, b_eq)):
        sign = -1 if rhs < 0 else 1
        artificial = [Fraction(1 if k == i else 0) for k in range(m)]
        rows.append([Fraction(sign * v) for v in row] + artificial + [Fraction(sign * rhs)])
    tableau = SimplexTableau(rows, [size + i for i in range(m)])

    phase_one_cost = [Fraction(0)] * size + [Fraction(1)] * m
    tableau.run(phase_one_cost, allowed=size + m)
    infeasibility = sum(row[-1] for row, b in zip(tableau.rows, tableau.basis) if b >= size)
    if infeasibility > 0:
        return LPResult("infeasible")

    # drive zero-level artificials out of the basis, dropping redundant rows
    for r in reversed(range(len(tableau.rows))):
        if tableau.basis[r] >= size:
            j = next((j for j in range(size) if tableau.rows[r][j] != 0), None)
            if j is None:
                del tableau.rows[r]
                del tableau.basis[r]
            else:
                tableau.pivot(r, j)

    tableau.rows = [row[:size] + [row[-1]] for row in tableau.rows]
    if not tableau.rows:
        if any(v < 0 for v in cost):
            return LPResult("unbounded")
        return LPResult("optimal", tuple([Fraction(0)] * size), Fraction(0))

    status = tableau.run(cost, allowed=size)
    if status == "unbounded":
        return LPResult("unbounded")
    x = tableau.solution(size)
    return LPResult("optimal", x, sum(ci * xi for ci, xi in zip(cost, x)))


def lp_feasible(A_eq: Sequence[Sequence], b_eq: Sequence) -> bool:
    """True iff {x >= 0 : A_eq x = b_eq} is nonempty."""
    size = len(A_eq[0]) if A_eq else 0
    return lp_minimize([0] * size, A_eq, b_eq).feasible
