"""
The fiber polyhedron P_delta, its vertices and the N statistics.

P_delta = { chi in R^{2n}_{>=0} : sum_i (chi_i - chi_{n+i}) a_i = delta }.
Vertices are found by basis enumeration: every vertex is the unique solution
supported on a linearly independent set of at most d columns.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence

from sympy import Matrix

from .core import InputError, SoundnessError
from .exact_lp import lp_minimize
from .lattice import Character, TorusAction, is_admissible_parameter


@dataclass(frozen=True)
class FiberPolyhedron:
    action: TorusAction
    delta: Character
    matrix: tuple[tuple[int, ...], ...]

    @property
    def rhs(self) -> tuple[int, ...]:
        return self.delta.coords

    def contains(self, point: Sequence) -> bool:
        if len(point) != 2 * self.action.n or any(x < 0 for x in point):
            return False
        return all(
            sum(a * x for a, x in zip(row, point)) == rhs
            for row, rhs in zip(self.matrix, self.rhs)
        )


@dataclass(frozen=True)
class Vertex:
    coords: tuple[int, ...]
    delta: Character

    @property
    def weight(self) -> Character:
        return self.delta

    @property
    def n(self) -> int:
        return len(self.coords) // 2

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.coords) if x != 0)


@dataclass(frozen=True)
class VertexMonomial:
    x_exponents: tuple[int, ...]
    d_exponents: tuple[int, ...]

    def __str__(self) -> str:
        factors = []
        for name, exps in (("x", self.x_exponents), ("d", self.d_exponents)):
            for j, e in enumerate(exps, start=1):
                if e == 1:
                    factors.append(f"{name}{j}")
                elif e > 1:
                    factors.append(f"{name}{j}^{e}")
        return "*".join(factors) if factors else "1"


@dataclass(frozen=True)
class MinNSearch:
    delta: Character
    N: int
    radius: int
    scanned: int
    admissible: int

    def export_to_dict(self) -> dict:
        return {
            "delta_star": list(self.delta.coords),
            "N": self.N,
            "radius": self.radius,
            "scanned": self.scanned,
            "admissible": self.admissible,
            "truncated": True,
        }


def build_P(action: TorusAction, delta: Character) -> FiberPolyhedron:
    """Constraint representation [A^T | -A^T] chi = delta, chi >= 0."""
    if len(delta) != action.d:
        raise InputError(f"delta must have {action.d} entries, got {len(delta)}")
    matrix = tuple(
        tuple(row[r] for row in action.A) + tuple(-row[r] for row in action.A)
        for r in range(action.d)
    )
    return FiberPolyhedron(action=action, delta=delta, matrix=matrix)


def enumerate_vertices(P: FiberPolyhedron) -> list[Vertex]:
    """
    All vertices of P, sorted in decreasing lexicographic order.

    A vertex is recorded from its exact support, so a basic solution is kept only
    when every basic value is strictly positive. This makes the list duplicate-free.
    """
    width = 2 * P.action.n
    M = Matrix(P.matrix)
    rhs = Matrix(P.rhs)
    found = []

    if all(x == 0 for x in P.rhs):
        found.append(tuple([0] * width))

    for size in range(1, P.action.d + 1):
        for subset in combinations(range(width), size):
            B = M[:, list(subset)]
            if B.rank() != size:
                continue
            try:
                solution, params = B.gauss_jordan_solve(rhs)
            except ValueError:
                continue
            if params.shape[0] != 0:
                continue
            values = [Fraction(int(v.p), int(v.q)) for v in solution]
            if any(v <= 0 for v in values):
                continue
            if any(v.denominator != 1 for v in values):
                raise SoundnessError(
                    f"non-integral basic solution on columns {subset}: "
                    "non-unimodular input slipped through"
                )
            point = [0] * width
            for col, value in zip(subset, values):
                point[col] = int(value)
            found.append(tuple(point))

    return [Vertex(coords=point, delta=P.delta) for point in sorted(set(found), reverse=True)]


def vertex_monomial(v: Vertex) -> VertexMonomial:
    """Split a vertex into its x-exponents and its d-exponents."""
    n = v.n
    return VertexMonomial(x_exponents=v.coords[:n], d_exponents=v.coords[n:])


def n_stats(vertices: Sequence[Vertex]) -> tuple[tuple[int, ...], int]:
    """Per-vertex N_i = max coordinate, and N(delta) = max_i N_i."""
    if not vertices:
        raise InputError("empty polyhedron: P_delta has no vertices")
    per_vertex = tuple(max(v.coords) if v.coords else 0 for v in vertices)
    return per_vertex, max(per_vertex)


def vertices_of(action: TorusAction, delta: Character) -> list[Vertex]:
    return enumerate_vertices(build_P(action, delta))


def search_min_N(action: TorusAction, radius: int) -> MinNSearch:
    """
    Minimize N(delta) over admissible delta with max-norm <= radius.

    Characters are scanned in lexicographic order and only a strictly smaller N
    replaces the incumbent, so ties go to the lexicographically smallest delta.
    """
    if radius < 1:
        raise InputError(f"radius must be >= 1, got {radius}")

    best: Optional[tuple[int, Character]] = None
    scanned = admissible = 0
    for coords in product(range(-radius, radius + 1), repeat=action.d):
        scanned += 1
        delta = Character(coords)
        if not is_admissible_parameter(action, delta):
            continue
        admissible += 1
        vertices = vertices_of(action, delta)
        if not vertices:
            continue
        _, N = n_stats(vertices)
        if best is None or N < best[0]:
            best = (N, delta)

    if best is None:
        raise InputError(f"no admissible delta with max-norm <= {radius}; increase radius")
    return MinNSearch(delta=best[1], N=best[0], radius=radius, scanned=scanned, admissible=admissible)


def vertex_oracle(P: FiberPolyhedron, objective: Sequence[int]) -> Optional[Vertex]:
    """Minimize a linear objective over P with the exact simplex; None if empty."""
    result = lp_minimize(objective, P.matrix, P.rhs)
    if result.status == "infeasible":
        return None
    if result.status == "unbounded":
        raise InputError("objective is unbounded below on P_delta; use a positive objective")
    if any(x.denominator != 1 for x in result.x):
        raise SoundnessError(f"exact simplex returned a non-integral vertex {result.x}")
    return Vertex(coords=tuple(int(x) for x in result.x), delta=P.delta)
