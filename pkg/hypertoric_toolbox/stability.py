"""
GIT semistability on T*X = A^{2n} and the shifted Koszul complex of the vertex monomials.

Semistability of a point only depends on its support, so everything here works
with SupportPattern and enumerates points of F_q^{2n} only for the desk-scale
cross-check against the vanishing locus of the vertex monomials.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Optional, Sequence

from sympy import Matrix, factorint, symbols, zeros

from .core import HypertoricEnv, InputError
from .exact_lp import lp_feasible
from .lattice import Character, TorusAction
from .polytope import Vertex, vertices_of

Point = tuple[int, ...]


@dataclass(frozen=True)
class SupportPattern:
    """Coordinates (1-based, in 1..2n) where a point of T*X is nonzero."""
    indices: frozenset

    @classmethod
    def of_point(cls, point: Sequence[int]) -> "SupportPattern":
        return cls(frozenset(i for i, x in enumerate(point, start=1) if x != 0))

    def __contains__(self, i: int) -> bool:
        return i in self.indices

    def __le__(self, other: "SupportPattern") -> bool:
        return self.indices <= other.indices


def _check_support(action: TorusAction, S: SupportPattern) -> None:
    bad = [i for i in S.indices if not 1 <= i <= 2 * action.n]
    if bad:
        raise InputError(f"support indices must lie in 1..{2 * action.n}, got {sorted(bad)}")


@lru_cache(maxsize=4096)
def _semistable(action: TorusAction, delta: Character, indices: frozenset) -> bool:
    columns = sorted(indices)
    weights = action.tilde_weights
    A_eq = [[weights[i - 1][k] for i in columns] for k in range(action.d)]
    if not columns:
        return all(x == 0 for x in delta.coords)
    return lp_feasible(A_eq, list(delta.coords))


def support_semistable(action: TorusAction, delta: Character, S: SupportPattern) -> bool:
    """
    Some monomial of weight m.delta (m > 0) is supported in S.

    Decided as rational feasibility of sum_{i in S} u_i w_i = delta with u >= 0,
    where w_i = +a_i for i <= n and -a_{i-n} otherwise. The condition is scale
    invariant, so m = 1 suffices.
    """
    if len(delta) != action.d:
        raise InputError(f"delta must have {action.d} entries, got {len(delta)}")
    _check_support(action, S)
    return _semistable(action, delta, frozenset(S.indices))


def minimal_semistable_supports(action: TorusAction, delta: Character,
                                env: Optional[HypertoricEnv] = None) -> list[SupportPattern]:
    """Inclusion-minimal semistable supports; every superset is semistable too."""
    env = env or HypertoricEnv()
    env.check_points(2 ** (2 * action.n), "minimal_semistable_supports")
    minimal: list[SupportPattern] = []
    everything = range(1, 2 * action.n + 1)
    for size in range(2 * action.n + 1):
        for indices in combinations(everything, size):
            S = SupportPattern(frozenset(indices))
            if any(T <= S for T in minimal):
                continue
            if support_semistable(action, delta, S):
                minimal.append(S)
    return minimal


def check_field_size(q: int) -> None:
    if isinstance(q, bool) or not isinstance(q, int) or q < 2 or len(factorint(q)) != 1:
        raise InputError(f"q must be a prime power, got {q!r}")


def _points(action: TorusAction, q: int, env: Optional[HypertoricEnv]):
    """F_q^{2n} with elements labelled 0..q-1, 0 being the zero of the field."""
    check_field_size(q)
    env = env or HypertoricEnv()
    env.check_points(q ** (2 * action.n), "unstable_table", hint="Use q in {2, 3}.")
    return product(range(q), repeat=2 * action.n)


def unstable_table(action: TorusAction, delta: Character, q: int,
                   env: Optional[HypertoricEnv] = None) -> set[Point]:
    """Every point of F_q^{2n} whose support pattern is not semistable."""
    return {
        point for point in _points(action, q, env)
        if not support_semistable(action, delta, SupportPattern.of_point(point))
    }


def _monomials_vanish(vertices: Sequence[Vertex], point: Point) -> bool:
    return all(any(point[i] == 0 for i in v.support) for v in vertices)


def vanishing_locus(vertices: Sequence[Vertex], action: TorusAction, q: int,
                    env: Optional[HypertoricEnv] = None) -> set[Point]:
    """Points where every vertex monomial f_v vanishes."""
    return {point for point in _points(action, q, env) if _monomials_vanish(vertices, point)}


def check_unstable_generators(action: TorusAction, delta: Character, q: int,
                              env: Optional[HypertoricEnv] = None,
                              vertices: Optional[Sequence[Vertex]] = None) -> bool:
    """
    The vertex monomials cut out the unstable locus over F_q, pointwise.

    `vertices` replaces the computed vertex list, e.g. to drop one monomial.
    """
    if vertices is None:
        vertices = vertices_of(action, delta)
    return vanishing_locus(vertices, action, q, env) == unstable_table(action, delta, q, env)


def symbol_variables(n: int):
    """x_1..x_n and y_1..y_n, y_j being the symbol of d_j."""
    return symbols(f"x1:{n + 1}"), symbols(f"y1:{n + 1}")


def vertex_symbol(v: Vertex):
    """The commutative monomial x^{v_x} y^{v_d}."""
    xs, ys = symbol_variables(v.n)
    expr = 1
    for var, e in zip(xs + ys, v.coords):
        expr *= var ** e
    return expr


@dataclass(frozen=True)
class KoszulTerm:
    degree: int
    rank: int
    twists: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]


@dataclass
class KoszulData:
    """
    0 -> D[m] -> ... -> (+)_j D[m + s - 1] -> D[m + s] -> 0 for f_1..f_s of weight delta.

    The term twisted by m + s sits in degree zero; the summand indexed by a
    k-subset I of the generators sits in degree k with twist m + s - k.
    `differentials[k - 1]` is the matrix of d_k from degree k to degree k - 1.
    """

    s: int
    m: int
    weights: tuple[int, ...]
    terms: tuple[KoszulTerm, ...]
    differentials: tuple[Matrix, ...]

    @property
    def ranks(self) -> tuple[int, ...]:
        """Ranks in complex order, from degree s down to degree 0."""
        return tuple(term.rank for term in self.terms)

    @property
    def twists(self) -> tuple[tuple[int, ...], ...]:
        return tuple(term.twists for term in self.terms)

    def sign_matrix(self, k: int) -> list[list[int]]:
        """Signs of d_k, 0 where the entry vanishes."""
        D = self.differentials[k - 1]
        return [
            [0 if D[r, c] == 0 else (-1 if D[r, c].could_extract_minus_sign() else 1)
             for c in range(D.cols)]
            for r in range(D.rows)
        ]

    def is_complex(self) -> bool:
        """d_{k-1} d_k = 0 for every k, as polynomial matrices."""
        for k in range(2, self.s + 1):
            composite = (self.differentials[k - 2] * self.differentials[k - 1]).expand()
            if not composite.is_zero_matrix:
                return False
        return True

    def export_to_dict(self) -> dict:
        return {
            "s": self.s,
            "m": self.m,
            "weights": list(self.weights),
            "degree_zero_twist": self.m + sum(self.weights),
            "terms": [
                {"degree": t.degree, "rank": t.rank, "twists": list(t.twists),
                 "basis": [list(b) for b in t.basis]}
                for t in self.terms
            ],
            "differentials": [
                [[str(entry) for entry in D.row(r)] for r in range(D.rows)]
                for D in self.differentials
            ],
            "d_squared_zero": self.is_complex(),
        }


def _koszul_differential(generators: Sequence, k: int) -> Matrix:
    """d_k(e_I) = sum_j (-1)^j f_{I_j} e_{I - I_j}, subsets in lexicographic order."""
    s = len(generators)
    sources = list(combinations(range(1, s + 1), k))
    targets = list(combinations(range(1, s + 1), k - 1))
    row_of = {t: r for r, t in enumerate(targets)}
    D = zeros(len(targets), len(sources))
    for c, I in enumerate(sources):
        for j, i in enumerate(I):
            face = I[:j] + I[j + 1:]
            D[row_of[face], c] = (-1) ** j * generators[i - 1]
    return D


def koszul_data(vertices: Sequence[Vertex], m: int) -> KoszulData:
    if not vertices:
        raise InputError("koszul_data needs at least one vertex")
    s = len(vertices)
    weights = (1,) * s
    generators = [vertex_symbol(v) for v in vertices]

    terms = []
    for k in range(s, -1, -1):
        basis = tuple(combinations(range(1, s + 1), k))
        terms.append(KoszulTerm(
            degree=k,
            rank=comb(s, k),
            twists=tuple(m + s - k for _ in basis),
            basis=basis,
        ))
    differentials = tuple(_koszul_differential(generators, k) for k in range(1, s + 1))
    return KoszulData(s=s, m=m, weights=weights, terms=tuple(terms), differentials=differentials)
