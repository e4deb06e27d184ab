"""
Common roots of Euler factor systems over F_p.

Every system is a product of linear factors E_j - r, so it vanishes at xi exactly
when some coordinate xi_j hits one of its roots mod p. Three solvers share that
description:

- common_roots_brute enumerates all of F_p^n,
- common_roots_solve pins one vanishing factor per system and only enumerates the
  coordinates no pin touches,
- common_roots_in_fiber enumerates the affine subspace {xi : A^T xi = target}.
"""

from itertools import product
from typing import Iterator, Optional, Sequence

from sympy import GF
from sympy.polys.matrices import DomainMatrix

from .core import HypertoricEnv, InputError
from .lattice import TorusAction
from .weyl import EulerFactorSystem, check_prime

Point = tuple[int, ...]


def _dimension(systems: Sequence[EulerFactorSystem], n: Optional[int]) -> int:
    sizes = {s.n for s in systems}
    if n is not None:
        sizes.add(n)
    if len(sizes) != 1:
        raise InputError(f"factor systems disagree on the number of coordinates: {sorted(sizes)}")
    return sizes.pop()


def _vanishes(reduced: Sequence[Sequence[frozenset]], xi: Point) -> bool:
    return all(any(x in rs for x, rs in zip(xi, system)) for system in reduced)


def common_roots_brute(systems: Sequence[EulerFactorSystem], p: int, n: Optional[int] = None,
                       env: Optional[HypertoricEnv] = None) -> set[Point]:
    """Every xi in F_p^n at which all systems vanish, by full enumeration."""
    check_prime(p)
    n = _dimension(systems, n)
    env = env or HypertoricEnv()
    env.check_points(p ** n, "common_roots_brute", hint="Use common_roots_solve instead.")

    reduced = [s.reduced(p) for s in systems]
    return {xi for xi in product(range(p), repeat=n) if _vanishes(reduced, xi)}


def _pinnings(reduced: Sequence[Sequence[frozenset]], index: int,
              pins: dict[int, int]) -> Iterator[dict[int, int]]:
    if index == len(reduced):
        yield dict(pins)
        return

    system = reduced[index]
    if any(system[j] and value in system[j] for j, value in pins.items()):
        yield from _pinnings(reduced, index + 1, pins)
        return

    for j, rs in enumerate(system):
        if j in pins:
            continue
        for r in sorted(rs):
            pins[j] = r
            yield from _pinnings(reduced, index + 1, pins)
            del pins[j]


def pinning_leaves(systems: Sequence[EulerFactorSystem], p: int) -> list[dict[int, int]]:
    """Distinct consistent coordinate pinnings that satisfy every system."""
    reduced = [s.reduced(p) for s in systems]
    if any(not any(rs) for rs in reduced):
        return []
    unique = {tuple(sorted(leaf.items())) for leaf in _pinnings(reduced, 0, {})}
    return [dict(leaf) for leaf in sorted(unique)]


def common_roots_solve(systems: Sequence[EulerFactorSystem], p: int, n: Optional[int] = None,
                       env: Optional[HypertoricEnv] = None) -> set[Point]:
    """Same set as common_roots_brute, built from pinnings instead of all of F_p^n."""
    check_prime(p)
    n = _dimension(systems, n)
    env = env or HypertoricEnv()

    if not systems:
        env.check_points(p ** n, "common_roots_solve (no systems)")
        return set(product(range(p), repeat=n))

    leaves = pinning_leaves(systems, p)
    env.check_points(
        sum(p ** (n - len(leaf)) for leaf in leaves),
        "common_roots_solve",
        hint="Too many unpinned coordinates for this prime.",
    )

    points: set[Point] = set()
    for leaf in leaves:
        free = [j for j in range(n) if j not in leaf]
        for values in product(range(p), repeat=len(free)):
            xi = [0] * n
            for j, r in leaf.items():
                xi[j] = r
            for j, value in zip(free, values):
                xi[j] = value
            points.add(tuple(xi))
    return points


def fiber_parametrization(action: TorusAction, target: Sequence[int], p: int
                          ) -> Optional[tuple[list[int], list[tuple[int, int, list[int]]]]]:
    """
    Row-reduce A^T xi = target over GF(p).

    Returns None if the system is inconsistent, else (free coordinates, pivot rows)
    where each pivot row is (pivot coordinate, constant, coefficients on the free
    coordinates).
    """
    K = GF(p)
    n, d = action.n, action.d
    rows = [[K(action.A[j][k]) for j in range(n)] + [K(int(target[k]))] for k in range(d)]
    reduced, pivots = DomainMatrix(rows, (d, n + 1), K).rref()
    if n in pivots:
        return None

    entries = [[int(K.to_int(x)) % p for x in row] for row in reduced.to_list()]
    free = [j for j in range(n) if j not in pivots]
    pivot_rows = [
        (col, entries[i][n], [entries[i][f] for f in free])
        for i, col in enumerate(pivots)
    ]
    return free, pivot_rows


def common_roots_in_fiber(systems: Sequence[EulerFactorSystem], action: TorusAction,
                          target: Sequence[int], p: int,
                          env: Optional[HypertoricEnv] = None) -> set[Point]:
    """Every xi with A^T xi = target (mod p) at which all systems vanish, by enumeration."""
    check_prime(p)
    n = _dimension(systems, action.n)
    env = env or HypertoricEnv()

    parametrization = fiber_parametrization(action, target, p)
    if parametrization is None:
        return set()
    free, pivot_rows = parametrization
    env.check_points(p ** len(free), "common_roots_in_fiber")

    reduced = [s.reduced(p) for s in systems]
    found = set()
    for values in product(range(p), repeat=len(free)):
        xi = [0] * n
        for j, value in zip(free, values):
            xi[j] = value
        for col, constant, coeffs in pivot_rows:
            xi[col] = (constant - sum(c * v for c, v in zip(coeffs, values))) % p
        xi = tuple(xi)
        if _vanishes(reduced, xi):
            found.add(xi)
    return found
