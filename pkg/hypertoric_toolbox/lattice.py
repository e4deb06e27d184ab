"""
Integer-lattice bookkeeping for a subtorus G of the standard torus acting on affine space.

The action is given by an n x d integer matrix A whose columns are a basis of the
cocharacter lattice of G inside Z^n. Everything here is exact integer arithmetic.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterator, Optional, Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import (
    hermite_normal_form,
    invariant_factors,
    smith_normal_decomp,
)

from .core import InputError


IntMatrix = tuple[tuple[int, ...], ...]


def _as_int_matrix(rows: Sequence[Sequence], what: str = "A") -> IntMatrix:
    """Validate a rectangular integer matrix and freeze it into tuples."""
    if not rows or not all(isinstance(row, (list, tuple)) for row in rows):
        raise InputError(f"{what} must be a non-empty list of rows")
    width = len(rows[0])
    frozen = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InputError(f"{what} row {i + 1} has {len(row)} entries, expected {width}")
        frozen_row = []
        for j, entry in enumerate(row):
            if isinstance(entry, bool) or not isinstance(entry, int):
                if isinstance(entry, (float, Fraction)) and entry == int(entry):
                    entry = int(entry)
                else:
                    raise InputError(f"{what}[{i + 1}][{j + 1}] = {entry!r} is not an integer")
            frozen_row.append(int(entry))
        frozen.append(tuple(frozen_row))
    return tuple(frozen)


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """
    Basis of the integer kernel {c in Z^ncols : M c = 0}.

    Uses a Smith decomposition D = S M T: the columns of the unimodular T past the
    rank of D span the kernel. The basis is returned in Hermite normal form so the
    output is canonical.
    """
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]

    M = Matrix(rows)
    if M.is_zero_matrix:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]

    D, _, T = smith_normal_decomp(M, domain=ZZ)
    rank = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    if rank == ncols:
        return []

    basis = T[:, rank:]
    canonical = hermite_normal_form(basis)
    if canonical.shape[1] != basis.shape[1]:
        # HNF of a tall matrix only pivots on its bottom rows; keep the Smith basis when they are degenerate
        canonical = basis
    return [_primitive_sign(tuple(int(x) for x in canonical[:, j])) for j in range(canonical.shape[1])]


def _primitive_sign(vector: tuple[int, ...]) -> tuple[int, ...]:
    """Flip sign so the first nonzero entry is positive."""
    for entry in vector:
        if entry != 0:
            return vector if entry > 0 else tuple(-x for x in vector)
    return vector


def in_integer_span(generators: Sequence[Sequence[int]], target: Sequence[int]) -> bool:
    """True iff `target` is a Z-linear combination of `generators`."""
    target = [int(x) for x in target]
    if not generators:
        return all(x == 0 for x in target)

    M = Matrix(generators).T
    if M.is_zero_matrix:
        return all(x == 0 for x in target)

    D, S, _ = smith_normal_decomp(M, domain=ZZ)
    rhs = S * Matrix(target)
    for i in range(D.shape[0]):
        diagonal = int(D[i, i]) if i < D.shape[1] else 0
        value = int(rhs[i])
        if diagonal == 0:
            if value != 0:
                return False
        elif value % diagonal != 0:
            return False
    return True


@dataclass(frozen=True)
class Character:
    """Element of X^*(G) = Z^d, dual to the columns of A."""
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(x) for x in self.coords))

    def pair(self, cocharacter: "Cocharacter") -> int:
        return sum(a * b for a, b in zip(self.coords, cocharacter.coords))

    def scale(self, k: int) -> "Character":
        return Character(tuple(k * x for x in self.coords))

    def __len__(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class TildeCharacter:
    """Element of X^*(T~) = Z^{2n}; rational entries allowed for interior points."""
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    @classmethod
    def basis(cls, size: int, index: int) -> "TildeCharacter":
        """The standard basis vector e_index (1-based) of Z^size."""
        return cls(tuple(1 if i == index - 1 else 0 for i in range(size)))


@dataclass(frozen=True)
class Cocharacter:
    """Element of X_*(G) together with its image A.c in X_*(T) = Z^n."""
    coords: tuple[int, ...]
    embedded: tuple[int, ...]


@dataclass(frozen=True)
class TorusAction:
    """A subtorus G of G_m^n acting on A^n, recorded by A and the derived quotient map pi."""

    n: int
    d: int
    A: IntMatrix
    pi: IntMatrix
    label: str = field(default="", compare=False)

    def row(self, i: int) -> tuple[int, ...]:
        """Weight a_i of x_i (1-based)."""
        if isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= self.n:
            raise InputError(f"coordinate index must lie in 1..{self.n}, got {i!r}")
        return self.A[i - 1]

    @cached_property
    def tilde_weights(self) -> tuple[tuple[int, ...], ...]:
        """G-weights of the 2n coordinates of T*X: +a_i on x_i, -a_i on the conjugate."""
        return self.A + tuple(tuple(-x for x in row) for row in self.A)

    def embed(self, coords: Sequence[int]) -> Cocharacter:
        coords = tuple(int(x) for x in coords)
        embedded = tuple(sum(a * c for a, c in zip(row, coords)) for row in self.A)
        return Cocharacter(coords=coords, embedded=embedded)

    def export_to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "A": [list(row) for row in self.A],
            "pi": [list(row) for row in self.pi],
        }


def build_action(A: Sequence[Sequence[int]], label: str = "") -> TorusAction:
    """
    Build a TorusAction from the n x d matrix A and derive pi: Z^n -> Z^{n-d}.

    pi is a basis of the integer left kernel of A, so pi.A = 0 and pi is
    surjective. A must have full column rank and a saturated column lattice.
    """
    A = _as_int_matrix(A)
    n, d = len(A), len(A[0])
    if not 0 < d < n:
        raise InputError(f"dimension of G must satisfy 0 < d < n, got d={d}, n={n}")

    M = Matrix(A)
    if M.rank() != d:
        raise InputError(f"A must have full column rank {d}, got rank {M.rank()}")

    factors = [int(x) for x in invariant_factors(M, domain=ZZ)]
    if any(abs(x) != 1 for x in factors):
        raise InputError(
            f"columns of A do not span a saturated sublattice (invariant factors {factors})"
        )

    pi = tuple(integer_kernel([list(col) for col in zip(*A)], n))
    # integer_kernel returns column vectors of the kernel of A^T, i.e. rows of pi
    action = TorusAction(n=n, d=d, A=A, pi=pi, label=label)
    _check_pi(action)
    return action


def _check_pi(action: TorusAction) -> None:
    product = Matrix(action.pi) * Matrix(action.A)
    if not product.is_zero_matrix:
        raise InputError("derived pi does not annihilate A")
    if len(action.pi) != action.n - action.d:
        raise InputError(f"derived pi has {len(action.pi)} rows, expected {action.n - action.d}")


def signature_action(n: int, s: int) -> TorusAction:
    """The rank-one action with weight +1 on x_1..x_s and -1 on x_{s+1}..x_n."""
    if n < 2 or not 1 <= s <= n:
        raise InputError(f"signature action needs n >= 2 and 1 <= s <= n, got n={n}, s={s}")
    return build_action([[1] if i < s else [-1] for i in range(n)], label=f"signature({n},{s})")


def maximal_minors(matrix: IntMatrix) -> Iterator[tuple[tuple[int, ...], int]]:
    """All maximal minors of a full-row-rank matrix, keyed by column subset."""
    rows = len(matrix)
    cols = len(matrix[0]) if matrix else 0
    M = Matrix(matrix)
    for subset in combinations(range(cols), rows):
        yield subset, int(M[:, list(subset)].det())


def is_unimodular(action: TorusAction) -> bool:
    """Every nonzero maximal minor of pi is +-1."""
    values = {abs(minor) for _, minor in maximal_minors(action.pi) if minor != 0}
    return values == {1}


def restrict_tilde_character(action: TorusAction, chi: TildeCharacter) -> Character:
    """Restriction chi|_G = sum_i (chi_i - chi_{n+i}) a_i."""
    n = action.n
    if len(chi.coords) != 2 * n:
        raise InputError(f"tilde character must have {2 * n} coordinates, got {len(chi.coords)}")
    total = [0] * action.d
    for i in range(n):
        weight = chi.coords[i] - chi.coords[n + i]
        if weight:
            for k, a in enumerate(action.A[i]):
                total[k] += weight * a
    if any(isinstance(x, Fraction) and x.denominator != 1 for x in total):
        raise InputError("restriction of a rational tilde character is not integral")
    return Character(tuple(int(x) for x in total))


def cocharacter_intersection(action: TorusAction, I: Sequence[int]) -> tuple[int, Optional[Cocharacter]]:
    """
    Rank of {c in Z^d : (A c)_i = 0 for i in I} and, when that rank is 1, a
    primitive generator.
    """
    rows = [list(action.row(i)) for i in sorted(set(I))]
    basis = integer_kernel(rows, action.d)
    if len(basis) == 1:
        return 1, action.embed(basis[0])
    return len(basis), None


@dataclass(frozen=True)
class Wall:
    """The hyperplane of characters pairing to zero with a rank-one intersection."""
    index_set: tuple[int, ...]
    generator: Cocharacter

    def contains(self, delta: Character) -> bool:
        return delta.pair(self.generator) == 0


def _subsets(n: int, max_size: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    top = n if max_size is None else max_size
    for size in range(top + 1):
        yield from combinations(range(1, n + 1), size)


def walls(action: TorusAction, convention: str = "constrained") -> list[Wall]:
    """
    Walls W_I for every I with a rank-one intersection, deduplicated by generator.

    convention "constrained" constrains the coordinates in I; "complement" uses the
    literal reading and constrains the coordinates outside I. Both give the same
    hyperplanes; only the index labels differ.
    """
    if convention not in ("constrained", "complement"):
        raise InputError(f"unknown wall convention: {convention}")

    found: dict[tuple[int, ...], Wall] = {}
    everything = set(range(1, action.n + 1))
    for I in _subsets(action.n):
        constrained = I if convention == "constrained" else tuple(sorted(everything - set(I)))
        rank, generator = cocharacter_intersection(action, constrained)
        if rank == 1 and generator.coords not in found:
            found[generator.coords] = Wall(index_set=I, generator=generator)
    return list(found.values())


def is_smooth_parameter(action: TorusAction, delta: Character) -> bool:
    """delta avoids every wall W_I."""
    return not any(wall.contains(delta) for wall in walls(action))


def span_violations(action: TorusAction, delta: Character) -> list[tuple[int, ...]]:
    """Index sets I with |I| < d whose coordinate characters Z-span delta."""
    return [
        I for I in _subsets(action.n, action.d - 1)
        if in_integer_span([action.row(i) for i in I], delta.coords)
    ]


def is_admissible_parameter(action: TorusAction, delta: Character) -> bool:
    """Smooth, and outside every Z-span of fewer than d coordinate characters."""
    if len(delta) != action.d:
        raise InputError(f"delta must have {action.d} entries, got {len(delta)}")
    return is_smooth_parameter(action, delta) and not span_violations(action, delta)
