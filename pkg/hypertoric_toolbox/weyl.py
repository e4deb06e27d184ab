"""
Weyl algebra arithmetic in normal order and Euler-operator factor systems.

A WeylElement is a finite sum of c * x^u d^w with every x to the left of every d.
The products f~^a g~^a and g~^a f~^a of vertex monomials live in the commutative
subalgebra k[E_1..E_n], E_j = x_j d_j, and split into linear factors; an
EulerFactorSystem keeps only those roots.
"""

from dataclasses import dataclass, field
from itertools import product
from math import comb, factorial
from typing import Iterable, Mapping, Optional, Sequence

from sympy import Poly, ZZ, isprime, symbols

from .core import InputError
from .lattice import Character, TildeCharacter, TorusAction, restrict_tilde_character
from .polytope import Vertex

Exponent = tuple[int, ...]
TermKey = tuple[Exponent, Exponent]


@dataclass(frozen=True)
class EulerFactorSystem:
    """prod_j prod_{r in roots[j]} (E_j - r), roots kept sorted per coordinate."""
    roots: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(tuple(sorted(int(r) for r in rs)) for rs in self.roots))

    @property
    def n(self) -> int:
        return len(self.roots)

    @property
    def support(self) -> tuple[int, ...]:
        """Coordinates (0-based) that carry at least one factor."""
        return tuple(j for j, rs in enumerate(self.roots) if rs)

    @property
    def factor_count(self) -> int:
        return sum(len(rs) for rs in self.roots)

    def reduced(self, p: int) -> tuple[frozenset[int], ...]:
        """Per-coordinate root sets modulo p."""
        return tuple(frozenset(r % p for r in rs) for rs in self.roots)

    def polynomial(self) -> Poly:
        """The product expanded as an integer polynomial in E_1..E_n."""
        E = euler_symbols(self.n)
        expr = 1
        for j, rs in enumerate(self.roots):
            for r in rs:
                expr *= (E[j] - r)
        return Poly(expr, *E, domain=ZZ)

    def export_to_dict(self) -> dict:
        return {f"R{j + 1}": list(rs) for j, rs in enumerate(self.roots)}


def euler_symbols(n: int):
    return symbols(f"E1:{n + 1}")


def single_coordinate(roots: Iterable[int]) -> EulerFactorSystem:
    return EulerFactorSystem((tuple(roots),))


def normal_order_xd(m: int) -> EulerFactorSystem:
    """x^m d^m = prod_{k=0}^{m-1} (E - k)."""
    if m < 0:
        raise InputError(f"exponent must be >= 0, got {m}")
    return single_coordinate(range(m))


def normal_order_dx(m: int) -> EulerFactorSystem:
    """d^m x^m = prod_{k=1}^{m} (E + k)."""
    if m < 0:
        raise InputError(f"exponent must be >= 0, got {m}")
    return single_coordinate(-k for k in range(1, m + 1))


def _check_power(a: int) -> None:
    if a < 1:
        raise InputError(f"power a must be >= 1, got {a}")


def factor_system_fg(v: Vertex, a: int) -> EulerFactorSystem:
    """Roots of f~^a_v g~^a_v: {0..a v_j - 1} and {-1..-a v_{n+j}} per coordinate."""
    _check_power(a)
    n = v.n
    return EulerFactorSystem(tuple(
        tuple(range(a * v.coords[j])) + tuple(-k for k in range(1, a * v.coords[n + j] + 1))
        for j in range(n)
    ))


def factor_system_gf(v: Vertex, a: int) -> EulerFactorSystem:
    """Roots of g~^a_v f~^a_v: {-1..-a v_j} and {0..a v_{n+j} - 1} per coordinate."""
    _check_power(a)
    n = v.n
    return EulerFactorSystem(tuple(
        tuple(-k for k in range(1, a * v.coords[j] + 1)) + tuple(range(a * v.coords[n + j]))
        for j in range(n)
    ))


def check_prime(p: int) -> None:
    if isinstance(p, bool) or not isinstance(p, int) or not isprime(p):
        raise InputError(f"p must be prime, got {p!r}")


def evaluate_factor_system(system: EulerFactorSystem, xi: Sequence[int], p: int) -> int:
    """The value of the factor system at E = xi in F_p."""
    check_prime(p)
    if len(xi) != system.n:
        raise InputError(f"point has {len(xi)} coordinates, system has {system.n}")
    value = 1
    for x, rs in zip(xi, system.roots):
        for r in rs:
            value = (value * (x - r)) % p
            if value == 0:
                return 0
    return value % p


@dataclass(frozen=True)
class WeylElement:
    """Normal-ordered element sum c_{u,w} x^u d^w over Z (modulus None) or F_p."""

    n: int
    terms: Mapping[TermKey, int] = field(default_factory=dict)
    modulus: Optional[int] = None

    def __post_init__(self):
        cleaned = {}
        for (u, w), c in self.terms.items():
            if len(u) != self.n or len(w) != self.n:
                raise InputError(f"exponent length mismatch for {self.n} variables")
            if any(e < 0 for e in u + w):
                raise InputError("exponents must be nonnegative")
            c = c % self.modulus if self.modulus else c
            if c:
                cleaned[(tuple(u), tuple(w))] = c
        object.__setattr__(self, "terms", dict(sorted(cleaned.items())))

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        return (self.n, self.modulus, self.terms) == (other.n, other.modulus, other.terms)

    def __hash__(self) -> int:
        return hash((self.n, self.modulus, tuple(self.terms.items())))

    def __add__(self, other: "WeylElement") -> "WeylElement":
        _check_domain(self, other)
        total = dict(self.terms)
        for key, c in other.terms.items():
            total[key] = total.get(key, 0) + c
        return WeylElement(self.n, total, self.modulus)

    def __neg__(self) -> "WeylElement":
        return self.scale(-1)

    def __sub__(self, other: "WeylElement") -> "WeylElement":
        return self + (-other)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return weyl_multiply(self, other)

    def scale(self, k: int) -> "WeylElement":
        return WeylElement(self.n, {key: k * c for key, c in self.terms.items()}, self.modulus)

    def is_zero(self) -> bool:
        return not self.terms

    def is_diagonal(self) -> bool:
        """Every term is x^u d^u, i.e. the element lies in k[E_1..E_n]."""
        return all(u == w for u, w in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (u, w), c in self.terms.items():
            mono = str(monomial_label(u, w))
            parts.append(str(c) if mono == "1" else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts)


def monomial_label(u: Exponent, w: Exponent) -> str:
    factors = []
    for name, exps in (("x", u), ("d", w)):
        for j, e in enumerate(exps, start=1):
            if e == 1:
                factors.append(f"{name}{j}")
            elif e > 1:
                factors.append(f"{name}{j}^{e}")
    return "*".join(factors) if factors else "1"


def _check_domain(a: WeylElement, b: WeylElement) -> None:
    if a.n != b.n:
        raise InputError(f"variable count mismatch: {a.n} vs {b.n}")
    if a.modulus != b.modulus:
        raise InputError(f"coefficient-domain mismatch: {a.modulus} vs {b.modulus}")


def monomial(n: int, u: Sequence[int] = None, w: Sequence[int] = None,
             coeff: int = 1, modulus: Optional[int] = None) -> WeylElement:
    u = tuple(u) if u is not None else (0,) * n
    w = tuple(w) if w is not None else (0,) * n
    return WeylElement(n, {(u, w): coeff}, modulus)


def x_power(n: int, j: int, power: int = 1, modulus: Optional[int] = None) -> WeylElement:
    """x_j^power, j 1-based."""
    return monomial(n, u=tuple(power if k == j - 1 else 0 for k in range(n)), modulus=modulus)


def d_power(n: int, j: int, power: int = 1, modulus: Optional[int] = None) -> WeylElement:
    """d_j^power, j 1-based."""
    return monomial(n, w=tuple(power if k == j - 1 else 0 for k in range(n)), modulus=modulus)


def _commute_dx(a: int, b: int) -> list[tuple[int, int, int]]:
    """d^a x^b = sum_k C(a,k) C(b,k) k! x^{b-k} d^{a-k}; returns (coeff, x-exp, d-exp)."""
    return [(comb(a, k) * comb(b, k) * factorial(k), b - k, a - k) for k in range(min(a, b) + 1)]


def weyl_multiply(a: WeylElement, b: WeylElement) -> WeylElement:
    """Exact normal-ordered product, coordinate by coordinate."""
    _check_domain(a, b)
    result: dict[TermKey, int] = {}
    for (u1, w1), c1 in a.terms.items():
        for (u2, w2), c2 in b.terms.items():
            per_coordinate = [_commute_dx(w1[j], u2[j]) for j in range(a.n)]
            for choice in product(*per_coordinate):
                coeff = c1 * c2
                u, w = [], []
                for j, (c, xe, de) in enumerate(choice):
                    coeff *= c
                    u.append(u1[j] + xe)
                    w.append(de + w2[j])
                key = (tuple(u), tuple(w))
                result[key] = result.get(key, 0) + coeff
    return WeylElement(a.n, result, a.modulus)


def euler_power(n: int, j: int, k: int, modulus: Optional[int] = None) -> WeylElement:
    """(x_j d_j)^k computed by repeated multiplication."""
    element = monomial(n, modulus=modulus)
    euler = weyl_multiply(x_power(n, j, 1, modulus), d_power(n, j, 1, modulus))
    for _ in range(k):
        element = weyl_multiply(element, euler)
    return element


def system_to_weyl(system: EulerFactorSystem, modulus: Optional[int] = None) -> WeylElement:
    """Expand a factor system and substitute E_j = x_j d_j inside the Weyl algebra."""
    n = system.n
    total = WeylElement(n, {}, modulus)
    for exps, coeff in system.polynomial().terms():
        term = monomial(n, coeff=int(coeff), modulus=modulus)
        for j, k in enumerate(exps, start=1):
            if k:
                term = weyl_multiply(term, euler_power(n, j, k, modulus))
        total = total + term
    return total


def vertex_pair(v: Vertex, a: int, modulus: Optional[int] = None) -> tuple[WeylElement, WeylElement]:
    """f~^a_v = x^{a v_x} d^{a v_d} and g~^a_v = d^{a v_x} x^{a v_d}."""
    _check_power(a)
    n = v.n
    x_part = tuple(a * e for e in v.coords[:n])
    d_part = tuple(a * e for e in v.coords[n:])
    f = monomial(n, u=x_part, w=d_part, modulus=modulus)
    g = weyl_multiply(monomial(n, w=x_part, modulus=modulus), monomial(n, u=d_part, modulus=modulus))
    return f, g


def product_fg(v: Vertex, a: int, modulus: Optional[int] = None) -> WeylElement:
    f, g = vertex_pair(v, a, modulus)
    return weyl_multiply(f, g)


def product_gf(v: Vertex, a: int, modulus: Optional[int] = None) -> WeylElement:
    f, g = vertex_pair(v, a, modulus)
    return weyl_multiply(g, f)


def term_weights(action: TorusAction, element: WeylElement) -> set[Character]:
    """G-weights of the terms of an element (x_j has weight a_j, d_j has -a_j)."""
    return {
        restrict_tilde_character(action, TildeCharacter(u + w))
        for u, w in element.terms
    }
