"""
Certification of derived localization from finitely many Morita equivalences.

For a smooth delta with vertex monomials f~_v and their partners g~_v, a weight
lambda satisfies Lambda <= Lambda.delta^a when no common root xi of the systems
g~^a_v f~^a_v has mu^v_xi = lambda, and Lambda.delta^a <= Lambda when no common
root of f~^a_v g~^a_v has mu^v_xi - a.d(delta) = lambda. Both tests are sufficient
only: a weight that fails them is "not certified", never "fails to localize".
"""

from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product
from math import comb
from typing import Literal, Optional, Sequence, Union

import pandas as pd

from .core import HypertoricEnv, InputError, ToolboxError, sha256_canonical_json
from .lattice import Character, TorusAction, build_action, is_smooth_parameter
from .polytope import Vertex, n_stats, vertices_of
from .roots import common_roots_brute, common_roots_in_fiber, common_roots_solve
from .weyl import EulerFactorSystem, check_prime, factor_system_fg, factor_system_gf

Direction = Literal["gf", "fg"]
Strategy = Literal["direct", "chain"]
STRATEGIES = ("direct", "chain")


def signed_lift(x: int, p: int) -> int:
    """Representative of x mod p in [-p/2, p/2)."""
    x %= p
    return x - p if 2 * x >= p else x


@dataclass(frozen=True)
class FpWeight:
    """lambda in g^*(F_p) = F_p^d, coordinates reduced to 0..p-1."""
    coords: tuple[int, ...]
    p: int

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(x) % self.p for x in self.coords))

    @classmethod
    def reduce(cls, character: Character, p: int) -> "FpWeight":
        return cls(character.coords, p)

    def shift(self, other: "FpWeight", k: int = 1) -> "FpWeight":
        return FpWeight(tuple(a + k * b for a, b in zip(self.coords, other.coords)), self.p)

    @property
    def signed(self) -> tuple[int, ...]:
        return tuple(signed_lift(x, self.p) for x in self.coords)

    def export_to_dict(self) -> dict:
        return {"residues": list(self.coords), "signed": list(self.signed)}


@dataclass(frozen=True)
class Witness:
    a: int
    direction: Direction
    xi: tuple[int, ...]

    def export_to_dict(self) -> dict:
        return {"a": self.a, "direction": self.direction, "xi": list(self.xi)}


@dataclass(frozen=True)
class BadSet:
    p: int
    elements: frozenset
    provenance: dict = field(default_factory=dict, compare=False)

    def __contains__(self, weight: Union[FpWeight, tuple]) -> bool:
        coords = weight.coords if isinstance(weight, FpWeight) else tuple(weight)
        return coords in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def export_to_dict(self) -> dict:
        return {
            "p": self.p,
            "elements": [
                {
                    "residues": list(e),
                    "signed": [signed_lift(x, self.p) for x in e],
                    "witnesses": [w.export_to_dict() for w in self.provenance.get(e, [])],
                }
                for e in sorted(self.elements)
            ],
        }


@dataclass(frozen=True)
class Step:
    """One unit-ideal test: no common root of `direction` systems at power `a` hits `target`."""
    index: int
    a: int
    direction: Direction
    target: tuple[int, ...]
    roots_checked: int

    def export_to_dict(self) -> dict:
        return {
            "index": self.index,
            "a": self.a,
            "direction": self.direction,
            "target": list(self.target),
            "roots_checked": self.roots_checked,
            "empty": True,
        }


@dataclass(frozen=True)
class Certificate:
    action: TorusAction
    delta: Character
    p: int
    lam: FpWeight
    strategy: Strategy
    s: int
    steps: tuple[Step, ...]
    bound_M: int
    input_hash: str = ""
    digest: str = ""

    @property
    def exceeds_bound(self) -> bool:
        return self.p > self.bound_M

    def header(self) -> dict:
        return {
            "A": [list(row) for row in self.action.A],
            "delta": list(self.delta.coords),
            "p": self.p,
            "lambda": list(self.lam.coords),
            "strategy": self.strategy,
            "s": self.s,
            "bound_M": str(self.bound_M),
            "input_hash": self.input_hash,
        }

    def sealed(self) -> "Certificate":
        return replace(self, digest=sha256_canonical_json(self.header()))

    def bound_to(self, input_hash: str) -> "Certificate":
        """Record the hash of the input the certificate was issued for, and reseal."""
        return replace(self, input_hash=input_hash).sealed()

    def export_to_dict(self) -> dict:
        body = self.header()
        body.update({
            "kind": "certificate",
            "lambda_signed": list(self.lam.signed),
            "exceeds_bound_M": self.exceeds_bound,
            "steps": [step.export_to_dict() for step in self.steps],
            "digest": self.digest,
        })
        return body

    @classmethod
    def from_dict(cls, body: dict) -> "Certificate":
        try:
            p = int(body["p"])
            action = build_action(body["A"])
            return cls(
                action=action,
                delta=Character(tuple(body["delta"])),
                p=p,
                lam=FpWeight(tuple(body["lambda"]), p),
                strategy=body["strategy"],
                s=int(body["s"]),
                steps=tuple(
                    Step(index=int(st["index"]), a=int(st["a"]), direction=st["direction"],
                         target=tuple(st["target"]), roots_checked=int(st["roots_checked"]))
                    for st in body["steps"]
                ),
                bound_M=int(body["bound_M"]),
                input_hash=body.get("input_hash", ""),
                digest=body.get("digest", ""),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed certificate: {e!r}")


@dataclass(frozen=True)
class Refusal:
    """lambda is not certified; the failing step and the common root that blocks it."""
    strategy: Strategy
    lam: FpWeight
    index: int
    a: int
    direction: Direction
    witness: tuple[int, ...]

    def export_to_dict(self) -> dict:
        return {
            "kind": "refusal",
            "strategy": self.strategy,
            "lambda": list(self.lam.coords),
            "lambda_signed": list(self.lam.signed),
            "index": self.index,
            "a": self.a,
            "direction": self.direction,
            "xi": list(self.witness),
        }


@dataclass
class Verification:
    ok: bool
    trail: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, message: str) -> "Verification":
        self.ok = False
        self.trail.append(f"FAIL: {message}")
        return self


def mu_dual(action: TorusAction, xi: Sequence[int], p: int) -> FpWeight:
    """mu^v_xi = A^T xi mod p."""
    if len(xi) != action.n:
        raise InputError(f"xi must have {action.n} coordinates, got {len(xi)}")
    return FpWeight(tuple(sum(row[k] * x for row, x in zip(action.A, xi)) for k in range(action.d)), p)


def bound_prop(action: TorusAction, N: int) -> int:
    """C(n, d-1) (2N)^(n-d+1)."""
    if N < 0:
        raise InputError(f"N must be >= 0, got {N}")
    n, d = action.n, action.d
    return comb(n, d - 1) * (2 * N) ** (n - d + 1)


def bound_M(action: TorusAction, N: int) -> int:
    """2 C(n,d) C(n,d-1) (2 C(n,d-1) N + 1)^(n-d+1)."""
    if N < 0:
        raise InputError(f"N must be >= 0, got {N}")
    n, d = action.n, action.d
    return 2 * comb(n, d) * comb(n, d - 1) * (2 * comb(n, d - 1) * N + 1) ** (n - d + 1)


def root_count_bound(action: TorusAction, N: int, p: int) -> int:
    """Upper bound on the number of common roots of the a = 1 systems, for admissible delta."""
    return bound_prop(action, N) * p ** (action.d - 1)


@lru_cache(maxsize=256)
def _smooth_vertices(action: TorusAction, delta: Character) -> tuple[Vertex, ...]:
    if len(delta) != action.d:
        raise InputError(f"delta must have {action.d} entries, got {len(delta)}")
    if not is_smooth_parameter(action, delta):
        raise InputError(f"delta = {list(delta.coords)} is not a smooth parameter (lies on a wall)")
    vertices = vertices_of(action, delta)
    if not vertices:
        raise InputError(f"empty polyhedron: P_delta has no vertices for delta = {list(delta.coords)}")
    return tuple(vertices)


def factor_systems(vertices: Sequence[Vertex], a: int, direction: Direction) -> list[EulerFactorSystem]:
    build = factor_system_gf if direction == "gf" else factor_system_fg
    return [build(v, a) for v in vertices]


@lru_cache(maxsize=1024)
def _obstructions(action: TorusAction, delta: Character, p: int, a: int, direction: Direction,
                  guard_points: int, solver: str) -> tuple[dict, int]:
    """Map obstructed weight -> smallest witness root, plus the number of common roots."""
    vertices = _smooth_vertices(action, delta)
    systems = factor_systems(vertices, a, direction)
    env = HypertoricEnv(guard_points=guard_points)
    find = common_roots_solve if solver == "solve" else common_roots_brute
    roots = find(systems, p, action.n, env)

    shift = FpWeight.reduce(delta, p) if direction == "fg" else FpWeight((0,) * action.d, p)
    obstructed: dict[tuple[int, ...], tuple[int, ...]] = {}
    for xi in sorted(roots):
        weight = mu_dual(action, xi, p).shift(shift, -a).coords
        obstructed.setdefault(weight, xi)
    return obstructed, len(roots)


def obstructions(action: TorusAction, delta: Character, p: int, a: int, direction: Direction,
                 env: Optional[HypertoricEnv] = None, solver: str = "solve") -> dict:
    """Weights lambda blocked at power a in one direction, each with a witness root."""
    check_prime(p)
    env = env or HypertoricEnv()
    return _obstructions(action, delta, p, a, direction, env.guard_points, solver)[0]


def common_root_count(action: TorusAction, delta: Character, p: int, a: int, direction: Direction,
                      env: Optional[HypertoricEnv] = None) -> int:
    check_prime(p)
    env = env or HypertoricEnv()
    return _obstructions(action, delta, p, a, direction, env.guard_points, "solve")[1]


def bad_set(action: TorusAction, delta: Character, p: int, a_max: int,
            env: Optional[HypertoricEnv] = None, solver: str = "solve") -> BadSet:
    """Union over a = 1..a_max of both obstruction families, with provenance."""
    check_prime(p)
    env = env or HypertoricEnv()
    if a_max >= 1:
        _smooth_vertices(action, delta)
    provenance: dict[tuple[int, ...], list[Witness]] = {}
    for a in range(1, a_max + 1):
        for direction in ("gf", "fg"):
            for weight, xi in obstructions(action, delta, p, a, direction, env, solver).items():
                provenance.setdefault(weight, []).append(Witness(a, direction, xi))
    return BadSet(p=p, elements=frozenset(provenance), provenance=provenance)


def _coerce_weight(action: TorusAction, lam: Union[FpWeight, Sequence[int]], p: int) -> FpWeight:
    coords = lam.coords if isinstance(lam, FpWeight) else tuple(lam)
    if len(coords) != action.d:
        raise InputError(f"lambda must have {action.d} entries, got {len(coords)}")
    return FpWeight(coords, p)


def single_step_relation(action: TorusAction, delta: Character, p: int, lam,
                         env: Optional[HypertoricEnv] = None) -> tuple[bool, bool]:
    """(Lambda <= Lambda.delta certified, Lambda.delta <= Lambda certified)."""
    lam = _coerce_weight(action, lam, p)
    leq = lam.coords not in obstructions(action, delta, p, 1, "gf", env)
    geq = lam.coords not in obstructions(action, delta, p, 1, "fg", env)
    return leq, geq


def _steps_for(strategy: Strategy, s: int, lam: FpWeight, d_delta: FpWeight):
    """(index, power, direction, lambda tested against the obstruction set)."""
    if strategy == "direct":
        for a in range(1, s + 1):
            yield a, a, "gf", lam
            yield a, a, "fg", lam
    else:
        for b in range(s):
            shifted = lam.shift(d_delta, b)
            yield b, 1, "gf", shifted
            yield b, 1, "fg", shifted


def _fiber_target(direction: Direction, a: int, tested: FpWeight, d_delta: FpWeight) -> tuple[int, ...]:
    """The value mu^v_xi must avoid: lambda for gf, lambda + a.d(delta) for fg."""
    return tested.coords if direction == "gf" else tested.shift(d_delta, a).coords


def certify(action: TorusAction, delta: Character, p: int, lam, strategy: Strategy,
            env: Optional[HypertoricEnv] = None) -> Union[Certificate, Refusal]:
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    check_prime(p)
    env = env or HypertoricEnv()
    lam = _coerce_weight(action, lam, p)
    vertices = _smooth_vertices(action, delta)
    s = len(vertices)
    d_delta = FpWeight.reduce(delta, p)

    steps = []
    for index, a, direction, tested in _steps_for(strategy, s, lam, d_delta):
        blocked, root_count = _obstructions(action, delta, p, a, direction, env.guard_points, "solve")
        if tested.coords in blocked:
            return Refusal(strategy=strategy, lam=lam, index=index, a=a,
                           direction=direction, witness=blocked[tested.coords])
        steps.append(Step(index=index, a=a, direction=direction,
                          target=_fiber_target(direction, a, tested, d_delta),
                          roots_checked=root_count))

    _, N = n_stats(vertices)
    return Certificate(action=action, delta=delta, p=p, lam=lam, strategy=strategy, s=s,
                       steps=tuple(steps), bound_M=bound_M(action, N)).sealed()


def certify_direct(action: TorusAction, delta: Character, p: int, lam,
                   env: Optional[HypertoricEnv] = None) -> Union[Certificate, Refusal]:
    """Both relations at every power a = 1..s_delta."""
    return certify(action, delta, p, lam, "direct", env)


def certify_chain(action: TorusAction, delta: Character, p: int, lam,
                  env: Optional[HypertoricEnv] = None) -> Union[Certificate, Refusal]:
    """Both single-step relations at lambda + b.d(delta) for b = 0..s_delta - 1."""
    return certify(action, delta, p, lam, "chain", env)


def strategy_bad_set(action: TorusAction, delta: Character, p: int, strategy: Strategy,
                     env: Optional[HypertoricEnv] = None) -> frozenset:
    """Every lambda the strategy refuses."""
    s = len(_smooth_vertices(action, delta))
    if strategy == "direct":
        return bad_set(action, delta, p, s, env).elements

    single = bad_set(action, delta, p, 1, env).elements
    d_delta = FpWeight.reduce(delta, p)
    return frozenset(
        FpWeight(weight, p).shift(d_delta, -b).coords
        for weight in single for b in range(s)
    )


def certified_count(action: TorusAction, delta: Character, p: int, strategy: Strategy,
                    env: Optional[HypertoricEnv] = None) -> int:
    return p ** action.d - len(strategy_bad_set(action, delta, p, strategy, env))


def certified_weights(action: TorusAction, delta: Character, p: int, strategy: Strategy,
                      env: Optional[HypertoricEnv] = None, limit: Optional[int] = None) -> list[FpWeight]:
    """Certified lambda in lexicographic order, optionally only the first `limit`."""
    env = env or HypertoricEnv()
    if limit is None:
        env.check_points(p ** action.d, "certified_weights", hint="Pass a limit.")
    refused = strategy_bad_set(action, delta, p, strategy, env)
    found = []
    for coords in product(range(p), repeat=action.d):
        if coords not in refused:
            found.append(FpWeight(coords, p))
            if limit is not None and len(found) >= limit:
                break
    return found


def first_certified(action: TorusAction, delta: Character, p: int, strategy: Strategy,
                    env: Optional[HypertoricEnv] = None) -> Optional[FpWeight]:
    found = certified_weights(action, delta, p, strategy, env, limit=1)
    return found[0] if found else None


def signature_bad_set(n: int, s: int, p: int) -> frozenset:
    """Closed form of the chain-refused weights for the signature action with delta = 1."""
    check_prime(p)
    return frozenset(((value - b) % p,) for value in (-s, n - s - 1) for b in range(n))


def verify_certificate(cert: Certificate, env: Optional[HypertoricEnv] = None,
                       input_hash: Optional[str] = None) -> Verification:
    """
    Re-derive every step of a certificate without the structured solver.

    With `input_hash`, the certificate must also be bound to that input.

    Each step is re-checked by enumerating the fiber {xi : mu^v_xi = target} and
    evaluating every factor system there; the fiber must hold no common root.
    """
    env = env or HypertoricEnv()
    result = Verification(ok=True)
    try:
        check_prime(cert.p)
        if cert.digest != sha256_canonical_json(cert.header()):
            return result.fail("digest does not match certificate header")
        if input_hash is not None and cert.input_hash != input_hash:
            return result.fail(f"certificate is bound to input {cert.input_hash or '(none)'}, not {input_hash}")
        if cert.strategy not in STRATEGIES:
            return result.fail(f"unknown strategy {cert.strategy!r}")

        vertices = _smooth_vertices(cert.action, cert.delta)
        if len(vertices) != cert.s:
            return result.fail(f"certificate claims s = {cert.s}, P_delta has {len(vertices)} vertices")
        _, N = n_stats(vertices)
        if bound_M(cert.action, N) != cert.bound_M:
            return result.fail("recorded bound_M does not match N(delta)")

        d_delta = FpWeight.reduce(cert.delta, cert.p)
        expected = list(_steps_for(cert.strategy, cert.s, cert.lam, d_delta))
        if len(expected) != len(cert.steps):
            return result.fail(f"expected {len(expected)} steps, found {len(cert.steps)}")

        for (index, a, direction, tested), step in zip(expected, cert.steps):
            target = _fiber_target(direction, a, tested, d_delta)
            if (step.index, step.a, step.direction, step.target) != (index, a, direction, target):
                return result.fail(f"step {index}/{direction} does not match lambda")
            systems = factor_systems(vertices, a, direction)
            hits = common_roots_in_fiber(systems, cert.action, target, cert.p, env)
            if hits:
                return result.fail(
                    f"step {index}/{direction}: common root {sorted(hits)[0]} has mu = {list(target)}"
                )
            result.trail.append(f"ok: step {index}/{direction} at a={a}, target {list(target)}")
    except ToolboxError as e:
        return result.fail(str(e))
    return result


@dataclass
class ScanTable:
    rows: list[dict]
    certificates: dict[int, list[Certificate]]

    def to_frame(self) -> pd.DataFrame:
        columns = ["p", "strategy", "status", "certified", "total", "exceeds_bound_M", "samples"]
        return pd.DataFrame(self.rows, columns=columns)


def scan_primes(action: TorusAction, delta: Character, primes: Sequence[int], strategy: Strategy,
                env: Optional[HypertoricEnv] = None, samples: int = 3) -> ScanTable:
    """Certified-lambda counts per prime; per-row failures are recorded and the scan goes on."""
    env = env or HypertoricEnv()
    rows, certificates = [], {}
    for p in primes:
        row = {"p": p, "strategy": strategy, "status": "ok", "certified": None,
               "total": None, "exceeds_bound_M": None, "samples": ""}
        try:
            check_prime(p)
            vertices = _smooth_vertices(action, delta)
            _, N = n_stats(vertices)
            row["total"] = p ** action.d
            row["exceeds_bound_M"] = p > bound_M(action, N)
            row["certified"] = certified_count(action, delta, p, strategy, env)
            sample = certified_weights(action, delta, p, strategy, env, limit=samples)
            row["samples"] = " ".join(str(list(w.signed)) for w in sample)
            certificates[p] = [certify(action, delta, p, w, strategy, env) for w in sample]
        except ToolboxError as e:
            row["status"] = f"{type(e).__name__}: {e}"
        rows.append(row)
    return ScanTable(rows=rows, certificates=certificates)
