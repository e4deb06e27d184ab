"""
MAIN FILE

PURPOSE: Command-line entry point that certifies derived localization for
         hypertoric quantum Hamiltonian reductions in characteristic p
         and emits deterministic reports
"""

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from sympy import primerange

from hypertoric_toolbox import HypertoricEnv, InputError, SoundnessError, ToolboxError
from hypertoric_toolbox import morita, roots, stability, weyl
from hypertoric_toolbox.core import sha256_canonical_json
from hypertoric_toolbox.file_formats import formats
from hypertoric_toolbox.lattice import (
    TorusAction,
    is_admissible_parameter,
    is_smooth_parameter,
    is_unimodular,
    span_violations,
    walls,
)
from hypertoric_toolbox.polytope import (
    build_P,
    enumerate_vertices,
    n_stats,
    search_min_N,
    vertex_monomial,
    vertex_oracle,
)
from hypertoric_toolbox.reports import Report, save_df, save_report

from helpers import (
    ProblemInput,
    input_hash,
    parse_input,
    parse_p_range,
    parse_weight,
)

from cli_responses import (
    CommandResponse,
    error_response,
    refused_response,
    success_response,
)

load_dotenv()

COMMANDS = (
    "check-input", "vertices", "koszul", "bound", "bad-set", "certify", "scan-primes",
    "stability-table", "verify-cert", "oracle-selftest", "search-min-n", "walls",
)

# exit code for a certificate that fails verify-cert; a failure on our own output is a SoundnessError
REJECTED_EXIT_CODE = 1

ORACLE_MAX_POWER = 3
ORACLE_MAX_EXPONENT = 6
ORACLE_PRIMES = (3, 5, 7, 11, 13)


def _wall(wall) -> dict:
    return {"I": list(wall.index_set), "generator": list(wall.generator.coords)}


def _weight(w: morita.FpWeight) -> dict:
    return w.export_to_dict()


def _unimodular_action(problem: ProblemInput) -> TorusAction:
    action = problem.action()
    if not is_unimodular(action):
        raise InputError("pi is not unimodular: some nonzero maximal minor is not +-1")
    return action


def _vertices(action, delta):
    vertices = enumerate_vertices(build_P(action, delta))
    if not vertices:
        raise InputError(f"empty polyhedron: P_delta has no vertices for delta = {list(delta.coords)}")
    return vertices


def _verified(cert: morita.Certificate, problem: ProblemInput, env: HypertoricEnv) -> dict:
    cert = cert.bound_to(input_hash(problem))
    verification = morita.verify_certificate(cert, env, input_hash=cert.input_hash)
    if not verification:
        raise SoundnessError(f"own certificate failed verification: {verification.trail[-1]}")
    return cert.export_to_dict()


def cmd_check_input(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    action = problem.action()
    results = {
        "action": action.export_to_dict(),
        "unimodular": is_unimodular(action),
        "walls": [_wall(w) for w in walls(action)],
    }
    if problem.delta is not None:
        delta = problem.character()
        results["delta"] = {
            "coords": list(delta.coords),
            "smooth": is_smooth_parameter(action, delta),
            "admissible": is_admissible_parameter(action, delta),
            "span_violations": [list(I) for I in span_violations(action, delta)],
        }
    if problem.p is not None:
        results["p"] = problem.p
    return results


def cmd_vertices(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    action = _unimodular_action(problem)
    delta = problem.character()
    P = build_P(action, delta)
    vertices = _vertices(action, delta)
    per_vertex, N = n_stats(vertices)

    optimum = vertex_oracle(P, [1] * (2 * action.n))
    if optimum not in vertices:
        raise SoundnessError(f"simplex optimum {optimum.coords} is not an enumerated vertex")

    return {
        "delta": list(delta.coords),
        "s": len(vertices),
        "N": N,
        "vertices": [
            {"coords": list(v.coords), "monomial": str(vertex_monomial(v)), "N_i": n_i}
            for v, n_i in zip(vertices, per_vertex)
        ],
    }


def cmd_koszul(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    action = _unimodular_action(problem)
    data = stability.koszul_data(_vertices(action, problem.character()), problem.options.m)
    if not data.is_complex():
        raise SoundnessError("Koszul differentials do not compose to zero")
    return data.export_to_dict()


def cmd_bound(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    action = _unimodular_action(problem)
    if problem.delta is not None:
        _, N = n_stats(_vertices(action, problem.character()))
        source = {"delta": problem.delta}
    else:
        search = search_min_N(action, problem.options.radius)
        N = search.N
        source = search.export_to_dict()

    results = {
        "N": N,
        "N_source": source,
        "bound_prop": morita.bound_prop(action, N),
        "bound_M": morita.bound_M(action, N),
    }
    if problem.p is not None:
        results["p"] = problem.p
        results["p_exceeds_bound_M"] = problem.p > results["bound_M"]
        results["root_count_bound"] = morita.root_count_bound(action, N, problem.p)
    return results


def cmd_bad_set(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    action = _unimodular_action(problem)
    delta, p = problem.character(), problem.prime()
    vertices = _vertices(action, delta)
    _, N = n_stats(vertices)
    a_max = problem.options.a_max or len(vertices)

    bad = morita.bad_set(action, delta, p, a_max, env)
    observed = {
        direction: morita.common_root_count(action, delta, p, 1, direction, env)
        for direction in ("gf", "fg")
    }
    results = {
        "a_max": a_max,
        "bad_set": bad.export_to_dict(),
        "size": len(bad),
        "common_roots_a1": observed,
    }
    if is_admissible_parameter(action, delta):
        results["root_count_bound"] = morita.root_count_bound(action, N, p)
    return results


def cmd_certify(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    action = _unimodular_action(problem)
    delta, p = problem.character(), problem.prime()
    strategy = problem.options.strategy

    if problem.options.lam is not None:
        outcome = morita.certify(action, delta, p, problem.options.lam, strategy, env)
        if isinstance(outcome, morita.Refusal):
            return {"certified": False, "refusal": outcome.export_to_dict()}
        return {"certified": True, "certificate": _verified(outcome, problem, env)}

    certified = morita.certified_weights(action, delta, p, strategy, env)
    certificates = [
        _verified(morita.certify(action, delta, p, w, strategy, env), problem, env)
        for w in certified[:problem.options.samples]
    ]
    return {
        "strategy": strategy,
        "p": p,
        "total": p ** action.d,
        "certified_count": len(certified),
        "certified": [_weight(w) for w in certified],
        "certificates": certificates,
    }


def cmd_scan_primes(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    action = _unimodular_action(problem)
    delta = problem.character()
    if problem.options.p_range is None:
        raise InputError("scan-primes needs --p-range LO..HI")
    lo, hi = problem.options.p_range

    table = morita.scan_primes(action, delta, list(primerange(lo, hi + 1)),
                               problem.options.strategy, env, problem.options.samples)
    return {
        "strategy": problem.options.strategy,
        "p_range": [lo, hi],
        "rows": table.rows,
        "certificates": {
            str(p): [_verified(c, problem, env) for c in certs if isinstance(c, morita.Certificate)]
            for p, certs in table.certificates.items()
        },
        "_table": table.to_frame(),
    }


def cmd_stability_table(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    action = _unimodular_action(problem)
    delta, q = problem.character(), problem.options.q
    unstable = stability.unstable_table(action, delta, q, env)
    return {
        "q": q,
        "points": q ** (2 * action.n),
        "unstable_count": len(unstable),
        "minimal_semistable_supports": [
            sorted(S.indices) for S in stability.minimal_semistable_supports(action, delta, env)
        ],
        "vertex_monomials_cut_out_unstable_locus":
            stability.check_unstable_generators(action, delta, q, env),
    }


def cmd_oracle_selftest(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    """Cross-check every fast path against its slow oracle; any mismatch is a SoundnessError."""
    action = _unimodular_action(problem)
    delta = problem.character()
    vertices = _vertices(action, delta)
    a_max = min(problem.options.a_max or ORACLE_MAX_POWER, ORACLE_MAX_POWER)
    checks = []

    for m in range(ORACLE_MAX_EXPONENT + 1):
        xd = weyl.weyl_multiply(weyl.x_power(1, 1, m), weyl.d_power(1, 1, m))
        dx = weyl.weyl_multiply(weyl.d_power(1, 1, m), weyl.x_power(1, 1, m))
        if xd != weyl.system_to_weyl(weyl.normal_order_xd(m)) or dx != weyl.system_to_weyl(weyl.normal_order_dx(m)):
            raise SoundnessError(f"normal-ordering identity fails at m = {m}")
    checks.append(f"normal ordering m=0..{ORACLE_MAX_EXPONENT}")

    for v in vertices:
        for a in range(1, a_max + 1):
            if weyl.product_fg(v, a) != weyl.system_to_weyl(weyl.factor_system_fg(v, a)):
                raise SoundnessError(f"f g factorization fails for vertex {v.coords}, a = {a}")
            if weyl.product_gf(v, a) != weyl.system_to_weyl(weyl.factor_system_gf(v, a)):
                raise SoundnessError(f"g f factorization fails for vertex {v.coords}, a = {a}")
    checks.append(f"factor systems for {len(vertices)} vertices, a=1..{a_max}")

    primes = [problem.p] if problem.p is not None else list(ORACLE_PRIMES)
    for p in primes:
        for a in range(1, a_max + 1):
            for direction in ("gf", "fg"):
                systems = morita.factor_systems(vertices, a, direction)
                if roots.common_roots_solve(systems, p, action.n, env) != roots.common_roots_brute(systems, p, action.n, env):
                    raise SoundnessError(f"solvers disagree at p = {p}, a = {a}, {direction}")
    checks.append(f"solver equivalence for p in {primes}")

    optimum = vertex_oracle(build_P(action, delta), [1] * (2 * action.n))
    if optimum not in vertices:
        raise SoundnessError(f"simplex optimum {optimum.coords} is not an enumerated vertex")
    checks.append("simplex optimum is a vertex")

    return {"passed": True, "checks": checks}


def cmd_search_min_n(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    return search_min_N(_unimodular_action(problem), problem.options.radius).export_to_dict()


def cmd_walls(problem: ProblemInput, env: HypertoricEnv, verbose: bool) -> dict:
    action = problem.action()
    return {
        "constrained": [_wall(w) for w in walls(action, convention="constrained")],
        "complement": [_wall(w) for w in walls(action, convention="complement")],
    }


HANDLERS = {
    "check-input": cmd_check_input,
    "vertices": cmd_vertices,
    "koszul": cmd_koszul,
    "bound": cmd_bound,
    "bad-set": cmd_bad_set,
    "certify": cmd_certify,
    "scan-primes": cmd_scan_primes,
    "stability-table": cmd_stability_table,
    "oracle-selftest": cmd_oracle_selftest,
    "search-min-n": cmd_search_min_n,
    "walls": cmd_walls,
}


def _certificates_in(body: dict) -> tuple[list, Optional[str]]:
    """Certificate bodies in a certificate or a report, and the report's input hash if any."""
    if body.get("kind") == "certificate":
        return [body], None
    results = body.get("results")
    if not isinstance(results, dict):
        return [], None

    found = [results["certificate"]] if "certificate" in results else []
    listed = results.get("certificates", [])
    if isinstance(listed, dict):
        # scan-primes groups certificates by prime
        for key in sorted(listed, key=str):
            found.extend(listed[key] if isinstance(listed[key], list) else [listed[key]])
    elif isinstance(listed, list):
        found.extend(listed)
    return found, body.get("input_hash")


def verify_cert(text: str, env: HypertoricEnv) -> CommandResponse:
    """verify-cert takes a certificate, or a report holding certificates, instead of a ProblemInput."""
    try:
        body = json.loads(text)
    except json.JSONDecodeError as e:
        return error_response(f"malformed certificate at line {e.lineno}: {e.msg}", InputError.exit_code)

    if not isinstance(body, dict):
        return error_response("certificate input must be a JSON object", InputError.exit_code)
    found, report_hash = _certificates_in(body)
    if not found:
        return error_response("no certificate found in input", InputError.exit_code)

    outcomes = []
    for cert_body in found:
        verification = morita.verify_certificate(morita.Certificate.from_dict(cert_body), env, input_hash=report_hash)
        outcomes.append({"digest": cert_body.get("digest", ""), "valid": verification.ok,
                         "trail": verification.trail})

    report = Report(command="verify-cert", input_hash="sha256:" + sha256_canonical_json(body),
                    results={"certificates": outcomes})
    if not all(o["valid"] for o in outcomes):
        response = error_response("certificate rejected", REJECTED_EXIT_CODE)
        response.report = report
        return response
    return success_response(f"{len(outcomes)} certificate(s) verified", report)


def run_command(cmd: str, problem: ProblemInput, env: Optional[HypertoricEnv] = None,
                verbose: bool = False) -> CommandResponse:
    if cmd not in HANDLERS:
        return error_response(f"unknown command {cmd!r}", InputError.exit_code)
    env = env or HypertoricEnv(guard_points=problem.options.guard_points)

    start = time.perf_counter()
    try:
        results = HANDLERS[cmd](problem, env, verbose)
    except ToolboxError as e:
        return error_response(f"{cmd}: {e}", e.exit_code)

    table = results.pop("_table", None)
    if verbose:
        results["walls_both_conventions"] = cmd_walls(problem, env, verbose)
    report = Report(command=cmd, input_hash=input_hash(problem), results=results,
                    elapsed=time.perf_counter() - start, table=table)

    if results.get("certified") is False:
        refusal = results["refusal"]
        return refused_response(
            f"lambda = {refusal['lambda_signed']} blocked at step {refusal['index']} "
            f"({refusal['direction']}, a = {refusal['a']}) by xi = {refusal['xi']}",
            report,
        )
    return success_response(f"{cmd} completed", report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypertoric",
        description="Certify derived localization for hypertoric QHR in characteristic p.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", required=True, help="ProblemInput JSON file, or a certificate for verify-cert")
    parser.add_argument("--strategy", choices=morita.STRATEGIES)
    parser.add_argument("--p", type=int)
    parser.add_argument("--p-range", help="LO..HI")
    parser.add_argument("--lambda", dest="lam", help="comma-separated residues")
    parser.add_argument("--radius", type=int)
    parser.add_argument("--q", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument("--format", default="json", choices=formats.get_available_formats(reports_only=True))
    parser.add_argument("--table-format", choices=formats.get_available_formats(),
                        help="also write the scan table next to --out")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--guard-points", type=int)
    parser.add_argument("--verbose", action="store_true")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    overrides, options = {}, {}
    if args.p is not None:
        overrides["p"] = args.p
    for name in ("strategy", "radius", "q", "m", "guard_points"):
        if getattr(args, name) is not None:
            options[name] = getattr(args, name)
    if args.p_range:
        options["p_range"] = parse_p_range(args.p_range)
    if args.lam:
        options["lambda"] = parse_weight(args.lam)
    if options:
        overrides["options"] = options
    return overrides


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        text = Path(args.input).read_text(encoding="utf-8")
    except OSError as e:
        return error_response(f"cannot read {args.input}: {e}", InputError.exit_code).exit_code

    try:
        if args.command == "verify-cert":
            response = verify_cert(text, HypertoricEnv(guard_points=args.guard_points))
        else:
            problem = parse_input(text, _overrides(args))
            response = run_command(args.command, problem, verbose=args.verbose)
    except ToolboxError as e:
        return error_response(str(e), e.exit_code).exit_code

    report = response.report
    if report is not None:
        if args.out:
            save_report(report, args.out, args.format)
            if args.table_format and report.table is not None:
                out = Path(args.out)
                save_df(report.table, out.stem + "_table", out.parent, args.table_format)
        else:
            sys.stdout.write(report.render(args.format))
    return response.exit_code


if __name__ == "__main__":
    sys.exit(main())
