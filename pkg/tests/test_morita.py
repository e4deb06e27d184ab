from dataclasses import replace

import pytest
from sympy import nextprime, primerange

from hypertoric_toolbox.core import GuardExceeded, HypertoricEnv, InputError
from hypertoric_toolbox.lattice import Character, signature_action
from hypertoric_toolbox.morita import (
    Certificate,
    FpWeight,
    Refusal,
    Step,
    bad_set,
    bound_M,
    bound_prop,
    certified_count,
    certified_weights,
    certify,
    certify_chain,
    certify_direct,
    common_root_count,
    first_certified,
    mu_dual,
    root_count_bound,
    scan_primes,
    signature_bad_set,
    signed_lift,
    single_step_relation,
    strategy_bad_set,
    verify_certificate,
)
from hypertoric_toolbox.polytope import n_stats, search_min_N, vertices_of


def residues(weights):
    return {w.coords[0] for w in weights}


def test_signed_lift():
    assert [signed_lift(x, 7) for x in range(7)] == [0, 1, 2, 3, -3, -2, -1]
    assert FpWeight((-1, 9), 7).coords == (6, 2)
    assert FpWeight((4,), 7).signed == (-3,)


def test_mu_dual(a3):
    assert mu_dual(a3, (1, 2, 3), 5).coords == (4, 0)
    with pytest.raises(InputError):
        mu_dual(a3, (1, 2), 5)


def test_bounds(diagonal, a3):
    assert bound_prop(diagonal, 1) == 4
    assert bound_M(diagonal, 1) == 36
    assert bound_M(a3, 1) == 882
    assert bound_M(a3, 2) == 3042
    assert bound_prop(a3, 2) == 3 * 4 ** 2
    assert root_count_bound(a3, 2, 7) == 3 * 16 * 7
    with pytest.raises(InputError):
        bound_M(a3, -1)


def test_bad_set_diagonal(diagonal, one):
    bad = bad_set(diagonal, one, 7, 1)
    assert bad.elements == {(5,), (6,)}
    assert [w.direction for w in bad.provenance[(5,)]] == ["gf"]
    assert bad.provenance[(6,)][0].xi == (0, 0)

    assert bad_set(diagonal, one, 7, 2).elements == {(0,), (3,), (4,), (5,), (6,)}
    assert len(bad_set(diagonal, one, 7, 0)) == 0


def test_bad_set_preconditions(diagonal, a3):
    with pytest.raises(InputError, match="not a smooth parameter"):
        bad_set(diagonal, Character((0,)), 7, 1)
    with pytest.raises(InputError, match="not a smooth parameter"):
        bad_set(a3, Character((1, 1)), 7, 1)
    with pytest.raises(InputError, match="p must be prime"):
        bad_set(diagonal, Character((1,)), 8, 1)


def test_single_step_relation(diagonal, one):
    assert single_step_relation(diagonal, one, 7, (5,)) == (False, True)
    assert single_step_relation(diagonal, one, 7, (6,)) == (True, False)
    assert single_step_relation(diagonal, one, 7, (1,)) == (True, True)


def test_direct_certification(diagonal, one):
    cert = certify_direct(diagonal, one, 7, (1,))
    assert isinstance(cert, Certificate)
    assert cert.s == 2
    assert [(st.a, st.direction) for st in cert.steps] == [(1, "gf"), (1, "fg"), (2, "gf"), (2, "fg")]
    assert verify_certificate(cert)

    refusal = certify_direct(diagonal, one, 7, (0,))
    assert refusal == Refusal(strategy="direct", lam=FpWeight((0,), 7), index=2, a=2,
                              direction="fg", witness=(1, 1))
    assert residues(certified_weights(diagonal, one, 7, "direct")) == {1, 2}


def test_chain_certification(diagonal, one):
    assert residues(certified_weights(diagonal, one, 7, "chain")) == {0, 1, 2, 3}

    cert = certify_chain(diagonal, one, 7, (1,))
    assert [st.target for st in cert.steps] == [(1,), (2,), (2,), (3,)]
    assert verify_certificate(cert)

    refusal = certify_chain(diagonal, one, 7, (4,))
    assert (refusal.index, refusal.a, refusal.direction, refusal.witness) == (1, 1, "gf", (6, 6))


def test_certify_rejects_bad_lambda(diagonal, one):
    with pytest.raises(InputError, match="lambda"):
        certify_chain(diagonal, one, 7, (1, 2))
    with pytest.raises(InputError, match="strategy"):
        certify(diagonal, one, 7, (1,), "sideways")


@pytest.mark.parametrize("p", [7, 11, 13])
def test_signature_chain_matches_closed_form(diagonal, one, p):
    certified = certified_weights(diagonal, one, p, "chain")
    assert len(certified) >= p - 4
    refused = {x % p for x in (-1, -2, -3)}
    assert residues(certified) == set(range(p)) - refused
    assert strategy_bad_set(diagonal, one, p, "chain") == signature_bad_set(2, 2, p)
    for w in certified:
        assert verify_certificate(certify_chain(diagonal, one, p, w.coords))


@pytest.mark.parametrize("n,s", [(3, 1), (3, 3), (4, 2)])
def test_signature_family(n, s):
    action = signature_action(n, s)
    assert len(vertices_of(action, Character((1,)))) == n
    assert strategy_bad_set(action, Character((1,)), 11, "chain") == signature_bad_set(n, s, 11)


def test_certified_count(diagonal, one):
    assert [certified_count(diagonal, one, p, "chain") for p in (5, 7, 11)] == [2, 4, 8]
    assert certified_count(diagonal, one, 7, "direct") == 2


def test_first_certified(diagonal, one):
    assert first_certified(diagonal, one, 7, "chain") == FpWeight((0,), 7)
    assert first_certified(diagonal, one, 7, "direct") == FpWeight((1,), 7)
    assert first_certified(diagonal, one, 3, "direct") is None


def test_certified_weights_guard(diagonal, one):
    with pytest.raises(GuardExceeded, match="guard"):
        certified_weights(diagonal, one, 7, "chain", env=HypertoricEnv(guard_points=5))
    assert len(certified_weights(diagonal, one, 7, "chain", env=HypertoricEnv(guard_points=5), limit=2)) == 2


def test_root_count_bound_holds(diagonal, a3, one):
    for p in (5, 7, 11):
        assert common_root_count(diagonal, one, p, 1, "gf") <= root_count_bound(diagonal, 1, p)
        delta = Character((1, 2))
        for direction in ("gf", "fg"):
            assert common_root_count(a3, delta, p, 1, direction) <= root_count_bound(a3, 2, p)


def test_tampered_certificates_are_rejected(diagonal, one):
    cert = certify_chain(diagonal, one, 7, (1,))

    unsealed = replace(cert, lam=FpWeight((5,), 7))
    verification = verify_certificate(unsealed)
    assert not verification
    assert "digest" in verification.trail[-1]

    resealed = replace(cert, lam=FpWeight((5,), 7)).sealed()
    assert not verify_certificate(resealed)

    # steps consistent with lambda = 4, which the chain refuses at b = 1
    forged = replace(cert, lam=FpWeight((4,), 7), steps=(
        Step(0, 1, "gf", (4,), 0), Step(0, 1, "fg", (5,), 0),
        Step(1, 1, "gf", (5,), 0), Step(1, 1, "fg", (6,), 0),
    )).sealed()
    verification = verify_certificate(forged)
    assert not verification
    assert "common root" in verification.trail[-1]


def test_certificate_round_trip(diagonal, one):
    cert = certify_direct(diagonal, one, 7, (2,))
    restored = Certificate.from_dict(cert.export_to_dict())
    assert restored == cert
    assert verify_certificate(restored)
    with pytest.raises(InputError, match="malformed certificate"):
        Certificate.from_dict({"p": 7})


def test_scan_primes(diagonal, one):
    table = scan_primes(diagonal, one, [5, 6, 7, 11], "chain")
    rows = {row["p"]: row for row in table.rows}
    assert [rows[p]["certified"] for p in (5, 7, 11)] == [2, 4, 8]
    assert "InputError" in rows[6]["status"]
    assert rows[7]["samples"] == "[0] [1] [2]"
    assert all(verify_certificate(c) for certs in table.certificates.values() for c in certs)

    df = table.to_frame()
    assert list(df["p"]) == [5, 6, 7, 11]


def test_nonemptiness_above_bound_diagonal(diagonal):
    search = search_min_N(diagonal, 3)
    assert bound_M(diagonal, search.N) == 36
    for p in primerange(37, 102):
        cert = certify_direct(diagonal, search.delta, p, first_certified(diagonal, search.delta, p, "direct").coords)
        assert cert.exceeds_bound
        assert verify_certificate(cert)


def test_nonemptiness_above_bound_a3(a3):
    search = search_min_N(a3, 2)
    _, N = n_stats(vertices_of(a3, search.delta))
    p = nextprime(bound_M(a3, N))
    assert p == 3049
    found = first_certified(a3, search.delta, p, "direct")
    assert found is not None
    cert = certify_direct(a3, search.delta, p, found.coords)
    assert verify_certificate(cert)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_bad_set_grows_with_a_max(diagonal, a3, one, p):
    for action, delta in ((diagonal, one), (a3, Character((1, 2)))):
        previous = bad_set(action, delta, p, 0).elements
        for a_max in (1, 2, 3):
            current = bad_set(action, delta, p, a_max).elements
            assert previous <= current
            previous = current


def test_certificate_bound_to_input(diagonal, one):
    cert = certify_chain(diagonal, one, 7, (1,))
    assert cert.input_hash == ""
    bound = cert.bound_to("sha256:abc")
    assert bound.digest != cert.digest
    assert bound.export_to_dict()["input_hash"] == "sha256:abc"
    assert verify_certificate(bound, input_hash="sha256:abc")

    verification = verify_certificate(bound, input_hash="sha256:def")
    assert not verification
    assert "bound to input sha256:abc" in verification.trail[-1]
    assert not verify_certificate(cert, input_hash="sha256:abc")
    assert Certificate.from_dict(bound.export_to_dict()) == bound
