from dataclasses import replace
from itertools import product
from math import comb

import pytest

from hypertoric_toolbox.core import InputError
from hypertoric_toolbox.lattice import Character, TildeCharacter, is_admissible_parameter, restrict_tilde_character
from hypertoric_toolbox.polytope import (
    build_P,
    enumerate_vertices,
    n_stats,
    search_min_N,
    vertex_monomial,
    vertex_oracle,
    vertices_of,
)


def coords(vertices):
    return [v.coords for v in vertices]


def test_build_P(diagonal, a3):
    P = build_P(diagonal, Character((1,)))
    assert P.matrix == ((1, 1, -1, -1),)
    assert P.contains((1, 0, 0, 0))
    assert P.contains((1, 1, 1, 0))
    assert not P.contains((2, 0, 0, 0))
    assert not P.contains((-1, 2, 0, 0))

    assert len(build_P(a3, Character((1, 1))).matrix) == 2
    with pytest.raises(InputError):
        build_P(a3, Character((1,)))


def test_vertices_diagonal(diagonal):
    assert coords(vertices_of(diagonal, Character((1,)))) == [(1, 0, 0, 0), (0, 1, 0, 0)]
    # (1, 1, 0, 0) is a midpoint, not a vertex
    assert coords(vertices_of(diagonal, Character((2,)))) == [(2, 0, 0, 0), (0, 2, 0, 0)]
    assert coords(vertices_of(diagonal, Character((-1,)))) == [(0, 0, 1, 0), (0, 0, 0, 1)]
    assert coords(vertices_of(diagonal, Character((0,)))) == [(0, 0, 0, 0)]


def test_vertices_a3(a3):
    assert coords(vertices_of(a3, Character((1, 1)))) == [(1, 1, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0)]
    assert coords(vertices_of(a3, Character((1, 2)))) == [
        (1, 2, 0, 0, 0, 0),
        (0, 1, 1, 0, 0, 0),
        (0, 0, 2, 1, 0, 0),
    ]


def test_vertices_lie_in_P(a3):
    for x in range(-2, 3):
        for y in range(-2, 3):
            P = build_P(a3, Character((x, y)))
            vertices = enumerate_vertices(P)
            assert vertices
            assert len(set(vertices)) == len(vertices)
            assert all(P.contains(v.coords) for v in vertices)


def test_vertex_monomial(diagonal):
    v, = [v for v in vertices_of(diagonal, Character((1,))) if v.coords[0]]
    monomial = vertex_monomial(v)
    assert monomial.x_exponents == (1, 0)
    assert monomial.d_exponents == (0, 0)
    assert str(monomial) == "x1"
    assert str(vertex_monomial(vertices_of(diagonal, Character((-1,)))[0])) == "d1"
    assert str(vertex_monomial(vertices_of(diagonal, Character((0,)))[0])) == "1"


def test_n_stats(diagonal):
    assert n_stats(vertices_of(diagonal, Character((1,)))) == ((1, 1), 1)
    assert n_stats(vertices_of(diagonal, Character((2,))))[1] == 2
    assert n_stats(vertices_of(diagonal, Character((0,))))[1] == 0
    with pytest.raises(InputError, match="empty polyhedron"):
        n_stats([])


def test_search_min_N_diagonal(diagonal):
    search = search_min_N(diagonal, 3)
    assert search.delta == Character((-1,))
    assert search.N == 1
    assert (search.scanned, search.admissible) == (7, 6)

    assert search_min_N(diagonal, 1).N == 1
    with pytest.raises(InputError):
        search_min_N(diagonal, 0)


def test_search_min_N_a3(a3):
    search = search_min_N(a3, 2)
    assert search.N == 2
    assert is_admissible_parameter(a3, search.delta)
    assert n_stats(vertices_of(a3, search.delta))[1] == 2
    assert search.export_to_dict()["truncated"] is True


def test_vertex_oracle_agrees_with_enumeration(diagonal, a3):
    P = build_P(a3, Character((1, 2)))
    assert vertex_oracle(P, [1] * 6).coords == (0, 1, 1, 0, 0, 0)

    for action, deltas in ((diagonal, [(1,), (2,), (-3,)]), (a3, [(1, 2), (2, 1), (1, -1), (-2, -1)])):
        for delta in deltas:
            P = build_P(action, Character(delta))
            vertices = enumerate_vertices(P)
            for weights in ([1] * (2 * action.n), list(range(1, 2 * action.n + 1))):
                assert vertex_oracle(P, weights) in vertices


def admissible_deltas(action, radius=2):
    for delta in product(range(-radius, radius + 1), repeat=action.d):
        if is_admissible_parameter(action, Character(delta)):
            yield Character(delta)


def test_vertices_restrict_to_delta(diagonal, a3):
    for action in (diagonal, a3):
        for delta in admissible_deltas(action):
            vertices = vertices_of(action, delta)
            assert len(vertices) <= comb(action.n, action.d)
            for v in vertices:
                assert restrict_tilde_character(action, TildeCharacter(v.coords)) == delta


def test_vertices_ignore_equality_row_order(a3):
    for delta in admissible_deltas(a3):
        P = build_P(a3, delta)
        swapped = replace(P, delta=Character(delta.coords[::-1]), matrix=P.matrix[::-1])
        assert coords(enumerate_vertices(swapped)) == coords(enumerate_vertices(P))
