import random

import pytest
from sympy import Poly, symbols

from hypertoric_toolbox.core import InputError
from hypertoric_toolbox.lattice import Character
from hypertoric_toolbox.polytope import vertices_of
from hypertoric_toolbox.weyl import (
    EulerFactorSystem,
    check_prime,
    d_power,
    evaluate_factor_system,
    factor_system_fg,
    factor_system_gf,
    monomial,
    normal_order_dx,
    normal_order_xd,
    product_fg,
    product_gf,
    system_to_weyl,
    term_weights,
    vertex_pair,
    weyl_multiply,
    x_power,
)


def test_commutation_relation():
    dx = weyl_multiply(d_power(1, 1), x_power(1, 1))
    assert dx.terms == {((1,), (1,)): 1, ((0,), (0,)): 1}
    assert dx - weyl_multiply(x_power(1, 1), d_power(1, 1)) == monomial(1)


def test_variables_commute_across_coordinates():
    a = weyl_multiply(d_power(2, 1), x_power(2, 2))
    b = weyl_multiply(x_power(2, 2), d_power(2, 1))
    assert a == b
    assert str(a) == "x2*d1"


@pytest.mark.parametrize("m", range(7))
def test_normal_ordering_identities(m):
    assert weyl_multiply(x_power(1, 1, m), d_power(1, 1, m)) == system_to_weyl(normal_order_xd(m))
    assert weyl_multiply(d_power(1, 1, m), x_power(1, 1, m)) == system_to_weyl(normal_order_dx(m))


def test_normal_order_roots():
    assert normal_order_xd(3).roots == ((0, 1, 2),)
    assert normal_order_dx(3).roots == ((-3, -2, -1),)
    assert normal_order_xd(0).roots == ((),)
    with pytest.raises(InputError):
        normal_order_dx(-1)


def test_d2_x2_expansion():
    # d^2 x^2 = x^2 d^2 + 4 x d + 2
    element = weyl_multiply(d_power(1, 1, 2), x_power(1, 1, 2))
    assert element.terms == {((0,), (0,)): 2, ((1,), (1,)): 4, ((2,), (2,)): 1}


def test_factor_systems_of_vertices(diagonal, a3):
    v = vertices_of(diagonal, Character((1,)))[0]
    assert factor_system_gf(v, 1).roots == ((-1,), ())
    assert factor_system_fg(v, 1).roots == ((0,), ())
    assert factor_system_fg(v, 2).roots == ((0, 1), ())

    w = vertices_of(a3, Character((1, 2)))[2]
    assert w.coords == (0, 0, 2, 1, 0, 0)
    assert factor_system_gf(w, 1).roots == ((0,), (), (-2, -1))
    assert factor_system_fg(w, 1).roots == ((-1,), (), (0, 1))
    with pytest.raises(InputError):
        factor_system_fg(w, 0)


@pytest.mark.parametrize("a", [1, 2, 3])
def test_factor_systems_match_weyl_products(diagonal, a3, a):
    cases = [
        (diagonal, (1,)), (diagonal, (-1,)), (diagonal, (2,)),
        (a3, (1, 2)), (a3, (1, -1)), (a3, (-2, -1)),
    ]
    for action, delta in cases:
        for v in vertices_of(action, Character(delta)):
            fg, gf = product_fg(v, a), product_gf(v, a)
            assert fg.is_diagonal() and gf.is_diagonal()
            assert fg == system_to_weyl(factor_system_fg(v, a))
            assert gf == system_to_weyl(factor_system_gf(v, a))


def test_factor_system_polynomial():
    E1, = symbols("E1:2")
    assert normal_order_xd(2).polynomial() == Poly(E1**2 - E1, E1)
    system = EulerFactorSystem(((0,), (-1,)))
    assert system.n == 2
    assert system.support == (0, 1)
    assert system.factor_count == 2
    assert system.reduced(5) == (frozenset({0}), frozenset({4}))


def test_evaluate_factor_system():
    assert evaluate_factor_system(normal_order_xd(3), [2], 7) == 0
    assert evaluate_factor_system(normal_order_xd(3), [5], 7) == 4
    assert evaluate_factor_system(normal_order_dx(1), [6], 7) == 0
    with pytest.raises(InputError):
        evaluate_factor_system(normal_order_xd(1), [1, 2], 7)


def test_check_prime():
    check_prime(7)
    for bad in (1, 6, 9, True, 7.0):
        with pytest.raises(InputError, match="p must be prime"):
            check_prime(bad)


def test_modular_coefficients():
    assert monomial(1, coeff=8, modulus=7) == monomial(1, coeff=1, modulus=7)
    assert monomial(1, coeff=7, modulus=7).is_zero()
    # d^7 x^7 has constant term 7! which vanishes mod 7
    element = weyl_multiply(d_power(1, 1, 7, modulus=7), x_power(1, 1, 7, modulus=7))
    assert ((0,), (0,)) not in element.terms


def test_domain_mismatch():
    with pytest.raises(InputError, match="coefficient-domain mismatch"):
        weyl_multiply(monomial(1), monomial(1, modulus=5))
    with pytest.raises(InputError):
        monomial(1) + monomial(2)


def test_term_weights(diagonal):
    v = vertices_of(diagonal, Character((1,)))[0]
    f, g = vertex_pair(v, 1)
    assert term_weights(diagonal, f) == {Character((1,))}
    assert term_weights(diagonal, g) == {Character((-1,))}
    assert term_weights(diagonal, product_fg(v, 2)) == {Character((0,))}


def random_element(rng, n=2, max_degree=4):
    element = monomial(n, coeff=0)
    for _ in range(rng.randint(1, 3)):
        exponents, budget = [], rng.randint(0, max_degree)
        for _ in range(2 * n):
            e = rng.randint(0, budget)
            exponents.append(e)
            budget -= e
        u, w = exponents[:n], exponents[n:]
        element = element + monomial(n, u, w, coeff=rng.randint(-3, 3))
    return element


def test_multiplication_is_associative():
    rng = random.Random(20240519)
    for _ in range(30):
        a, b, c = (random_element(rng) for _ in range(3))
        assert weyl_multiply(weyl_multiply(a, b), c) == weyl_multiply(a, weyl_multiply(b, c))
