from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anticyc.abgroup import FiniteAbelianGroup
from anticyc.classfield import AssumptionError, RayClassGroup
from anticyc.heckechar import (
    AnticyclotomicSplitting,
    BaseCharacter,
    avatar_in_one_units,
    build_psi0,
    char_algebra,
    default_value_ring,
    dumps_character,
    enumerate_characters,
    find_gamma,
    loads_character,
    trivial_character,
)
from anticyc.quadfield import QuadField, QuadIdeal, ideal_mul, ideals_of_norm


def coprime_ideals(K, modulus, n_max):
    O = K.maximal_order()
    return [I for n in range(1, n_max) for I in ideals_of_norm(O, n) if all(not P.contains_ideal(I) for P in _primes(modulus))]


def _primes(modulus):
    from anticyc.quadfield import prime_factorization

    return list(prime_factorization(modulus))


@pytest.mark.parametrize("D,m", [(7, 5), (7, 4), (23, 5), (23, 3), (4, 5), (3, 7)])
def test_finite_order_count_equals_ray_class_number(D, m):
    K = QuadField(D)
    chars = enumerate_characters(K, (0, 0), m)
    H = RayClassGroup(K, QuadIdeal(K.maximal_order(), m, 0, m))
    assert len(chars) == H.full.order()


def test_primitive_characters_have_full_conductor(K7):
    allc = enumerate_characters(K7, (-1, 0), 25)
    prim = enumerate_characters(K7, (-1, 0), 25, primitive=True)
    assert 0 < len(prim) < len(allc)
    for psi in prim:
        assert psi.conductor() == psi.modulus
    assert any(psi.conductor() != psi.modulus for psi in allc)


@pytest.mark.parametrize("D", [7, 23, 71])
def test_principal_values_match_complex_oracle(D):
    """On (alpha) with alpha = 1 mod f, psi((alpha)) = alpha^{-a} conj(alpha)^{-b}."""
    K = QuadField(D)
    O = K.maximal_order()
    f = 5
    for psi in enumerate_characters(K, (-1, 0), f)[:6]:
        for u in range(-6, 7):
            for v in range(-3, 4):
                alpha = (1 + f * u, f * v)
                if K.norm(alpha) == 0:
                    continue
                got = psi(QuadIdeal.from_generators(O, [alpha])).to_complex()
                want = K.to_complex(alpha)
                assert abs(got - want) < 1e-9 * abs(want)


@pytest.mark.parametrize("D", [23, 71])
def test_multiplicative_and_absolute_value(D):
    K = QuadField(D)
    f = QuadIdeal(K.maximal_order(), 5, 0, 5)
    rng = random.Random(D)
    pool = coprime_ideals(K, f, 60)
    for psi in enumerate_characters(K, (-1, 0), 5)[:4]:
        for _ in range(40):
            I, J = rng.choice(pool), rng.choice(pool)
            a = psi(I).to_complex()
            b = psi(J).to_complex()
            ab = psi(ideal_mul(I, J)).to_complex()
            assert abs(ab - a * b) < 1e-8 * abs(ab)
            assert abs(abs(a) - I.norm() ** 0.5) < 1e-9 * abs(a)


def test_unit_condition_enforced(K7):
    O = K7.maximal_order()
    with pytest.raises(ValueError):
        # eps trivial on -1 but infinity type (-1, 0) needs eps(-1) = -1
        BaseCharacter(K7, (-1, 0), QuadIdeal(O, 5, 0, 5), [0], [])


def test_char_algebra(K7):
    psi1, psi2 = enumerate_characters(K7, (-1, 0), 5)[1:3]
    alg = char_algebra(psi1, psi2, 1)
    for I in coprime_ideals(K7, psi1.modulus, 40):
        v1, v2 = psi1(I).to_complex(), psi2(I).to_complex()
        assert abs(alg["product"](I).to_complex() - v1 * v2) < 1e-9 * abs(v1 * v2)
        assert abs(alg["conjugate"](I).to_complex() - psi1(I.conj()).to_complex()) < 1e-9 * abs(v1)
        assert abs(alg["inverse"](I).to_complex() * v1 - 1) < 1e-9
        assert abs(alg["norm_twist"](I).to_complex() - v1 / I.norm()) < 1e-9 * abs(v1)
    assert alg["product"].infinity_type == (-2, 0)
    assert alg["conjugate"].infinity_type == (0, -1)
    assert alg["norm_twist"].infinity_type == (0, 1)


def test_trivial_character(K7):
    one = trivial_character(K7)
    for I in ideals_of_norm(K7.maximal_order(), 22):
        assert one(I).rational_value() == 1


def test_psi0(K7):
    psi0, iota = build_psi0(K7, 5, 12)
    assert psi0.infinity_type == (-1, 0)
    assert psi0.conductor() == QuadIdeal(K7.maximal_order(), 5, 0, 5)
    assert avatar_in_one_units(psi0, iota, coprime_ideals(K7, psi0.modulus, 120))


def test_psi0_nontrivial_class_group():
    K = QuadField(23)
    psi0, iota = build_psi0(K, 5, 10)
    assert avatar_in_one_units(psi0, iota, coprime_ideals(K, psi0.modulus, 80))


def test_psi0_assumptions(K7):
    with pytest.raises(AssumptionError):
        build_psi0(K7, 11, 10)  # 11 splits
    with pytest.raises(AssumptionError):
        build_psi0(QuadField(47), 5, 10)  # h = 5


def test_find_gamma(K7):
    w = find_gamma(K7, 11, (0,) * 1)
    assert w.exists and not any(w.exponents)


def test_serialization_round_trip():
    K = QuadField(23)
    R = default_value_ring(K, 5)
    for psi in enumerate_characters(K, (-1, 0), 5, ring=R)[:5]:
        back = loads_character(dumps_character(psi))
        assert (back.eps, back.roots, back.infinity_type, back.modulus) == (psi.eps, psi.roots, psi.infinity_type, psi.modulus)
        for I in coprime_ideals(K, psi.modulus, 30):
            assert back(I) == psi(I)
    with pytest.raises(ValueError):
        loads_character("anticyc-hecke-character 99\n")


@settings(max_examples=40)
@given(st.lists(st.sampled_from([2, 3, 5, 10, 25, 30, 125]), min_size=1, max_size=3), st.randoms())
def test_anticyclotomic_splitting_round_trip(invs, rnd):
    G = FiniteAbelianGroup(invs)
    S = AnticyclotomicSplitting(G, 5)
    assert S.delta.order() * S.gamma_order == G.order()
    for _ in range(10):
        x = G.reduce([rnd.randrange(d) for d in G.invariants])
        d, g = S.split_element(x)
        assert S.combine_element(d, g) == x
        k = G.reduce([rnd.randrange(d) for d in G.invariants])
        assert S.recombine_character(*S.split_character(k)) == k
