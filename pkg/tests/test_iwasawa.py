from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anticyc.abgroup import FiniteAbelianGroup
from anticyc.exactnum import PadicNum
from anticyc.iwasawa import (
    ConjugationGroup,
    CycPadic,
    GroupCharacter,
    GroupRing,
    all_pairs,
    anticyc_project,
    eval_char,
    group_half,
    is_group_hom_on_generators,
    sigma_auto,
    sigma_checks_vectorized,
    sigma_on_pair,
    sigma_squared_is_halving,
    sigma_squared_is_identity,
    tau_project,
    tensor_ring,
    twist_by,
)

P, PREC = 5, 4


def test_sigma_example():
    G = FiniteAbelianGroup([5])
    assert sigma_on_pair(G, (1,), (1,)) == ((1,), (0,))
    assert sigma_on_pair(G, (2,), (0,)) == ((1,), (1,))


@pytest.mark.parametrize("invs", [[5], [25], [5, 5], [3, 25]])
def test_sigma_square_is_halving_not_identity(invs):
    G = FiniteAbelianGroup(invs)
    holds, bad = sigma_squared_is_identity(G, all_pairs(G))
    # sigma^2 (g, d) = (g/2, d/2), which fixes only the identity pair
    assert not holds and bad == G.order() ** 2 - 1
    assert sigma_squared_is_halving(G, all_pairs(G))


@pytest.mark.parametrize("n", [1, 2])
def test_vectorized_matches_scalar(n):
    out = sigma_checks_vectorized(5, n)
    G = FiniteAbelianGroup([5**n, 5**n])
    assert out["pairs"] == G.order() ** 2
    assert out["not_identity"] == G.order() ** 2 - 1
    assert out["halving"] and out["additive"]
    if n == 1:
        _, bad = sigma_squared_is_identity(G, all_pairs(G))
        assert bad == out["not_identity"]


def test_sigma_is_bijective_homomorphism():
    G = FiniteAbelianGroup([5, 25])
    GG = FiniteAbelianGroup.product(G, G)

    def f(z):
        s, t = sigma_on_pair(G, z[:2], z[2:])
        return s + t

    assert is_group_hom_on_generators(f, GG, GG)
    assert len({f(z) for z in GG.elements()}) == GG.order()


def test_group_half_requires_odd():
    assert group_half(FiniteAbelianGroup([25])) == 13
    with pytest.raises(ValueError):
        group_half(FiniteAbelianGroup([10]))


def _ring():
    return GroupRing(FiniteAbelianGroup([5, 5]), P, PREC)


@settings(max_examples=30)
@given(st.integers(0, 10**9))
def test_sigma_auto_is_ring_automorphism(seed):
    rng = random.Random(seed)
    base = _ring()
    T = tensor_ring(base)
    x, y = T.random(rng), T.random(rng)
    assert sigma_auto(x * y, base) == sigma_auto(x, base) * sigma_auto(y, base)
    assert sigma_auto(x + y, base) == sigma_auto(x, base) + sigma_auto(y, base)
    assert sigma_auto(T.one(), base) == T.one()
    assert sigma_auto(x, base).augmentation() == x.augmentation()


@settings(max_examples=30)
@given(st.integers(0, 10**9))
def test_characters_are_ring_homomorphisms(seed):
    rng = random.Random(seed)
    R = _ring()
    x, y = R.random(rng), R.random(rng)
    chi = GroupCharacter(R.G, [rng.randrange(5), rng.randrange(5)])
    alpha = GroupCharacter(R.G, [rng.randrange(5), rng.randrange(5)])
    assert eval_char(x * y, chi) == eval_char(x, chi) * eval_char(y, chi)
    # twisting by alpha then evaluating at chi is evaluating at alpha chi
    assert eval_char(twist_by(alpha, x), chi, P, PREC) == eval_char(x, alpha * chi)
    assert eval_char(x, GroupCharacter.trivial(R.G)) == x.augmentation()


def test_root_of_unity_arithmetic():
    z = CycPadic.root(P, PREC, Fraction(1, 5))
    one = PadicNum(P, 2, PREC, 1)
    acc = CycPadic.scalar(one)
    for _ in range(5):
        acc = acc * z
    assert acc == one
    total = CycPadic(P, PREC, 5, {k: one for k in range(5)})
    assert total == PadicNum(P, 2, PREC, 0)


def test_conjugation_model_and_tau():
    M = ConjugationGroup(5, 2)
    for g in M.G.elements()[:200]:
        assert M.tau(g) == (g[1] % 25,)
        assert M.minus.add(M.tau(g), M.tau(M.conj(g))) == M.minus.zero()
    with pytest.raises(ValueError):
        M.to_minus((1, 0))


def test_tau_project_and_anticyc_project():
    M = ConjugationGroup(5, 1)
    base = GroupRing(M.G, P, PREC)
    rng = random.Random(4)
    x = base.random(rng)
    y = tau_project(x, M)
    assert y.augmentation() == x.augmentation()
    T = tensor_ring(base)
    z = T.random(rng)
    w = anticyc_project(z, base, M)
    assert w.R.G.invariants == (5, 5)
    assert w.augmentation() == z.augmentation()
    # a pure [g] (x) [d] maps to [tau s] (x) [tau t] with (s, t) = sigma(g, d)
    g, d = (1, 2), (3, 4)
    s, t = sigma_on_pair(M.G, g, d)
    img = anticyc_project(T.basis(g + d), base, M)
    assert list(img.terms) == [M.tau(s) + M.tau(t)]


def test_group_character_with_units():
    G = FiniteAbelianGroup([5])
    u = PadicNum(P, 2, PREC, 1, 5)  # a principal unit
    u5 = u**5
    chi = GroupCharacter(G, [0], [u])
    assert chi.value((2,), P, PREC) == u * u
    assert u5.reduce(1) == PadicNum(P, 2, 1, 1)
