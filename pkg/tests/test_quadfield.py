from __future__ import annotations

import math
import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from anticyc.abgroup import FiniteAbelianGroup, smith_normal_form
from anticyc.quadfield import (
    QuadField,
    QuadIdeal,
    class_group,
    ideal_mul,
    ideals_of_norm,
    is_fundamental_discriminant,
    kronecker,
    reduced_forms,
    splitting,
)


def count_reduced_forms(disc: int) -> int:
    """Independent oracle: primitive reduced forms |b| <= a <= c, b >= 0 if |b| = a or a = c."""
    n = 0
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            n += 1
        a += 1
    return n


def sublattice_ideals(K: QuadField, n: int) -> int:
    """Independent oracle: HNF sublattices of index n in Z + Z w closed under multiplication by w."""
    count = 0
    for a in sympy.divisors(n):
        c = n // a
        for b in range(a):
            I = QuadIdeal(K.maximal_order(), a, b, c)
            if I.is_ideal():
                count += 1
    return count


# --- splitting -----------------------------------------------------------------


def test_splitting_examples(K7):
    assert splitting(K7, 5).is_inert
    assert splitting(K7, 7).is_ramified
    s = splitting(K7, 11)
    assert s.is_split and all(P.norm() == 11 for P in s.primes)


def test_splitting_rejects_composite(K7):
    with pytest.raises(ValueError):
        splitting(K7, 15)


def test_splitting_matches_squares_mod_q(K7):
    for q in sympy.primerange(3, 400):
        if q == 7:
            continue
        is_sq = any((x * x + 7) % q == 0 for x in range(q))
        assert splitting(K7, q).is_split == is_sq


def test_split_density(K7):
    ps = [q for q in sympy.primerange(3, 10**4) if q != 7]
    split = sum(1 for q in ps if splitting(K7, q).is_split)
    assert abs(split / len(ps) - 0.5) < 0.05


# --- ideals ---------------------------------------------------------------------


def test_prime_times_conjugate_is_principal(K7):
    for q in (2, 11, 23, 29):
        P, Pb = splitting(K7, q).primes
        prod = ideal_mul(P, Pb)
        assert prod == QuadIdeal(K7.maximal_order(), q, 0, q)
        assert prod.norm() == q * q


def test_unit_ideal_is_identity(K7):
    O = K7.maximal_order()
    for I in ideals_of_norm(O, 88):
        assert ideal_mul(I, O.unit_ideal()) == I


def test_norm_multiplicative_random_pairs_d23():
    K = QuadField(23)
    O = K.maximal_order()
    rng = random.Random(5)
    pool = [I for n in range(1, 60) for I in ideals_of_norm(O, n)]
    for _ in range(200):
        I, J = rng.choice(pool), rng.choice(pool)
        IJ = ideal_mul(I, J)
        assert IJ.norm() == I.norm() * J.norm()
        assert IJ.is_ideal()
        # brute force: the product contains every product of basis elements
        for x in I.basis():
            for y in J.basis():
                assert IJ.contains(K.mul(x, y))


def test_ideals_of_norm_examples(K7):
    O = K7.maximal_order()
    assert len(ideals_of_norm(O, 11)) == 2
    assert ideals_of_norm(O, 5) == []
    assert len(ideals_of_norm(O, 8)) == sublattice_ideals(K7, 8)


@pytest.mark.parametrize("D", [7, 23, 4, 3])
def test_ideal_counts_match_sublattice_oracle(D):
    K = QuadField(D)
    O = K.maximal_order()
    for n in range(1, 501):
        got = ideals_of_norm(O, n)
        assert len(set(got)) == len(got)
        if n <= 120:
            assert len(got) == sublattice_ideals(K, n)
        # Dirichlet-series identity zeta_K = zeta * L(eps_K)
        assert len(got) == sum(int(kronecker(K.d, e)) for e in sympy.divisors(n))


# --- class groups -----------------------------------------------------------------


def test_class_group_examples():
    assert class_group(QuadField(7).maximal_order()).group.order() == 1
    G = class_group(QuadField(23).maximal_order()).group
    assert G.invariants == (3,)
    assert class_group(QuadField(7).order(2)).group.order() == count_reduced_forms(-28) == 1


def test_reduced_forms_agree_with_oracle():
    for D in range(4, 400):
        if is_fundamental_discriminant(-D):
            assert len(reduced_forms(-D)) == count_reduced_forms(-D)


def test_class_group_is_homomorphism():
    K = QuadField(71)  # h = 7
    O = K.maximal_order()
    cg = class_group(O)
    rng = random.Random(1)
    pool = [I for n in range(1, 80) for I in ideals_of_norm(O, n)]
    G = cg.group
    for _ in range(1000):
        I, J = rng.choice(pool), rng.choice(pool)
        assert cg.class_of(ideal_mul(I, J)) == G.add(cg.class_of(I), cg.class_of(J))


def test_class_number_formula_for_orders(K7):
    for f in range(1, 40):
        O = K7.order(f)
        assert class_group(O).group.order() == O.class_number_formula()
        assert class_group(O).group.order() == count_reduced_forms(f * f * -7)


# --- finite abelian groups ------------------------------------------------------------


@given(st.lists(st.lists(st.integers(-12, 12), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_normal_form(rows):
    D, U, V = (sympy.Matrix(x) for x in smith_normal_form(rows))
    assert U * sympy.Matrix(rows) * V == D
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    assert D.is_diagonal()
    diag = [abs(D[i, i]) for i in range(3)]
    for i in range(2):
        if diag[i + 1]:
            assert diag[i] and diag[i + 1] % diag[i] == 0
        else:
            assert all(x == 0 for x in diag[i + 1 :])


@given(st.lists(st.sampled_from([2, 3, 4, 5, 6, 9, 25]), min_size=1, max_size=3))
def test_group_elements_and_sqrt(invs):
    G = FiniteAbelianGroup(invs)
    assert len(G.elements()) == G.order() == math.prod(invs)
    odd = FiniteAbelianGroup([d for d in invs if d % 2])
    for x in odd.elements()[:50]:
        y = odd.sqrt(x)
        assert odd.add(y, y) == odd.reduce(x)


def test_exponent_of_non_chain_invariants():
    assert FiniteAbelianGroup([3, 25]).exponent() == 75
    assert FiniteAbelianGroup([5, 25]).exponent() == 25
    assert FiniteAbelianGroup([]).exponent() == 1
