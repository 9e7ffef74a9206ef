from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy

from anticyc.classfield import AssumptionError
from anticyc.exactnum import PadicNum
from anticyc.iwasawa import CycPadic
from anticyc.quadfield import QuadField
from anticyc.quatgross import (
    CACHE_MAGIC,
    BrandtSystem,
    GrossPoints,
    algebra_for,
    class_set_and_brandt,
    corestriction_check,
    eichler_mass,
    embedding_number,
    hilbert_symbol,
    inversion_symmetry,
    load_brandt,
    optimal_embeddings_bruteforce,
    padic_valuation,
    project_padic,
    save_brandt,
    stabilized_theta,
    theta_element,
    trace_relation_check,
    unit_root,
)


def test_hilbert_product_formula():
    rng = random.Random(0)
    for _ in range(300):
        a = rng.choice([-1, 1]) * rng.randint(1, 200)
        b = rng.choice([-1, 1]) * rng.randint(1, 200)
        prod = -1 if (a < 0 and b < 0) else 1
        for l in sympy.primefactors(2 * a * b):
            prod *= hilbert_symbol(a, b, l)
        assert prod == 1, (a, b)


def test_hilbert_small_examples():
    # the Hamilton quaternions ramify at 2 only
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, 3) == 1
    # (p, p)_p = (-1 | p)
    assert hilbert_symbol(3, 3, 3) == -1 and hilbert_symbol(5, 5, 5) == 1


@pytest.mark.parametrize("N", [2, 3, 5, 7, 11, 30, 42])
def test_algebra_for(N):
    B = algebra_for(N)
    assert B.is_definite() and B.ramified_primes() == sympy.primefactors(N)


def test_algebra_for_rejects_even_count():
    with pytest.raises(AssumptionError):
        algebra_for(6)
    with pytest.raises(AssumptionError):
        algebra_for(9)


def test_brandt_11():
    s = class_set_and_brandt(11, 1, 7)
    assert s.h == 2
    assert s.mass == s.mass_sum() == Fraction(5, 12)
    B2 = sympy.Matrix(s.brandt(2))
    assert sorted(B2.eigenvals()) == [-2, 3]
    # -2 is a_2 of the elliptic curve 11a
    assert s.check_eigenvector(s.eigenvector({2: -2, 3: -1}), {2: -2, 3: -1, 5: 1, 7: -2}) == {2: True, 3: True, 5: True, 7: True}


def test_brandt_2():
    s = BrandtSystem(2, 1)
    assert s.h == 1
    assert s.weights == [24] and s.mass == Fraction(1, 24)
    assert s.brandt(3) == [[4]] and s.brandt(5) == [[6]]


def test_brandt_3_11(brandt_3_11, vector_33, newform33):
    s = brandt_3_11
    assert s.h == 2 and s.weights == [2, 2]
    assert s.mass == s.mass_sum() == eichler_mass(3, 11) == 1
    assert vector_33 == [1, -1]
    a = {q: int(newform33.a(q)) for q in (2, 5, 7, 13)}
    assert all(s.check_eigenvector(vector_33, a).values())
    assert all(s.check_eigenvector(s.eisenstein(), {q: q + 1 for q in (2, 5, 7, 13)}).values())
    assert s.commute([2, 5, 7, 13])
    for q in (2, 5, 7, 13):
        assert s.weighted_symmetric(q)
        assert all(sum(row) == q + 1 for row in s.brandt(q))


def test_eigenvector_ambiguity_reported():
    s = class_set_and_brandt(11, 1, 7)
    with pytest.raises(ArithmeticError):
        s.eigenvector({2: 5})


def test_brandt_cache_round_trip(tmp_path, brandt_3_11):
    path = tmp_path / "b.bin"
    save_brandt(brandt_3_11, str(path))
    back = load_brandt(str(path))
    assert back.h == brandt_3_11.h and back.weights == brandt_3_11.weights
    assert back.brandt(2) == brandt_3_11.brandt(2)
    raw = path.read_bytes()
    path.write_bytes(CACHE_MAGIC + bytes([raw[len(CACHE_MAGIC)] + 1]) + raw[len(CACHE_MAGIC) + 1 :])
    with pytest.raises(ValueError):
        load_brandt(str(path))


@pytest.mark.parametrize("m", [1, 5])
def test_optimal_embeddings(brandt_3_11, K7, m):
    assert optimal_embeddings_bruteforce(brandt_3_11, K7, m) == embedding_number(3, 11, K7, m)


def test_heegner_failure(brandt_3_11):
    with pytest.raises(AssumptionError):
        GrossPoints(brandt_3_11, QuadField(4), 1, 7)


def test_level_sizes(gross_7_5):
    assert len(gross_7_5.level(0).elements) == 1
    assert len(gross_7_5.level(1).elements) == 6
    assert gross_7_5.level(1).conductor == 5


@pytest.mark.parametrize("n", [0, 1])
def test_trace_relations(gross_7_5, vector_33, brandt_3_11, n):
    rep = trace_relation_check(gross_7_5, n, vector_33, -2)
    assert rep.ok, rep.details
    eis = trace_relation_check(gross_7_5, n, brandt_3_11.eisenstein(), 6, structural=False)
    assert eis.ok
    wrong = trace_relation_check(gross_7_5, n, vector_33, 3, structural=False)
    assert wrong.relation_failures == wrong.points


@pytest.mark.parametrize("n", [0, 1])
def test_corestriction(gross_7_5, vector_33, n):
    assert corestriction_check(gross_7_5, vector_33, -2, n)
    assert not corestriction_check(gross_7_5, vector_33, 1, n)


def test_unit_root():
    for a in (-2, 1, 3, 7):
        al = unit_root(a, 5, 8)
        assert al * al - al * a + 5 == PadicNum(5, 2, 8, 0)
        assert al.is_unit
    with pytest.raises(AssumptionError):
        unit_root(10, 5, 8)


def test_stabilized_theta_compatible(gross_7_5, vector_33):
    alpha = unit_root(-2, 5, 10)
    t1 = stabilized_theta(gross_7_5, vector_33, 1, alpha)
    t2 = stabilized_theta(gross_7_5, vector_33, 2, alpha)
    down = project_padic(gross_7_5, t2, 2, 1)
    assert all(down[g] == t1[g] for g in t1)
    t0 = stabilized_theta(gross_7_5, vector_33, 0, alpha)
    d0 = project_padic(gross_7_5, t1, 1, 0)
    factor = PadicNum(5, 2, 10, 1) - alpha.inverse() ** 2
    assert all(d0[g] == factor * t0[g] for g in t0)


def test_theta_inversion_symmetry(gross_7_5, vector_33):
    th = theta_element(gross_7_5, vector_33, 1, None)
    assert inversion_symmetry(th) is not None


def test_padic_valuation():
    one = PadicNum(5, 2, 6, 1)
    assert padic_valuation(CycPadic.scalar(one * 25)) == 2
    assert padic_valuation(CycPadic.scalar(one * 0)) == 6
    assert padic_valuation(CycPadic.scalar(PadicNum(5, 2, 6, 5, 3))) == 0
