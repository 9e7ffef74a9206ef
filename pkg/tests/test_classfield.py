from __future__ import annotations

import math
import random

import pytest
import sympy

from anticyc.abgroup import FiniteAbelianGroup
from anticyc.classfield import (
    AssumptionError,
    RayClassGroup,
    RingClassGroup,
    ResidueUnits,
    chosen_prime,
    decompose,
    frobenius,
    frobenius_table,
    ring_class_group_via_ray,
    sigma_map,
    tau_iso,
)
from anticyc.quadfield import QuadField, QuadIdeal, ideal_mul, ideals_of_norm, kronecker


def brute_unit_count(K: QuadField, n: int) -> int:
    """Independent oracle: residues u + v w mod n lying in no prime above n."""
    O = K.maximal_order()
    primes = []
    for q in sympy.primefactors(n):
        primes += ideals_of_norm(O, q) or [QuadIdeal(O, q, 0, q)]
    return sum(1 for u in range(n) for v in range(n) if not any(P.contains((u, v)) for P in primes))


def ring_class_formula(K: QuadField, n: int) -> int:
    """h(O_n) = h_K n prod(1 - eps(q)/q) / [O_K^x : O_n^x]."""
    from anticyc.quadfield import class_group

    h = class_group(K.maximal_order()).group.order()
    out = sympy.Rational(h * n)
    for q in sympy.primefactors(n):
        out *= 1 - sympy.Rational(kronecker(K.d, q), q)
    idx = 1 if n == 1 else K.num_units // 2
    return int(out / idx)


@pytest.mark.parametrize("D,m", [(7, 4), (7, 5), (7, 11), (23, 9), (4, 10), (3, 7)])
def test_residue_units_order(D, m):
    K = QuadField(D)
    mod = QuadIdeal(K.maximal_order(), m, 0, m)
    U = ResidueUnits(K, mod)
    assert U.order() == math.prod(U.invariants) == brute_unit_count(K, m)


@pytest.mark.parametrize("method", ["enumerate", "structured"])
def test_residue_dlog_is_homomorphism(K7, method):
    mod = QuadIdeal(K7.maximal_order(), 25 * 11, 0, 25 * 11)
    U = ResidueUnits(K7, mod, method)
    G = FiniteAbelianGroup(U.invariants)
    rng = random.Random(3)
    xs = []
    while len(xs) < 60:
        x = (rng.randrange(275), rng.randrange(275))
        if U.is_unit(x):
            xs.append(x)
    for x, y in zip(xs, xs[1:]):
        assert G.reduce(U.dlog(K7.mul(x, y))) == G.add(U.dlog(x), U.dlog(y))
    assert all(G.reduce(U.dlog(g)) != G.zero() for g in U.generators if G.order() > 1)


def test_structured_and_enumerated_agree_on_order(K7):
    mod = QuadIdeal(K7.maximal_order(), 125, 0, 125)
    a = ResidueUnits(K7, mod, "enumerate")
    b = ResidueUnits(K7, mod, "structured")
    assert math.prod(a.invariants) == math.prod(b.invariants) == 125**2 - 125**2 // 25


@pytest.mark.parametrize("D,m", [(7, 5), (7, 25), (7, 22), (23, 5), (23, 11), (4, 5), (3, 7)])
def test_ray_class_order_formula(D, m):
    K = QuadField(D)
    H = RayClassGroup(K, QuadIdeal(K.maximal_order(), m, 0, m))
    assert H.full.order() == H.order_formula()


def test_ray_class_map_is_homomorphism_and_kills_ray(K7):
    O = K7.maximal_order()
    H = RayClassGroup(K7, QuadIdeal(O, 25, 0, 25))
    G = H.full
    rng = random.Random(11)
    pool = [I for n in range(1, 90) if n % 5 for I in ideals_of_norm(O, n)]
    for _ in range(200):
        I, J = rng.choice(pool), rng.choice(pool)
        assert H.full_class_of(ideal_mul(I, J)) == G.add(H.full_class_of(I), H.full_class_of(J))
    for u in range(-40, 40):
        for v in range(-3, 4):
            alpha = (1 + 25 * u, 25 * v)
            if alpha == (0, 0):
                continue
            assert H.element_class_of(alpha) == G.zero()


@pytest.mark.parametrize("n", [1, 2, 3, 5, 11, 25, 30])
def test_ring_class_orders_three_routes(K7, n):
    R = RingClassGroup(K7, n)
    assert R.full.order() == R.order_formula() == ring_class_formula(K7, n)
    assert ring_class_group_via_ray(K7, n) == R.full.order()


def test_pic_o25_and_p_part(K7):
    R = RingClassGroup(K7, 25)
    assert R.full.invariants == (30,)
    assert RingClassGroup(K7, 25, 5).group.order() == 5
    # the p-part of H(25) is two-dimensional
    H = RayClassGroup(K7, QuadIdeal(K7.maximal_order(), 25, 0, 25), 5)
    assert H.group.invariants == (5, 5)


def test_ring_representatives_cover_classes(K7):
    R = RingClassGroup(K7, 11)
    reps = R.representatives
    assert len(reps) == R.full.order()
    for g, I in reps.items():
        assert R.full_class_of(I) == g
        assert math.gcd(I.norm(), 11) == 1


def test_frobenius_is_class_inverse(K7):
    R = RingClassGroup(K7, 25)
    for q in (2, 11, 23, 29, 37):
        Q = chosen_prime(K7, q)
        assert frobenius(Q, R).inverse().element == R.class_of(Q)


def test_decompose():
    K = QuadField(7)
    d = decompose(K, 1, 11 * 19, 5)
    assert (d.n_plus, d.n_minus) == (11, 19)
    with pytest.raises(AssumptionError):
        decompose(K, 1, 7, 5)
    with pytest.raises(AssumptionError):
        decompose(K, 19, 1, 5)
    with pytest.raises(AssumptionError):
        decompose(K, 1, 19 * 19, 5)


def test_tau_iso(K7):
    t = tau_iso(K7, 1, 11 * 19, 5)
    assert t.is_isomorphism
    assert t.H.group.order() == t.product.order()


def test_sigma_rejects_small_p(K7):
    with pytest.raises(AssumptionError):
        sigma_map(K7, 1, 11, 3)


@pytest.fixture(scope="module")
def sigma_pair():
    K = QuadField(7)
    return sigma_map(K, 1, 19, 5), sigma_map(K, 1, 19, 5, conjugated=True)


def test_frobenius_table_split_and_inert(sigma_pair):
    s, sc = sigma_pair
    K = s.K
    split = [q for q in sympy.primerange(3, 200) if q not in (5, 19) and K.is_split(q)]
    inert = [q for q in sympy.primerange(3, 200) if q not in (5, 19) and K.is_inert(q)]
    for q in split:
        rows = frobenius_table(s, sc, q)
        assert len(rows) == 8 and all(r.ok for r in rows), q
    for q in inert:
        rows = frobenius_table(s, sc, q)
        assert len(rows) == 2 and all(r.ok for r in rows), q
    with pytest.raises(AssumptionError):
        frobenius_table(s, sc, 7)


def test_frobenius_table_detects_missing_square_root(sigma_pair, monkeypatch):
    s, sc = sigma_pair
    monkeypatch.setattr(FiniteAbelianGroup, "sqrt", lambda self, x: self.reduce(x))
    bad = 0
    for q in sympy.primerange(3, 120):
        if q in (5, 7, 19):
            continue
        bad += sum(not r.ok for r in frobenius_table(s, sc, q))
    assert bad > 0
