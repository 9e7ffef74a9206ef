from __future__ import annotations

import cmath
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from anticyc.exactnum import (
    CycInt,
    PadicNum,
    Poly,
    cyc_embed,
    exp_of_p,
    log_over_p,
    one_unit_part,
    poly_divides,
    teichmuller,
)

CONDUCTORS = [1, 3, 4, 5, 8, 12, 15]


def cyc(m):
    return st.lists(st.integers(-20, 20), min_size=1, max_size=8).map(lambda v: CycInt(m, v))


def cyc_any():
    return st.sampled_from(CONDUCTORS).flatmap(cyc)


def close(a, b, tol=1e-8):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# --- CycInt ------------------------------------------------------------------


def test_zeta3_embeds_as_zeta12_to_the_fourth():
    assert cyc_embed(CycInt.zeta(3), 12) == CycInt.zeta(12, 4)


def test_one_embeds_to_one():
    for m2 in (4, 9, 30):
        assert cyc_embed(CycInt.one(), m2) == CycInt.one(m2)


def test_embed_square_descend_matches_direct_square():
    x = CycInt.zeta(5) + CycInt.zeta(5, 4)
    y = cyc_embed(x, 15)
    sq = (y * y).descend()
    # oracle: polynomial arithmetic mod Phi_5 on coefficient vectors
    direct = x * x
    assert sq == direct and sq.m == 5
    assert close(sq.to_complex(), x.to_complex() ** 2)


def test_embed_rejects_non_multiple():
    with pytest.raises(ValueError):
        cyc_embed(CycInt.zeta(3), 10)


@given(cyc_any(), cyc_any(), cyc_any())
def test_cyc_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x


@given(cyc_any(), cyc_any())
def test_cyc_agrees_with_complex_embedding(x, y):
    # oracle: evaluate at exp(2 pi i / m) in floating point
    assert close((x * y).to_complex(), x.to_complex() * y.to_complex(), 1e-7)
    assert close((x + y).to_complex(), x.to_complex() + y.to_complex(), 1e-7)


@given(st.sampled_from([3, 5, 8, 12]).flatmap(cyc), st.sampled_from([15, 24, 40, 60]))
def test_embed_is_ring_hom(x, m2):
    if m2 % x.m:
        return
    y = x * x + x
    assert cyc_embed(y, m2) == cyc_embed(x, m2) * cyc_embed(x, m2) + cyc_embed(x, m2)
    assert cyc_embed(x, m2).descend() == x.descend()


def test_roots_of_unity_power():
    for m in (3, 7, 12):
        z = CycInt.zeta(m)
        assert z**m == CycInt.one(m)
        assert z ** (m - 1) * z == CycInt.one(m)


def test_norm_of_zeta3_minus_zeta3_squared_is_three():
    x = CycInt.zeta(3) - CycInt.zeta(3, 2)
    assert x.norm() == 3


# --- PadicNum --------------------------------------------------------------------


def padic(p=5, d=2, prec=6):
    mod = p**prec
    return st.tuples(st.integers(0, mod - 1), st.integers(0, mod - 1)).map(lambda t: PadicNum(p, d, prec, *t))


def unit(p=5, d=2, prec=6):
    return padic(p, d, prec).filter(lambda x: x.is_unit())


@given(padic(), padic(), padic())
def test_padic_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@given(unit())
def test_padic_inverse(x):
    assert x * x.inverse() == PadicNum(5, 2, 6, 1)


def _teich_oracle(x: PadicNum) -> PadicNum:
    # x -> x^(p^d) converges to the Teichmuller lift
    q = x.p**x.d
    y = x
    for _ in range(x.prec + 1):
        y = y**q
    return y


def test_teichmuller_of_two_mod_625():
    x = PadicNum(5, 1, 4, 2)
    w = teichmuller(x)
    assert w**4 == PadicNum(5, 1, 4, 1)
    assert w.a % 5 == 2
    assert w == _teich_oracle(x)


def test_teichmuller_fixed_points():
    assert teichmuller(PadicNum(5, 1, 6, 1)) == PadicNum(5, 1, 6, 1)
    assert teichmuller(PadicNum(5, 1, 6, -1)) == PadicNum(5, 1, 6, -1)


@given(unit(), unit())
def test_teichmuller_multiplicative_and_matches_oracle(x, y):
    assert teichmuller(x * y) == teichmuller(x) * teichmuller(y)
    assert teichmuller(x) == _teich_oracle(x)
    u = one_unit_part(x)
    assert (u.a - 1) % 5 == 0 and u.b % 5 == 0


def test_teichmuller_rejects_nonunit():
    with pytest.raises(ValueError):
        teichmuller(PadicNum(5, 2, 4, 5))


@given(unit(prec=8))
def test_padic_precision_contract(x):
    # computing at precision 8 then reducing agrees with computing at precision 4
    lo = x.reduce(4)
    assert (x * x + x.inverse()).reduce(4) == lo * lo + lo.inverse()


@given(padic(prec=7))
def test_log_exp_round_trip_on_one_units(x):
    u = PadicNum(5, 2, 7, 1) + x * 5
    y = log_over_p(u)
    assert exp_of_p(y, 7).reduce(6) == u.reduce(6)


def test_division_by_p_is_refused():
    with pytest.raises(ZeroDivisionError):
        PadicNum(5, 1, 4, 1) / PadicNum(5, 1, 4, 5)


# --- Poly ----------------------------------------------------------------


def test_poly_divides_examples():
    assert poly_divides(4, Poly([8, 0, 4]))
    q = 11
    assert poly_divides(q - 1, Poly([1 - q]))
    f = Poly([CycInt.zeta(3) - CycInt.zeta(3, 2)], "cyc")
    assert not poly_divides(2, f)


def test_poly_divides_rejects_rationals():
    with pytest.raises(TypeError):
        poly_divides(2, Poly([Fraction(1, 2)], "rational"))


@given(st.lists(st.integers(-9, 9), max_size=5), st.lists(st.integers(-9, 9), max_size=5), st.lists(st.integers(-9, 9), max_size=5))
def test_poly_ring_axioms(a, b, c):
    A, B, C = Poly(a), Poly(b), Poly(c)
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    if A.coeffs and B.coeffs:
        assert (A * B).degree == A.degree + B.degree


def test_poly_evaluation():
    rng = random.Random(3)
    for _ in range(50):
        a = [rng.randint(-5, 5) for _ in range(4)]
        x = rng.randint(-4, 4)
        assert Poly(a)(x) == sum(c * x**i for i, c in enumerate(a))
