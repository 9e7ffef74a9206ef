from __future__ import annotations

import pytest
import sympy

from anticyc.newform import NewformFormatError, parse_newform


def ap_by_point_count(p: int) -> int:
    """a_p of y^2 + xy = x^3 + x^2 - 11x (the curve 33a1) by counting points over F_p."""
    count = 1
    for x in range(p):
        for y in range(p):
            if (y * y + x * y - x**3 - x * x + 11 * x) % p == 0:
                count += 1
    return p + 1 - count


def test_bundled_33a1_matches_point_counts(newform33):
    assert newform33.level == 33 and newform33.weight == 2 and newform33.is_rational
    for p in sympy.primerange(2, 200):
        if p in (3, 11):
            continue
        assert newform33.a(p) == ap_by_point_count(p), p
    assert [newform33.a(q) for q in (2, 3, 5, 7, 11, 13)] == [1, -1, -2, 4, 1, -2]


def test_bundled_bound(newform33):
    assert newform33.bound >= 10000
    with pytest.raises(IndexError):
        newform33.a(newform33.bound + 1)


HEAD = "label t\nweight 2\nlevel 11\nbase-field Q\n"


def test_parse_errors():
    with pytest.raises(NewformFormatError):
        parse_newform("weight 2\nlevel 11\nbase-field Q\n1 1\n")
    with pytest.raises(NewformFormatError):
        parse_newform(HEAD + "1 1\n3 -1\n")
    with pytest.raises(NewformFormatError):
        parse_newform(HEAD + "1 x\n")
    with pytest.raises(NewformFormatError):
        parse_newform(HEAD)


def test_validation():
    nf = parse_newform(HEAD + "1 1\n2 -2\n3 -1\n4 2\n5 1\n6 2\n")
    nf.validate()
    with pytest.raises(NewformFormatError):
        parse_newform(HEAD + "1 2\n").validate()
    with pytest.raises(NewformFormatError):
        parse_newform(HEAD + "1 1\n2 -2\n3 -1\n4 2\n5 1\n6 3\n").validate()
    with pytest.raises(NewformFormatError):
        parse_newform(HEAD + "1 1\n2 -3\n").validate()


def test_quadratic_coefficient_field():
    text = "label 23a\nweight 2\nlevel 23\nbase-field x^2+x-1\n1 1 0\n2 0 1\n3 -1 -2\n"
    nf = parse_newform(text)
    assert not nf.is_rational
    assert nf.a(2) == (0, 1)
    roots = sorted(r.real for r in nf.roots())
    assert roots[0] == pytest.approx((-1 - 5**0.5) / 2)
    vals = nf.embedded(0)
    assert vals[2] == pytest.approx(nf.roots()[0])
