from __future__ import annotations

import math

import pytest

from anticyc.heckechar import build_psi0, enumerate_characters, trivial_character
from anticyc.quadfield import QuadField
from anticyc.thetamods import (
    LambdaThetaFamily,
    character_power,
    export_qexpansion,
    hecke_eigenvalue,
    hecke_Tq,
    is_eigenvector,
    is_multiplicative,
    p_deplete,
    padic_equal,
    padic_theta,
    rankin_factorization_check,
    specialize_family,
    theta_series,
)


def gaussian_oracle(n: int) -> complex:
    """sum of alpha over Gaussian integers of norm n with alpha = 1 mod 2 + 2i."""
    total = 0j
    r = math.isqrt(n)
    for x in range(-r, r + 1):
        for y in range(-r, r + 1):
            if x * x + y * y != n:
                continue
            q = complex(x - 1, y) / complex(2, 2)
            if abs(q.real - round(q.real)) < 1e-12 and abs(q.imag - round(q.imag)) < 1e-12:
                total += complex(x, y)
    return total


@pytest.fixture(scope="module")
def cm32():
    """The weight-2 theta series of Q(i) whose coefficients are sums of alpha = 1 mod 2 + 2i."""
    K = QuadField(4)
    B = 120
    want = [gaussian_oracle(n) for n in range(B + 1)]
    for psi in enumerate_characters(K, (-1, 0), 4):
        th = theta_series(psi, B)
        if all(abs(th[n].to_complex() - want[n]) < 1e-9 for n in range(1, B + 1)):
            return psi, th
    pytest.fail("no character reproduces the Gaussian oracle")


def test_trivial_theta_counts_representations():
    K = QuadField(4)
    th = theta_series(trivial_character(K), 200)
    for n in range(1, 201):
        reps = sum(1 for x in range(-15, 16) for y in range(-15, 16) if x * x + y * y == n)
        assert th[n].rational_value() * 4 == reps
    assert th.weight == 1 and th.level == 4


def test_cm_form_known_coefficients(cm32):
    _, th = cm32
    vals = {n: th[n].rational_value() for n in (1, 3, 5, 13, 17, 29)}
    assert vals == {1: 1, 3: 0, 5: -2, 13: 6, 17: 2, 29: -10}
    assert th.weight == 2 and th.level == 64


def test_cm_form_eigen_and_multiplicative(cm32):
    psi, th = cm32
    assert is_multiplicative(th)
    for q in (3, 5, 7, 11, 13):
        g = hecke_Tq(th, q)
        assert g.precision == th.precision // q
        assert is_eigenvector(th, g, hecke_eigenvalue(psi, q))
    bad = hecke_Tq(th, 5)
    assert not is_eigenvector(th, bad, hecke_eigenvalue(psi, 13))


def test_hecke_tq_guards(cm32):
    _, th = cm32
    with pytest.raises(ValueError):
        hecke_Tq(th, 2)


def test_theta_rejects_bad_type(K7):
    psi = enumerate_characters(K7, (0, -1), 5)[0]
    with pytest.raises(ValueError):
        theta_series(psi, 10)


@pytest.mark.parametrize("D", [7, 23])
def test_eigen_over_several_characters(D):
    K = QuadField(D)
    for psi in enumerate_characters(K, (-1, 0), 5, primitive=True)[:3]:
        th = theta_series(psi, 150)
        for q in (2, 3, 11, 13):
            if th.level % q == 0:
                continue
            assert is_eigenvector(th, hecke_Tq(th, q), hecke_eigenvalue(psi, q))


def test_p_deplete(cm32):
    _, th = cm32
    d = p_deplete(th, 5)
    assert d.level == th.level * 25
    assert all(d[n].is_zero() for n in range(5, d.precision + 1, 5))
    assert all(d[n] == th[n] for n in range(1, d.precision + 1) if n % 5)


def test_rankin_factorization(K7):
    chars = enumerate_characters(K7, (-1, 0), 5, primitive=True)[:3]
    for psi1 in chars:
        for psi2 in chars:
            for q in (2, 3, 11, 13, 17):
                assert rankin_factorization_check(psi1, psi2, q)
    with pytest.raises(ValueError):
        rankin_factorization_check(chars[0], chars[1], 7)


def test_lambda_family_specializes_to_padic_theta(K7):
    p, n, B = 5, 3, 120
    psi0, iota = build_psi0(K7, p, n + 3)
    xi = trivial_character(K7, psi0.ring)
    fam = LambdaThetaFamily(xi, psi0, iota, n, B)
    for nu in (2, 3, 4, 6):
        spec = specialize_family(fam, nu, n)
        direct = padic_theta(xi * character_power(psi0, nu - 1), iota, B, n)
        assert padic_equal(spec, direct, n, coprime_to=p)
    # a wrong weight is detected
    wrong = padic_theta(character_power(psi0, 2), iota, B, n)
    assert not padic_equal(specialize_family(fam, 2, n), wrong, n, coprime_to=p)


def test_export(tmp_path, cm32):
    _, th = cm32
    path = tmp_path / "cm.qexp"
    text = export_qexpansion(th.truncate(10), str(path), "chi_-4")
    assert path.read_text() == text
    lines = text.splitlines()
    assert lines[:4] == ["# weight 2", "# level 64", "# nebentypus chi_-4", "# precision 10"]
    assert lines[4] == "1 1" and lines[8] == "5 -2"
