"""Euler-factor polynomials attached to f (x) eta_i at a prime q and the congruences
used to pass from the corestriction operators to Euler-system norm relations.

Coefficients live in Q(zeta_m); divisibility by q - 1 or q^2 - 1 is certified in
Z[zeta_m][1/q], i.e. the quotient may only have q in its denominator.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from .exactnum import CycInt


class CongruenceError(ArithmeticError):
    """A claimed divisibility does not hold."""


def _cyc(x) -> CycInt:
    if isinstance(x, CycInt):
        return x
    return CycInt.from_int(Fraction(x))


def integral_away_from(x, q: int) -> bool:
    """x in Z[zeta][1/q]."""
    den = _cyc(x).den
    while den % q == 0:
        den //= q
    return den == 1


def divide_certified(x, n: int, q: int) -> CycInt:
    """x / n, checked to lie in Z[zeta][1/q]."""
    out = _cyc(x) / n
    if not integral_away_from(out, q):
        raise CongruenceError(f"{x} is not divisible by {n} away from {q}")
    return out


class LaurentPoly:
    """Finite sum of c_e X^e with CycInt coefficients, e in Z."""

    def __init__(self, coeffs: dict[int, object] | None = None):
        self.coeffs: dict[int, CycInt] = {}
        for e, c in (coeffs or {}).items():
            c = _cyc(c)
            if not c.is_zero():
                self.coeffs[e] = c

    def __getitem__(self, e: int) -> CycInt:
        return self.coeffs.get(e, CycInt.zero())

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[int, CycInt] = {}
        for (e1, c1), (e2, c2) in itertools.product(self.coeffs.items(), other.coeffs.items()):
            e = e1 + e2
            out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return LaurentPoly(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return not (self - other).coeffs

    __hash__ = None  # type: ignore[assignment]

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def evaluate(self, x) -> CycInt:
        x = _cyc(x)
        total = CycInt.zero()
        for e, c in self.coeffs.items():
            total = total + c * (x**e if e >= 0 else x.inverse() ** (-e))
        return total

    def __repr__(self) -> str:
        return "LaurentPoly(" + ", ".join(f"{e}: {self.coeffs[e]}" for e in self.support()) + ")"


def monomial(c, e: int = 0) -> LaurentPoly:
    return LaurentPoly({e: c})


@dataclass
class HeckeDatum:
    """Local data at q: Hecke eigenvalue, weights and the character values entering the Euler factors."""

    q: int
    split: bool
    a_q: object
    k: int
    l: int
    m: int
    psi1_q: CycInt = field(default_factory=CycInt.one)
    psi2_q: CycInt = field(default_factory=CycInt.one)
    psi2_qbar: CycInt = field(default_factory=CycInt.one)
    eta1_q: CycInt = field(default_factory=CycInt.one)
    eta1_qbar: CycInt = field(default_factory=CycInt.one)
    eta2_q: CycInt = field(default_factory=CycInt.one)
    eta2_qbar: CycInt = field(default_factory=CycInt.one)

    def __post_init__(self):
        if self.k % 2 or (self.l + self.m) % 2:
            raise ValueError("k and l + m must be even")
        a = _cyc(self.a_q)
        bound = 2 * self.q ** ((self.k - 1) / 2)
        for g in range(1, a.m + 1):
            if sympy.gcd(g, a.m) == 1 and abs(a.galois(g).to_complex()) > bound + 1e-9:
                raise ValueError("a_q violates the Weil bound")

    @property
    def r(self) -> int:
        return (self.k + self.l + self.m - 6) // 2

    def eta(self, i: int) -> tuple[CycInt, CycInt]:
        if i == 1:
            return _cyc(self.eta1_q), _cyc(self.eta1_qbar)
        if i == 2:
            return _cyc(self.eta2_q), _cyc(self.eta2_qbar)
        raise ValueError("i must be 1 or 2")

    def psi_product(self, i: int) -> CycInt:
        """psi1(q) psi2(qbar) for i = 1, psi1(q) psi2(q) for i = 2."""
        return _cyc(self.psi1_q) * _cyc(self.psi2_qbar if i == 1 else self.psi2_q)


def _need(d: HeckeDatum, split: bool):
    if d.split != split:
        raise ValueError("datum is " + ("split" if d.split else "inert"))


def euler_P(d: HeckeDatum, i: int = 1) -> LaurentPoly:
    """1 - a_q eta_i(q) / q^{k/2} X + eta_i(q)^2 / q X^2."""
    _need(d, True)
    e, _ = d.eta(i)
    q = d.q
    return LaurentPoly({0: 1, 1: -_cyc(d.a_q) * e / q ** (d.k // 2), 2: e * e / q})


def euler_P_inert(d: HeckeDatum) -> LaurentPoly:
    """1 - a_q^2 / q^k X + 2 X / q + X^2 / q^2."""
    _need(d, False)
    q = d.q
    a = _cyc(d.a_q)
    return LaurentPoly({0: 1, 1: -a * a / q**d.k + Fraction(2, q), 2: Fraction(1, q * q)})


def induced_block_charpoly(a_q, k: int, q: int) -> LaurentPoly:
    """det(1 - X M^2) with M the Frobenius-inverse matrix at q on V*(f)(1), twist trivial on (q).

    M is the companion matrix of X^2 - (a_q / q^{k/2}) X + 1/q; the prime (q) of K
    has Frobenius Frob_q^2, so its block is M^2.
    """
    a = _cyc(a_q)
    # companion matrix of X^2 - (a/q^{k/2}) X + 1/q
    t = a / q ** (k // 2)
    n = Fraction(1, q)
    M = [[CycInt.zero(), _cyc(-n)], [CycInt.one(), t]]
    M2 = [[sum((M[i][l] * M[l][j] for l in range(2)), CycInt.zero()) for j in range(2)] for i in range(2)]
    # det(1 - X M2) = 1 - tr(M2) X + det(M2) X^2
    tr = M2[0][0] + M2[1][1]
    det = M2[0][0] * M2[1][1] - M2[0][1] * M2[1][0]
    return LaurentPoly({0: 1, 1: -tr, 2: det})


def euler_Q(d: HeckeDatum, i: int = 1) -> LaurentPoly:
    """a_q + q^r (1-q)/q^{l+m-2} psi-product - q^{k/2-1} eta_i(q) X^{-1} - q^{k/2-1} eta_i(qbar) X."""
    _need(d, True)
    q = d.q
    e, eb = d.eta(i)
    const = _cyc(d.a_q) + _cyc(Fraction(q) ** d.r * (1 - q) / Fraction(q) ** (d.l + d.m - 2)) * d.psi_product(i)
    c = Fraction(q) ** (d.k // 2 - 1)
    return LaurentPoly({0: const, -1: -e * c, 1: -eb * c})


def normrel_rhs(d: HeckeDatum, i: int = 1) -> dict[int, CycInt]:
    """The corestriction operator as a group-ring element {Frobenius exponent: coefficient}."""
    _need(d, True)
    q = d.q
    e, eb = d.eta(i)
    out: dict[int, CycInt] = {}
    a = _cyc(d.a_q)
    scalar = Fraction(q) ** d.r * (1 - q) / Fraction(q) ** (d.l + d.m - 2)
    out[0] = a + d.psi_product(i) * scalar
    out[-1] = -(e * Fraction(q) ** (d.k // 2 - 1))
    out[1] = -(eb * Fraction(q) ** (d.k // 2 - 1))
    return {g: c for g, c in out.items() if not c.is_zero()}


MUTATIONS = ("drop-1/q", "drop-(q-1)", "drop-X-term")


def tilde_P(d: HeckeDatum, i: int = 1, mutation: str | None = None) -> LaurentPoly:
    """P + (1-q)/q + (q-1)/q^{(l+m+2)/2} psi-product eta_i(q) X, optionally perturbed."""
    P = euler_P(d, i)
    q = d.q
    e, _ = d.eta(i)
    c0 = Fraction(1 - q, q)
    c1 = Fraction(q - 1, q ** ((d.l + d.m + 2) // 2))
    if mutation == "drop-1/q":
        c0 = Fraction(1 - q)
    elif mutation == "drop-(q-1)":
        c0 = Fraction(1, q)
    elif mutation == "drop-X-term":
        c1 = Fraction(1, q ** ((d.l + d.m + 2) // 2))
    elif mutation is not None:
        raise ValueError(f"unknown mutation {mutation}")
    return P + LaurentPoly({0: c0, 1: d.psi_product(i) * e * c1})


@dataclass
class Certificate:
    modulus: int
    quotients: dict


def congruence_check_split(d: HeckeDatum, i: int = 1, mutation: str | None = None) -> Certificate:
    """Certify tilde-P - P = (q - 1) * (element of Z[zeta][1/q][X])."""
    P = euler_P(d, i)
    diff = tilde_P(d, i, mutation) - P
    if any(e not in (0, 1) for e in diff.support()):
        raise CongruenceError("unexpected monomial in tilde-P - P")
    quot = {e: divide_certified(c, d.q - 1, d.q) for e, c in diff.coeffs.items()}
    return Certificate(d.q - 1, quot)


def congruence_check_inert(d: HeckeDatum) -> Certificate:
    """-P(1) = a_q^2 - (q+1)^2/q = a_q^2 - (q+1)/q q^{k-2}(q-1+q^{l-2}+q^{m-2}) mod (q^2 - 1)."""
    _need(d, False)
    if d.k % 2 or (d.l - d.m) % 2:
        raise ValueError("need k even and l = m mod 2")
    q = d.q
    n = q * q - 1
    a2 = _cyc(d.a_q) * _cyc(d.a_q)
    lhs = -euler_P_inert(d).evaluate(1)
    mid = a2 - Fraction((q + 1) ** 2, q)
    qf = Fraction(q)
    rhs = a2 - Fraction(q + 1, q) * qf ** (d.k - 2) * (q - 1 + qf ** (d.l - 2) + qf ** (d.m - 2))
    return Certificate(
        n,
        {
            "lhs-mid": divide_certified(lhs - mid, n, q),
            "mid-rhs": divide_certified(mid - rhs, n, q),
        },
    )


# ---------------------------------------------------------------------------
# random data
# ---------------------------------------------------------------------------


def _random_root(rng: random.Random, max_order: int) -> CycInt:
    m = rng.randint(1, max_order)
    return CycInt.zeta(m, rng.randrange(m))


def is_balanced(k: int, l: int, m: int) -> bool:
    return k < l + m and l < k + m and m < k + l


def random_datum(
    rng: random.Random, split: bool, max_order: int = 12, q_max: int = 97, weight_max: int = 12
) -> HeckeDatum:
    """Random local data: balanced weights, roots of unity of order <= max_order, integer a_q within the Weil bound."""
    q = int(rng.choice(list(sympy.primerange(3, q_max + 1))))
    while True:
        k = 2 * rng.randint(1, weight_max // 2)
        l = rng.randint(2, weight_max)
        m = rng.randint(2, weight_max)
        if (l + m) % 2 == 0 and is_balanced(k, l, m):
            break
    bound = int(2 * q ** ((k - 1) / 2))
    a_q = rng.randint(-bound, bound)
    roots = [_random_root(rng, max_order) for _ in range(7)]
    return HeckeDatum(q, split, a_q, k, l, m, *roots)


@dataclass
class SampleResult:
    index: int
    split_q: int
    inert_q: int
    split_ok: bool
    inert_ok: bool
    certificate: str
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.split_ok and self.inert_ok


def _describe(cert: Certificate) -> str:
    return f"{cert.modulus} | " + ",".join(str(k) for k in sorted(cert.quotients, key=str))


def run_congruence_samples(n: int, seed: int) -> list[SampleResult]:
    """For each sample one split and one inert datum, with a short certificate description."""
    rng = random.Random(seed)
    out = []
    for j in range(n):
        status, qs, certs, notes = [], [], [], []
        for split in (True, False):
            d = random_datum(rng, split)
            qs.append(d.q)
            try:
                if split:
                    c1 = congruence_check_split(d, 1)
                    congruence_check_split(d, 2)
                    certs.append(_describe(c1))
                else:
                    certs.append(_describe(congruence_check_inert(d)))
                status.append(True)
            except CongruenceError as exc:
                status.append(False)
                certs.append("-")
                notes.append(f"sample {j} ({'split' if split else 'inert'} q={d.q}): {exc}")
        out.append(SampleResult(j, qs[0], qs[1], status[0], status[1], "; ".join(certs), "; ".join(notes)))
    return out


def run_congruence_batch(n: int, seed: int) -> tuple[int, int, list[str]]:
    """n split and n inert random data; returns (passed, total, failure descriptions)."""
    samples = run_congruence_samples(n, seed)
    passed = sum(int(r.split_ok) + int(r.inert_ok) for r in samples)
    failures = [r.note for r in samples if r.note]
    return passed, 2 * n, failures
