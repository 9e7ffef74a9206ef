"""q-expansions: theta series of Hecke characters, Hecke operators, p-depletion,
the Lambda-adic theta family and the Rankin Euler-factor check."""

from __future__ import annotations

import itertools
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .classfield import AssumptionError, GammaLevel
from .exactnum import CycInt, PadicNum, exp_of_p
from .heckechar import (
    AlgValue,
    BaseCharacter,
    HeckeCharacter,
    PadicEmbedding,
    ProductCharacter,
    trivial_character,
)
from .quadfield import QuadField, QuadIdeal, ideals_of_norm_factored, splitting


@dataclass
class QExpansion:
    """sum_{n=1}^{B} a_n q^n with a_0 ignored.

    ``chi`` maps an integer to a scalar of the coefficient ring (the nebentypus);
    ``zero`` is the additive identity of the coefficient ring.
    """

    weight: int
    level: int
    coeffs: list
    zero: Any
    chi: Callable[[int], Any] | None = None
    label: str = ""

    @property
    def precision(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def truncate(self, B: int) -> "QExpansion":
        return QExpansion(self.weight, self.level, self.coeffs[: B + 1], self.zero, self.chi, self.label)

    def map(self, f: Callable[[Any], Any], zero: Any, chi: Callable[[int], Any] | None = None) -> "QExpansion":
        return QExpansion(self.weight, self.level, [f(c) for c in self.coeffs], zero, chi, self.label)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QExpansion):
            return NotImplemented
        B = min(self.precision, other.precision)
        return all(self.coeffs[n] == other.coeffs[n] for n in range(1, B + 1))

    __hash__ = None  # type: ignore[assignment]


def _is_zero(x) -> bool:
    if isinstance(x, (AlgValue, CycInt)):
        return x.is_zero()
    if isinstance(x, PadicNum):
        return x == 0
    return x == 0


# ---------------------------------------------------------------------------
# theta series
# ---------------------------------------------------------------------------


def theta_coefficient(psi: HeckeCharacter, n: int):
    O = psi.K.maximal_order()
    total = psi.ring.zero()
    for _, fac in ideals_of_norm_factored(O, n, psi.modulus):
        total = total + psi.evaluate_factored(fac)
    return total


def theta_series(psi: HeckeCharacter, B: int) -> QExpansion:
    """theta_psi = sum_{(a, f) = 1} psi(a) q^{N(a)}, of weight nu, level N(f) D_K, nebentypus chi * eps_K."""
    a, b = psi.infinity_type
    if b != 0 or a > 0:
        raise ValueError("theta series need infinity type (1 - nu, 0) with nu >= 1")
    nu = 1 - a
    R = psi.ring
    coeffs = [R.zero()]
    for n in range(1, B + 1):
        coeffs.append(theta_coefficient(psi, n))
    level = psi.modulus.norm() * psi.K.D
    chi = lambda n: R.from_cyc(psi.nebentypus(n))
    return QExpansion(nu, level, coeffs, R.zero(), chi, label=f"theta(D={psi.K.D},type={psi.infinity_type})")


def hecke_eigenvalue(psi: HeckeCharacter, q: int):
    """sum over primes of norm q coprime to the modulus of psi(P)."""
    spl = splitting(psi.K, q)
    total = psi.ring.zero()
    for P in spl.primes:
        if P.norm() == q and psi.is_coprime(P):
            total = total + psi.value_on_prime(P)
    return total


# ---------------------------------------------------------------------------
# operators on expansions
# ---------------------------------------------------------------------------


def hecke_Tq(f: QExpansion, q: int) -> QExpansion:
    """a_n(T_q f) = a_{nq} + chi(q) q^{nu-1} a_{n/q}, to precision floor(B/q)."""
    if f.level % q == 0:
        raise ValueError("q divides the level")
    if f.chi is None:
        raise ValueError("expansion has no nebentypus")
    if f.precision < q:
        raise ValueError("precision too small")
    B = f.precision // q
    c = f.chi(q) * (q ** (f.weight - 1))
    out = [f.zero]
    for n in range(1, B + 1):
        v = f.coeffs[n * q]
        if n % q == 0:
            v = v + c * f.coeffs[n // q]
        out.append(v)
    return QExpansion(f.weight, f.level, out, f.zero, f.chi, f.label + f"|T{q}")


def is_eigenvector(f: QExpansion, g: QExpansion, eigenvalue) -> bool:
    """g == eigenvalue * f on the common range."""
    B = min(f.precision, g.precision)
    return all(g.coeffs[n] == eigenvalue * f.coeffs[n] for n in range(1, B + 1))


def p_deplete(f: QExpansion, p: int) -> QExpansion:
    out = [f.zero if n % p == 0 else c for n, c in enumerate(f.coeffs)]
    out[0] = f.zero
    return QExpansion(f.weight, f.level * p * p, out, f.zero, f.chi, f.label + f"[{p}]")


def reindex(f: QExpansion, N: int) -> QExpansion:
    """f(q^N): a_n -> a_{n/N}; precision is kept."""
    B = f.precision
    out = [f.zero] * (B + 1)
    for n in range(1, B // N + 1):
        out[n * N] = f.coeffs[n]
    return QExpansion(f.weight, f.level * N, out, f.zero, f.chi, f.label + f"(q^{N})")


def is_multiplicative(f: QExpansion) -> bool:
    from math import gcd

    B = f.precision
    for m in range(2, B + 1):
        for n in range(m + 1, B // m + 1):
            if gcd(m, n) == 1 and not (f.coeffs[m * n] == f.coeffs[m] * f.coeffs[n]):
                return False
    return True


# ---------------------------------------------------------------------------
# Lambda-adic family
# ---------------------------------------------------------------------------


class LambdaThetaFamily:
    """sum_{(a, f p) = 1} iota(xi psi0(a)) [a] q^{N(a)} with [a] in Gamma_inf / Gamma_inf^{p^n}.

    Group-ring coefficients are dicts {Gamma coordinates: PadicNum}; Gamma is
    realized as (Z/p^n)^2 through log<.>/p, so that psi0-hat on the class
    with coordinates x is exp(p x).
    """

    def __init__(self, xi: HeckeCharacter, psi0: BaseCharacter, iota: PadicEmbedding, n: int, B: int):
        if xi.infinity_type != (0, 0):
            raise ValueError("xi must have finite order")
        self.K, self.p, self.n, self.B = xi.K, iota.p, n, B
        self.xi, self.psi0, self.iota = xi, psi0, iota
        self.gamma = GammaLevel(self.K, self.p, n)
        self.base = xi * psi0
        O = self.K.maximal_order()
        self.coeffs: list[dict] = [{}]
        for m in range(1, B + 1):
            terms: dict = {}
            if m % self.p:
                for I, fac in ideals_of_norm_factored(O, m, self.base.modulus):
                    g = self.gamma.class_of(I)
                    v = iota(self.base.evaluate_factored(fac))
                    terms[g] = terms[g] + v if g in terms else v
            self.coeffs.append(terms)

    def psi0_hat(self, g: Sequence[int]) -> PadicNum:
        p, prec = self.p, self.iota.prec
        x = PadicNum(p, 2, prec, g[0], g[1])
        return exp_of_p(x, prec)

    def specialize(self, nu: int, prec: int | None = None) -> QExpansion:
        """Apply gamma -> psi0_hat(gamma)^{nu-2} to every coefficient."""
        prec = prec or self.n
        if prec > self.n + 1:
            raise ValueError("group ring level too small for this precision")
        cache: dict = {}
        zero = PadicNum(self.p, 2, prec, 0)
        out = [zero]
        e = nu - 2
        for terms in self.coeffs[1:]:
            total = zero
            for g, v in terms.items():
                if g not in cache:
                    h = self.psi0_hat(g)
                    cache[g] = h**e if e >= 0 else h.inverse() ** (-e)
                total = total + (v * cache[g]).reduce(prec)
            out.append(total.reduce(prec))
        return QExpansion(nu, 0, out, zero, None, label=f"family(nu={nu})")


def specialize_family(fam: LambdaThetaFamily, nu: int, prec: int | None = None, B: int | None = None) -> QExpansion:
    out = fam.specialize(nu, prec)
    return out.truncate(B) if B is not None else out


def character_power(psi: HeckeCharacter, k: int) -> HeckeCharacter:
    if k < 0:
        return character_power(psi.inverse(), -k)
    out: HeckeCharacter = trivial_character(psi.K, psi.ring)
    for _ in range(k):
        out = ProductCharacter(out, psi)
    return out


def padic_theta(psi: HeckeCharacter, iota: PadicEmbedding, B: int, prec: int) -> QExpansion:
    """iota applied to theta_psi, reduced mod p^prec."""
    th = theta_series(psi, B)
    zero = PadicNum(iota.p, 2, prec, 0)
    return th.map(lambda c: iota(c).reduce(prec), zero)


def padic_equal(f: QExpansion, g: QExpansion, prec: int, coprime_to: int | None = None) -> bool:
    B = min(f.precision, g.precision)
    for n in range(1, B + 1):
        if coprime_to and n % coprime_to == 0:
            continue
        if f.coeffs[n].reduce(prec) != g.coeffs[n].reduce(prec):
            return False
    return True


# ---------------------------------------------------------------------------
# Rankin factorization
# ---------------------------------------------------------------------------


def _poly_mul(a: list, b: list, zero) -> list:
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_eq(a: list, b: list) -> bool:
    n = max(len(a), len(b))
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        if not (x - y == 0 if not isinstance(x, int) else y - x == 0):
            return False
    return True


def _det_poly(M: list[list[list]], zero, one) -> list:
    """Determinant of a square matrix of polynomials (coefficient lists), by the Leibniz formula."""
    n = len(M)
    total = [zero]
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = [one]
        for i in range(n):
            term = _poly_mul(term, M[i][perm[i]], zero)
            if all(_is_zero(c) for c in term):
                break
        if sign < 0:
            term = [-c for c in term]
        L = max(len(total), len(term))
        total = [
            (total[i] if i < len(total) else zero) + (term[i] if i < len(term) else zero) for i in range(L)
        ]
    return total


def _induced_frobenius(psi: HeckeCharacter, q: int, P: QuadIdeal | None):
    """Frob_q on Ind_K^Q(psi) as a 2x2 matrix of scalars (geometric Frobenius eigenvalues psi(P))."""
    R = psi.ring
    if P is not None:
        return [[psi(P), R.zero()], [R.zero(), psi(P.conj())]]
    Q = QuadIdeal(psi.K.maximal_order(), q, 0, q)
    return [[R.zero(), psi(Q)], [R.one(), R.zero()]]


def _kron(A, B):
    n, m = len(A), len(B)
    return [[A[i // m][j // m] * B[i % m][j % m] for j in range(n * m)] for i in range(n * m)]


def _charpoly_det(M, R) -> list:
    """det(1 - X M) as a coefficient list."""
    n = len(M)
    mat = [[[R.one() if i == j else R.zero(), -M[i][j]] for j in range(n)] for i in range(n)]
    return _det_poly(mat, R.zero(), R.one())


def rankin_factorization_check(psi1: HeckeCharacter, psi2: HeckeCharacter, q: int) -> bool:
    """Ind(psi1) (x) Ind(psi2) = Ind(psi1 psi2) + Ind(psi1 psi2^c) at the Euler factor at q."""
    K = psi1.K
    spl = splitting(K, q)
    if spl.kind == "ramified":
        raise ValueError("q ramified in K")
    for psi in (psi1, psi2):
        if not all(psi.is_coprime(P) for P in spl.primes):
            raise ValueError("q meets a conductor")
    R = psi1.ring
    P = spl.primes[0] if spl.kind == "split" else None
    eta1 = psi1 * psi2
    eta2 = psi1 * psi2.conjugate()
    lhs = _kron(_induced_frobenius(psi1, q, P), _induced_frobenius(psi2, q, P))
    rhs = _poly_mul(
        _charpoly_det(_induced_frobenius(eta1, q, P), R), _charpoly_det(_induced_frobenius(eta2, q, P), R), R.zero()
    )
    ok_poly = _poly_eq(_charpoly_det(lhs, R), rhs)
    if P is None:
        return ok_poly
    # split q: direct multiset comparison as well
    a1, b1 = psi1(P), psi1(P.conj())
    a2, b2 = psi2(P), psi2(P.conj())
    left = [a1 * a2, a1 * b2, b1 * a2, b1 * b2]
    right = [eta1(P), eta1(P.conj()), eta2(P), eta2(P.conj())]
    remaining = list(right)
    for x in left:
        for i, y in enumerate(remaining):
            if x == y:
                del remaining[i]
                break
        else:
            return False
    return ok_poly and not remaining


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def _format_coeff(c) -> str:
    if isinstance(c, AlgValue):
        r = c.rational_value()
        if r is not None:
            return str(r)
        z = c.to_complex()
        return f"{z.real:.12g}{z.imag:+.12g}i"
    if isinstance(c, PadicNum):
        return f"{c.a}+{c.b}t"
    return str(c)


def export_qexpansion(f: QExpansion, path: str | None = None, nebentypus: str = "") -> str:
    lines = [
        f"# weight {f.weight}",
        f"# level {f.level}",
        f"# nebentypus {nebentypus or 'unspecified'}",
        f"# precision {f.precision}",
    ]
    for n in range(1, f.precision + 1):
        lines.append(f"{n} {_format_coeff(f.coeffs[n])}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        atomic_write(path, text)
    return text


def atomic_write(path: str, data: str | bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
