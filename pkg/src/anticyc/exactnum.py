"""Exact coefficient arithmetic: cyclotomic numbers, truncated p-adics, polynomials.

``CycInt`` holds an element of Q(zeta_m) in the power basis 1, z, ..., z^(phi(m)-1)
with integer numerators over a common positive denominator. Values with
denominator 1 are cyclotomic integers. ``PadicNum`` is an element of Z_p or of
the unramified quadratic extension Z_{p^2} = Z_p[t]/(t^2 - r), truncated at p^n.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import sympy


# ---------------------------------------------------------------------------
# cyclotomic numbers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def cyclotomic_coeffs(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, constant term first."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.cyclotomic_poly(m, x), x)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Row k is z_m^k reduced modulo Phi_m, for 0 <= k < m."""
    phi = cyclotomic_coeffs(m)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    if deg == 0:
        return tuple(() for _ in range(m))
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by z
        top = cur[-1]
        nxt = [0] + cur[:-1]
        if top:
            for i in range(deg):
                nxt[i] -= top * phi[i]
        cur = nxt
    return tuple(rows)


def _reduce(vec: list[int], m: int) -> list[int]:
    phi = cyclotomic_coeffs(m)
    deg = len(phi) - 1
    vec = list(vec)
    for k in range(len(vec) - 1, deg - 1, -1):
        c = vec[k]
        if c:
            vec[k] = 0
            base = k - deg
            for i in range(deg):
                if phi[i]:
                    vec[base + i] -= c * phi[i]
    out = vec[:deg]
    out.extend([0] * (deg - len(out)))
    return out


def _phi(m: int) -> int:
    return len(cyclotomic_coeffs(m)) - 1


class CycInt:
    """Element of Q(zeta_m); integral when ``den == 1``.

    Binary operations embed both operands into the lcm conductor.
    """

    __slots__ = ("m", "num", "den")

    def __init__(self, m: int, num: Sequence[int], den: int = 1):
        if m < 1:
            raise ValueError("conductor must be positive")
        num = list(num)
        deg = _phi(m)
        if len(num) > deg:
            num = _reduce(num, m)
        elif len(num) < deg:
            num = num + [0] * (deg - len(num))
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num = [-a for a in num]
            den = -den
        g = den
        for a in num:
            if g == 1:
                break
            g = math.gcd(g, a)
        if g > 1:
            num = [a // g for a in num]
            den //= g
        self.m = m
        self.num = tuple(num)
        self.den = den

    # constructors -----------------------------------------------------
    @classmethod
    def from_int(cls, a: int | Fraction, m: int = 1) -> "CycInt":
        a = Fraction(a)
        return cls(m, [a.numerator], a.denominator)

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "CycInt":
        """The root of unity z_m^k."""
        return cls(m, _power_table(m)[k % m])

    @classmethod
    def zero(cls, m: int = 1) -> "CycInt":
        return cls(m, [])

    @classmethod
    def one(cls, m: int = 1) -> "CycInt":
        return cls(m, [1])

    # structure ----------------------------------------------------------
    def embed(self, m2: int) -> "CycInt":
        if m2 % self.m:
            raise ValueError(f"conductor {self.m} does not divide {m2}")
        if m2 == self.m:
            return self
        t = m2 // self.m
        table = _power_table(m2)
        out = [0] * _phi(m2)
        for k, a in enumerate(self.num):
            if a:
                row = table[(k * t) % m2]
                for i, b in enumerate(row):
                    if b:
                        out[i] += a * b
        return CycInt(m2, out, self.den)

    def _coerce(self, other) -> tuple["CycInt", "CycInt"]:
        if not isinstance(other, CycInt):
            if isinstance(other, (int, Fraction)):
                other = CycInt.from_int(other, self.m)
            else:
                return NotImplemented  # type: ignore[return-value]
        if other.m == self.m:
            return self, other
        m = self.m * other.m // math.gcd(self.m, other.m)
        return self.embed(m), other.embed(m)

    def descend(self) -> "CycInt":
        """Rewrite at the smallest conductor containing this value."""
        for d in sorted(sympy.divisors(self.m)):
            if d == self.m:
                return self
            cand = self._try_descend(d)
            if cand is not None:
                return cand
        return self

    def _try_descend(self, d: int) -> "CycInt | None":
        # solve self = sum c_k z_d^k using the embedded basis
        deg_d = _phi(d)
        basis = [CycInt.zeta(d, k).embed(self.m).num for k in range(deg_d)]
        mat = sympy.Matrix([list(col) for col in basis]).T
        rhs = sympy.Matrix(list(self.num))
        try:
            sol, params = mat.gauss_jordan_solve(rhs)
        except ValueError:
            return None
        if params.shape[0]:
            return None
        fr = [Fraction(int(sympy.fraction(s)[0]), int(sympy.fraction(s)[1])) for s in sol]
        den = 1
        for f in fr:
            den = den * f.denominator // math.gcd(den, f.denominator)
        return CycInt(d, [int(f * den) for f in fr], den * self.den)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        den = a.den * b.den // math.gcd(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return CycInt(a.m, [x * fa + y * fb for x, y in zip(a.num, b.num)], den)

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.m, [-x for x in self.num], self.den)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return CycInt(self.m, [x * other.numerator for x in self.num], self.den * other.denominator)
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        n = len(a.num)
        prod = [0] * max(2 * n - 1, 1)
        for i, x in enumerate(a.num):
            if x:
                for j, y in enumerate(b.num):
                    if y:
                        prod[i + j] += x * y
        return CycInt(a.m, _reduce(prod, a.m), a.den * b.den)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycInt.one(self.m)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                raise ZeroDivisionError
            return CycInt(self.m, [x * other.denominator for x in self.num], self.den * other.numerator)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycInt.from_int(other, self.m)
        if not isinstance(other, CycInt):
            return NotImplemented
        a, b = self._coerce(other)
        return a.den == b.den and a.num == b.num

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_integral(self) -> bool:
        return self.den == 1

    def galois(self, a: int) -> "CycInt":
        """Image under z -> z^a, gcd(a, m) = 1."""
        if math.gcd(a, self.m) != 1:
            raise ValueError("not a Galois element")
        table = _power_table(self.m)
        out = [0] * len(self.num)
        for k, x in enumerate(self.num):
            if x:
                row = table[(k * a) % self.m]
                for i, b in enumerate(row):
                    if b:
                        out[i] += x * b
        return CycInt(self.m, out, self.den)

    def conj(self) -> "CycInt":
        return self.galois(-1 % self.m if self.m > 1 else 1)

    def norm(self) -> Fraction:
        """Absolute norm to Q."""
        prod = CycInt.one(self.m)
        for a in range(1, self.m + 1):
            if math.gcd(a, self.m) == 1:
                prod = prod * self.galois(a)
        if any(prod.num[1:]):
            raise ArithmeticError("norm is not rational")
        return Fraction(prod.num[0], prod.den) if prod.num else Fraction(0)

    def inverse(self) -> "CycInt":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        others = CycInt.one(self.m)
        for a in range(2, self.m + 1):
            if math.gcd(a, self.m) == 1 and a % self.m != 1:
                others = others * self.galois(a)
        n = self * others
        val = Fraction(n.num[0], n.den)
        return others / val

    def to_complex(self) -> complex:
        z = cmath.exp(2j * math.pi / self.m)
        return sum(a * z**k for k, a in enumerate(self.num)) / self.den

    def coeffs(self) -> list[Fraction]:
        return [Fraction(a, self.den) for a in self.num]

    def __repr__(self) -> str:
        terms = []
        for k, a in enumerate(self.num):
            if a:
                c = Fraction(a, self.den)
                terms.append(f"{c}" if k == 0 else f"{c}*z{self.m}^{k}")
        return "CycInt(" + (" + ".join(terms) if terms else "0") + ")"


def cyc_embed(x: CycInt, m2: int) -> CycInt:
    """Canonical inclusion Q(zeta_m) -> Q(zeta_m2)."""
    return x.embed(m2)


# ---------------------------------------------------------------------------
# p-adic numbers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def quadratic_nonresidue(p: int) -> int:
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise ValueError(f"no non-residue mod {p}")


class PadicNum:
    """Element of Z_p (d = 1) or Z_{p^2} = Z_p[t]/(t^2 - r) (d = 2) modulo p^prec.

    ``r`` is the least quadratic non-residue mod p. Only integral values are
    representable; dividing by a non-unit raises.
    """

    __slots__ = ("p", "d", "prec", "a", "b")

    def __init__(self, p: int, d: int, prec: int, a: int, b: int = 0):
        if d not in (1, 2):
            raise ValueError("degree must be 1 or 2")
        if prec < 1:
            raise ValueError("precision must be positive")
        mod = p**prec
        self.p, self.d, self.prec = p, d, prec
        self.a = a % mod
        self.b = b % mod if d == 2 else 0

    @property
    def r(self) -> int:
        return quadratic_nonresidue(self.p)

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    def _like(self, a: int, b: int = 0, prec: int | None = None) -> "PadicNum":
        return PadicNum(self.p, self.d, self.prec if prec is None else prec, a, b)

    def _coerce(self, other) -> "PadicNum":
        if isinstance(other, PadicNum):
            if other.p != self.p or other.d != self.d:
                raise ValueError("incompatible p-adic rings")
            return other
        if isinstance(other, int):
            return self._like(other)
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by p")
            return self._like(other.numerator * pow(other.denominator, -1, self.modulus))
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._like(self.a + o.a, self.b + o.b, min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._like(self.a - o.a, self.b - o.b, min(self.prec, o.prec))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.d == 1:
            return self._like(self.a * o.a, 0, min(self.prec, o.prec))
        a = self.a * o.a + self.r * self.b * o.b
        b = self.a * o.b + self.b * o.a
        return self._like(a, b, min(self.prec, o.prec))

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = min(self.prec, o.prec)
        m = self.p**n
        return (self.a - o.a) % m == 0 and (self.b - o.b) % m == 0

    __hash__ = None  # type: ignore[assignment]

    def reduce(self, prec: int) -> "PadicNum":
        return self._like(self.a, self.b, min(prec, self.prec))

    def lift(self, prec: int) -> "PadicNum":
        """Same representative viewed at a larger precision (digits beyond are zero)."""
        return self._like(self.a, self.b, prec)

    def norm_unit_part(self) -> int:
        return (self.a * self.a - self.r * self.b * self.b) if self.d == 2 else self.a

    def is_unit(self) -> bool:
        return self.norm_unit_part() % self.p != 0

    def valuation(self) -> int:
        """min(v(a), v(b)), capped at the precision."""
        v = 0
        a, b = self.a, self.b
        while v < self.prec and a % self.p == 0 and b % self.p == 0:
            a //= self.p
            b //= self.p
            v += 1
        return v

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def inverse(self) -> "PadicNum":
        if not self.is_unit():
            raise ZeroDivisionError("inverse of a non-unit")
        mod = self.modulus
        if self.d == 1:
            return self._like(pow(self.a, -1, mod))
        n = self.norm_unit_part() % mod
        ninv = pow(n, -1, mod)
        return self._like(self.a * ninv, -self.b * ninv)

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self._like(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def frobenius(self) -> "PadicNum":
        """Nontrivial automorphism of Z_{p^2} (t -> -t); identity on Z_p."""
        return self._like(self.a, -self.b)

    def residue(self) -> tuple[int, int]:
        return self.a % self.p, self.b % self.p

    def __repr__(self) -> str:
        if self.d == 1:
            return f"PadicNum({self.a} mod {self.p}^{self.prec})"
        return f"PadicNum({self.a} + {self.b}*t mod {self.p}^{self.prec}, t^2={self.r})"


def teichmuller(x: PadicNum) -> PadicNum:
    """The root of unity w(x) with w(x)^(p^d - 1) = 1 and w(x) = x mod p.

    Newton iteration on y^(q-1) - 1, doubling the precision each step.
    """
    if not x.is_unit():
        raise ValueError("Teichmuller lift of a non-unit")
    q = x.p**x.d
    y = x
    k = 1
    while True:
        f = y ** (q - 1) - 1
        fp = (q - 1) * y ** (q - 2)
        y = y - f / fp
        k *= 2
        if k >= x.prec:
            break
    # a final Newton step guarantees full precision
    return y - (y ** (q - 1) - 1) / ((q - 1) * y ** (q - 2))


def one_unit_part(x: PadicNum) -> PadicNum:
    """<x> = x / w(x), congruent to 1 mod p."""
    return x / teichmuller(x)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def log_over_p(x: PadicNum) -> PadicNum:
    """log(x)/p for x = 1 mod p, returned at precision prec - 1.

    The series sum (-1)^(k+1) (x-1)^k / k is summed in a working precision
    large enough to absorb the p-powers in the denominators.
    """
    p, n = x.p, x.prec
    if (x.a - 1) % p or x.b % p:
        raise ValueError("log_over_p needs x = 1 mod p")
    if p == 2:
        raise ValueError("p = 2 is not supported")
    extra = 2 + int(math.log(max(n, 2), p)) + 2
    work = n + extra
    z = PadicNum(p, x.d, work, x.a - 1, x.b)
    total = PadicNum(p, x.d, work, 0)
    power = PadicNum(p, x.d, work, 1)
    k = 0
    while True:
        k += 1
        if k - math.log(k, p) >= n + 1:
            break
        power = power * z
        v = _vp(k, p)
        unit = k // p**v
        # divide the exact representative by p^v
        num_a, num_b = power.a, power.b
        if num_a % p**v or num_b % p**v:
            raise ArithmeticError("unexpected non-divisibility in log series")
        term = PadicNum(p, x.d, work, num_a // p**v, num_b // p**v) * pow(unit, -1, p**work)
        total = total + term if k % 2 else total - term
    if total.a % p or total.b % p:
        raise ArithmeticError("log not divisible by p")
    return PadicNum(p, x.d, n - 1, total.a // p, total.b // p)


def exp_of_p(y: PadicNum, prec: int) -> PadicNum:
    """exp(p*y) modulo p^prec, for p odd."""
    p = y.p
    if p == 2:
        raise ValueError("p = 2 is not supported")
    # v((py)^k / k!) >= k (p-2)/(p-1)
    kmax = (prec + 1) * (p - 1) // (p - 2) + 2
    work = prec + kmax // (p - 1) + 4
    py = PadicNum(p, y.d, work, p * y.a, p * y.b)
    total = PadicNum(p, y.d, work, 1)
    term = PadicNum(p, y.d, work, 1)
    for k in range(1, kmax + 1):
        term = term * py
        v = _vp(k, p)
        unit = k // p**v
        if term.a % p**v or term.b % p**v:
            raise ArithmeticError("unexpected non-divisibility in exp series")
        term = PadicNum(p, y.d, work, term.a // p**v, term.b // p**v) * pow(unit, -1, p**work)
        total = total + term
    return PadicNum(p, y.d, prec, total.a, total.b)


def root_of_one_unit(x: PadicNum, h: int) -> PadicNum:
    """The unique h-th root in 1 + pZ of a 1-unit x, for p not dividing h."""
    p = x.p
    if h % p == 0:
        raise ValueError("h must be prime to p")
    if (x.a - 1) % p or x.b % p:
        raise ValueError("not a 1-unit")
    e = pow(h, -1, p ** max(x.prec - 1, 1))
    return x**e


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

RING_TAGS = ("integer", "rational", "cyc", "padic")


class Poly:
    """Univariate polynomial with coefficients in a tagged ring, constant term first."""

    __slots__ = ("coeffs", "ring")

    def __init__(self, coeffs: Iterable, ring: str = "integer"):
        if ring not in RING_TAGS:
            raise ValueError(f"unknown ring {ring}")
        cs = list(coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)
        self.ring = ring

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def _join(self, other: "Poly") -> str:
        order = {t: i for i, t in enumerate(RING_TAGS)}
        if self.ring == "padic" or other.ring == "padic":
            return "padic"
        if "cyc" in (self.ring, other.ring):
            return "cyc"
        return max(self.ring, other.ring, key=order.__getitem__)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other], self.ring)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return Poly([x + y for x, y in zip(a, b)], self._join(other))

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.ring)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs], self.ring)
        if not self.coeffs or not other.coeffs:
            return Poly([], self._join(other))
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return Poly(out, self._join(other))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return all(_is_zero(x - y) for x, y in zip(a, b))

    __hash__ = None  # type: ignore[assignment]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)!r}, ring={self.ring!r})"


def _is_zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero()


def _q_free_denominator(den: int, q: int | None) -> bool:
    if q is None:
        return den == 1
    while den % q == 0 and den > 1:
        den //= q
    return den == 1


def coefficient_divisible(c, d: int, invert: int | None = None) -> bool:
    """Is c/d integral (in Z[1/invert] or the cyclotomic analogue)?"""
    if isinstance(c, int):
        return _q_free_denominator(Fraction(c, d).denominator, invert)
    if isinstance(c, Fraction):
        if invert is None:
            raise TypeError("divisibility over the rationals is not meaningful")
        return _q_free_denominator((c / d).denominator, invert)
    if isinstance(c, CycInt):
        return _q_free_denominator((c / d).den, invert)
    if hasattr(c, "divisible_by"):
        return c.divisible_by(d, invert)
    raise TypeError(f"no decidable divisibility for {type(c).__name__}")


def poly_divides(d, f: Poly, invert: int | None = None) -> bool:
    """True iff every coefficient of f is divisible by d.

    With ``invert = q`` the test is performed in the ring localized away from q.
    Rational coefficient rings are rejected unless a localization is given.
    """
    if isinstance(d, Poly):
        if d.degree != 0:
            raise NotImplementedError("only constant divisors are supported")
        d = d.coeffs[0]
    if not isinstance(d, int):
        raise TypeError("divisor must be an integer")
    if f.ring == "rational" and invert is None:
        raise TypeError("divisibility over the rationals is not decidable in this sense")
    if f.ring == "padic":
        raise TypeError("p-adic coefficient rings are not supported")
    return all(coefficient_divisible(c, d, invert) for c in f.coeffs)
