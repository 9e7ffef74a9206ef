"""Imaginary quadratic fields, their orders, ideals and class groups.

Elements of K = Q(sqrt(d)), d = -D_K, are written u + v*w with w = (d + sqrt(d))/2,
so that O_K = Z[w] for every fundamental discriminant d. Ideals are lattices in
these coordinates, stored in Hermite normal form with rows (a, 0) and (b, c).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import sympy

from .abgroup import BlackBoxGroup, FiniteAbelianGroup


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a | n) for n >= 1."""
    if n <= 0:
        raise ValueError("n must be positive")
    result = 1
    for q, e in sympy.factorint(n).items():
        if q == 2:
            if a % 2 == 0:
                return 0
            s = 1 if a % 8 in (1, 7) else -1
        else:
            s = sympy.jacobi_symbol(a % q, q)
            if s == 0:
                return 0
        result *= s**e
    return result


def is_fundamental_discriminant(d: int) -> bool:
    if d % 4 == 1:
        return all(e == 1 for e in sympy.factorint(abs(d)).values())
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and all(e == 1 for e in sympy.factorint(abs(m)).values())
    return False


# ---------------------------------------------------------------------------
# field and elements
# ---------------------------------------------------------------------------


class QuadField:
    """K = Q(sqrt(-D)) for a fundamental discriminant -D < 0."""

    __slots__ = ("D", "d", "n_w", "_cache")

    def __init__(self, D: int):
        d = -abs(D)
        if d >= 0 or not is_fundamental_discriminant(d):
            raise ValueError(f"{d} is not a negative fundamental discriminant")
        self.D = abs(D)
        self.d = d
        self.n_w = (d * d - d) // 4  # norm of w
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"QuadField(-{self.D})"

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.D == self.D

    def __hash__(self):
        return hash(("QuadField", self.D))

    def __reduce__(self):
        return (QuadField, (self.D,))

    # element arithmetic on pairs (u, v) = u + v w
    def mul(self, x: Sequence, y: Sequence) -> tuple:
        a, b = x
        c, e = y
        be = b * e
        return (a * c - be * self.n_w, a * e + b * c + be * self.d)

    def conj(self, x: Sequence) -> tuple:
        u, v = x
        return (u + v * self.d, -v)

    def norm(self, x: Sequence):
        u, v = x
        return u * u + self.d * u * v + self.n_w * v * v

    def trace(self, x: Sequence):
        u, v = x
        return 2 * u + self.d * v

    def inv(self, x: Sequence) -> tuple:
        n = Fraction(self.norm(x))
        c = self.conj(x)
        return (c[0] / n, c[1] / n)

    def power(self, x: Sequence, e: int) -> tuple:
        if e < 0:
            return self.power(self.inv(x), -e)
        out: tuple = (1, 0)
        for _ in range(e):
            out = self.mul(out, x)
        return out

    def sqrt_d(self) -> tuple:
        """sqrt(d) = 2w - d."""
        return (-self.d, 2)

    def to_complex(self, x: Sequence) -> complex:
        w = (self.d + 1j * math.sqrt(self.D)) / 2
        return complex(x[0]) + complex(x[1]) * w

    def units(self) -> list[tuple[int, int]]:
        """Roots of unity in O_K."""
        if "units" not in self._cache:
            out = []
            for u in range(-2, 3):
                for v in range(-2, 3):
                    if self.norm((u, v)) == 1:
                        out.append((u, v))
            self._cache["units"] = sorted(out)
        return self._cache["units"]

    @property
    def num_units(self) -> int:
        return len(self.units())

    def maximal_order(self) -> "QuadOrder":
        return QuadOrder(self, 1)

    def order(self, f: int) -> "QuadOrder":
        return QuadOrder(self, f)

    # splitting -------------------------------------------------------
    def splitting(self, q: int) -> "Splitting":
        return splitting(self, q)

    def prime_ideals_above(self, q: int) -> list["QuadIdeal"]:
        return list(splitting(self, q).primes)

    def is_split(self, q: int) -> bool:
        return kronecker(self.d, q) == 1

    def is_inert(self, q: int) -> bool:
        return kronecker(self.d, q) == -1


@dataclass(frozen=True)
class QuadOrder:
    field: QuadField
    conductor: int = 1

    def __post_init__(self):
        if self.conductor < 1:
            raise ValueError("conductor must be positive")

    @property
    def discriminant(self) -> int:
        return self.conductor**2 * self.field.d

    def unit_ideal(self) -> "QuadIdeal":
        f = self.conductor
        return QuadIdeal(self, 1, 0, f)

    def class_number_formula(self) -> int:
        """h(O_f) = h_K f prod (1 - (d|q)/q) / [O_K^x : O_f^x]."""
        K = self.field
        f = self.conductor
        hK = class_group(K.maximal_order()).group.order()
        if f == 1:
            return hK
        val = Fraction(hK * f)
        for q in sympy.primefactors(f):
            val *= 1 - Fraction(kronecker(K.d, q), q)
        unit_index = K.num_units // 2
        return int(val / unit_index)


# ---------------------------------------------------------------------------
# ideals
# ---------------------------------------------------------------------------


def hnf2(vectors: Iterable[Sequence[int]]) -> tuple[int, int, int]:
    """Hermite basis (a, 0), (b, c) of the full-rank lattice spanned by the vectors."""
    vecs = [list(map(int, v)) for v in vectors if v[0] or v[1]]
    # gcd on the second coordinate
    c, row = 0, [0, 0]
    rest = []
    for v in vecs:
        if v[1] == 0:
            rest.append(v[0])
            continue
        if c == 0:
            row, c = v, v[1]
            continue
        g, s, t = _xgcd(row[1], v[1])
        new = [s * row[0] + t * v[0], g]
        # the complementary combination has second coordinate 0
        k1, k2 = v[1] // g, row[1] // g
        rest.append(k1 * row[0] - k2 * v[0])
        row, c = new, g
    if c < 0:
        row, c = [-row[0], -row[1]], -c
    a = 0
    for x in rest:
        a = math.gcd(a, x)
    if a == 0 or c == 0:
        raise ValueError("lattice is not of full rank")
    return a, row[0] % a, c


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class QuadIdeal:
    """Lattice Z*a + Z*(b + c*w) inside an order O_f, in O_K coordinates."""

    __slots__ = ("order", "a", "b", "c")

    def __init__(self, order: QuadOrder, a: int, b: int, c: int):
        self.order = order
        self.a, self.b, self.c = a, b % a, c

    @classmethod
    def from_generators(cls, order: QuadOrder, gens: Iterable[Sequence[int]]) -> "QuadIdeal":
        """Ideal of the order generated by the given elements."""
        K = order.field
        f = order.conductor
        vecs = []
        for g in gens:
            vecs.append(tuple(g))
            vecs.append(K.mul(g, (0, f)))
        return cls(order, *hnf2(vecs))

    @property
    def field(self) -> QuadField:
        return self.order.field

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.order.conductor, self.a, self.b, self.c)

    def __eq__(self, other):
        return isinstance(other, QuadIdeal) and self.field == other.field and self.key == other.key

    def __hash__(self):
        return hash((self.field.D,) + self.key)

    def __lt__(self, other):
        return (self.norm(), self.key) < (other.norm(), other.key)

    def __repr__(self) -> str:
        return f"QuadIdeal(D={self.field.D}, f={self.order.conductor}, [{self.a}, {self.b}+{self.c}w])"

    def basis(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.a, 0), (self.b, self.c)

    def norm(self) -> int:
        return self.a * self.c // self.order.conductor

    def contains(self, x: Sequence) -> bool:
        u, v = x
        if isinstance(u, Fraction) or isinstance(v, Fraction):
            if Fraction(u).denominator != 1 or Fraction(v).denominator != 1:
                return False
            u, v = int(u), int(v)
        if v % self.c:
            return False
        return (u - (v // self.c) * self.b) % self.a == 0

    def contains_ideal(self, other: "QuadIdeal") -> bool:
        return all(self.contains(x) for x in other.basis())

    def is_ideal(self) -> bool:
        K = self.field
        f = self.order.conductor
        return all(self.contains(K.mul(x, (0, f))) for x in self.basis()) and all(
            self.order.unit_ideal().contains(x) for x in self.basis()
        )

    def conj(self) -> "QuadIdeal":
        K = self.field
        return QuadIdeal(self.order, *hnf2([K.conj(x) for x in self.basis()]))

    def __mul__(self, other: "QuadIdeal") -> "QuadIdeal":
        return ideal_mul(self, other)

    def __pow__(self, e: int) -> "QuadIdeal":
        if e < 0:
            raise ValueError("negative powers are not supported")
        out = self.order.unit_ideal()
        for _ in range(e):
            out = out * self
        return out

    def scale(self, x: Sequence[int]) -> "QuadIdeal":
        """The ideal x * self for an integral element x."""
        K = self.field
        return QuadIdeal(self.order, *hnf2([K.mul(x, y) for y in self.basis()]))

    def content(self) -> int:
        """Largest integer g with self contained in g * O_f."""
        f = self.order.conductor
        return math.gcd(math.gcd(self.a, self.b), self.c // f)

    def is_coprime_to(self, n: int) -> bool:
        return math.gcd(self.norm(), n) == 1

    def intersect_order(self, f: int) -> "QuadIdeal":
        """For an O_K-ideal a coprime to f, the O_f-ideal a n O_f."""
        if self.order.conductor != 1:
            raise ValueError("expected an ideal of the maximal order")
        if math.gcd(self.norm(), f) != 1:
            raise ValueError("ideal must be coprime to the conductor")
        # a n O_f = {x in a : second coordinate divisible by f}; since gcd(N, f) = 1
        # the lattice is spanned by (a, 0) and f*(b, c) together with f*(a,0)
        vecs = [(self.a, 0), (f * self.b, f * self.c)]
        order = QuadOrder(self.field, f)
        return QuadIdeal(order, *hnf2(vecs))

    def extend_to_maximal(self) -> "QuadIdeal":
        """The O_K-ideal generated by an O_f-ideal."""
        K = self.field
        return QuadIdeal.from_generators(K.maximal_order(), self.basis())


def ideal_mul(I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
    if I.order != J.order:
        raise ValueError("ideals of different orders")
    f = I.order.conductor
    if f > 1 and (math.gcd(I.norm(), f) != 1 or math.gcd(J.norm(), f) != 1):
        raise ValueError("non-invertible ideals of a non-maximal order")
    K = I.field
    prods = [K.mul(x, y) for x in I.basis() for y in J.basis()]
    return QuadIdeal(I.order, *hnf2(prods))


# ---------------------------------------------------------------------------
# splitting of primes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Splitting:
    kind: str  # "split" | "inert" | "ramified"
    q: int
    primes: tuple[QuadIdeal, ...]

    @property
    def is_split(self) -> bool:
        return self.kind == "split"

    @property
    def is_inert(self) -> bool:
        return self.kind == "inert"

    @property
    def is_ramified(self) -> bool:
        return self.kind == "ramified"


def splitting(K: QuadField, q: int) -> Splitting:
    """Decomposition of the rational prime q in O_K.

    For split q the first prime listed has the smaller Hermite basis.
    """
    if not sympy.isprime(q):
        raise ValueError(f"{q} is not prime")
    cache = K._cache.setdefault("split", {})
    if q in cache:
        return cache[q]
    O = K.maximal_order()
    roots = [r for r in range(q) if (r * r - K.d * r + K.n_w) % q == 0]
    k = kronecker(K.d, q)
    if k == 1:
        ps = sorted((QuadIdeal(O, q, -r, 1) for r in roots), key=lambda I: I.key)
        result = Splitting("split", q, tuple(ps))
    elif k == 0:
        result = Splitting("ramified", q, (QuadIdeal(O, q, -roots[0], 1),))
    else:
        result = Splitting("inert", q, (QuadIdeal(O, q, 0, q),))
    cache[q] = result
    return result


def prime_factorization(I: QuadIdeal) -> dict[QuadIdeal, int]:
    """Factorization of an ideal of O_K into prime ideals."""
    if I.order.conductor != 1:
        raise ValueError("factorization is implemented for the maximal order")
    K = I.field
    out: dict[QuadIdeal, int] = {}
    for q in sympy.primefactors(I.norm()):
        for P in splitting(K, q).primes:
            e = 0
            J = I
            while True:
                quotient = _divide_by_prime(J, P)
                if quotient is None:
                    break
                J = quotient
                e += 1
            if e:
                out[P] = e
    return out


def _divide_by_prime(I: QuadIdeal, P: QuadIdeal) -> QuadIdeal | None:
    if not P.contains_ideal(I):
        return None
    # I P^{-1} = I * conj(P) / N(P)
    J = ideal_mul(I, P.conj())
    n = P.norm()
    if J.a % n or J.b % n or J.c % n:
        return None
    return QuadIdeal(I.order, J.a // n, J.b // n, J.c // n)


# ---------------------------------------------------------------------------
# binary quadratic forms and class groups
# ---------------------------------------------------------------------------


def reduce_form(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Reduced representative of a positive definite form."""
    while True:
        if b > a or b <= -a:
            # normalise b into (-a, a]
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return a, b, c


def compose_forms(f1: tuple[int, int, int], f2: tuple[int, int, int]) -> tuple[int, int, int]:
    """Gauss composition of primitive forms of equal discriminant, reduced."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    disc = b1 * b1 - 4 * a1 * c1
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = _xgcd(s, d)
        x2, y2 = u, -v
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - disc) // (4 * a3)
    return reduce_form(a3, b3, c3)


def reduced_forms(disc: int, primitive: bool = True) -> list[tuple[int, int, int]]:
    """All reduced positive definite forms of the given negative discriminant."""
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if primitive and math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
        a += 1
    return out


def identity_form(disc: int) -> tuple[int, int, int]:
    b = disc % 2
    return reduce_form(1, b, (b * b - disc) // 4)


def ideal_to_form(I: QuadIdeal) -> tuple[int, int, int]:
    """Reduced form attached to an invertible ideal of O_f (coprime to f)."""
    f = I.order.conductor
    K = I.field
    g = I.content()
    a, b, c = I.a // g, I.b // g, I.c // g
    if c != f:
        raise ValueError("ideal is not invertible in its order")
    A = a
    B = -(2 * b + f * K.d)
    disc = f * f * K.d
    if (B * B - disc) % (4 * A):
        raise ArithmeticError("lattice is not an ideal of the order")
    return reduce_form(A, B, (B * B - disc) // (4 * A))


def form_to_ideal(order: QuadOrder, form: tuple[int, int, int]) -> QuadIdeal:
    """Primitive ideal [a, (-b + sqrt(disc))/2] of the order."""
    a, b, _ = form
    f = order.conductor
    d = order.field.d
    # (-b + f sqrt d)/2 = (-b - f d)/2 + f w
    x = (-b - f * d) // 2
    return QuadIdeal(order, a, x, f)


class ClassGroup:
    """Picard group of an order, with the ideal -> class map."""

    def __init__(self, order: QuadOrder):
        self.order = order
        disc = order.discriminant
        forms = reduced_forms(disc)
        e = identity_form(disc)
        self._bb = BlackBoxGroup(forms, compose_forms, e)
        self.group: FiniteAbelianGroup = self._bb.group
        self.forms = forms

    def class_of(self, I: QuadIdeal) -> tuple[int, ...]:
        if I.order != self.order:
            if I.order.conductor == 1 and self.order.conductor > 1:
                I = I.intersect_order(self.order.conductor)
            else:
                raise ValueError("ideal of a different order")
        return self._bb.dlog(ideal_to_form(I))

    def form_of(self, g: Sequence[int]) -> tuple[int, int, int]:
        return self._bb.element_of(g)

    def ideal_of(self, g: Sequence[int]) -> QuadIdeal:
        return form_to_ideal(self.order, self.form_of(g))


def class_group(order: QuadOrder) -> ClassGroup:
    K = order.field
    cache = K._cache.setdefault("classgroup", {})
    if order.conductor not in cache:
        cache[order.conductor] = ClassGroup(order)
    return cache[order.conductor]


def class_number_bruteforce(disc: int) -> int:
    return len(reduced_forms(disc))


# ---------------------------------------------------------------------------
# principal ideals
# ---------------------------------------------------------------------------


def principal_generator(I: QuadIdeal) -> tuple[int, int] | None:
    """A generator of a principal O_K-ideal, or None when the ideal is not principal."""
    if I.order.conductor != 1:
        raise ValueError("expected an ideal of the maximal order")
    K = I.field
    x, y = I.basis()
    N = K.norm

    def dot(u, v):
        return (N((u[0] + v[0], u[1] + v[1])) - N(u) - N(v)) / 2

    # Lagrange-Gauss reduction
    if N(x) > N(y):
        x, y = y, x
    while True:
        mu = round(Fraction(dot(x, y)) / N(x))
        y = (y[0] - mu * x[0], y[1] - mu * x[1])
        if N(y) >= N(x):
            break
        x, y = y, x
    if N(x) == I.norm():
        return x
    return None


# ---------------------------------------------------------------------------
# ideal enumeration
# ---------------------------------------------------------------------------


def _prime_power_options(K: QuadField, q: int, e: int, excluded: set) -> list[tuple[dict, QuadIdeal]]:
    spl = splitting(K, q)
    O = K.maximal_order()
    out = []
    if spl.is_split:
        P, Pb = spl.primes
        for i in range(e + 1):
            if (i and P in excluded) or (e - i and Pb in excluded):
                continue
            fac = {}
            if i:
                fac[P] = i
            if e - i:
                fac[Pb] = e - i
            out.append((fac, ideal_mul(P**i, Pb ** (e - i)) if e else O.unit_ideal()))
    elif spl.is_inert:
        if e % 2 == 0 and spl.primes[0] not in excluded:
            P = spl.primes[0]
            out.append(({P: e // 2}, QuadIdeal(O, q ** (e // 2), 0, q ** (e // 2))))
    else:
        P = spl.primes[0]
        if P not in excluded:
            out.append(({P: e}, P**e))
    return out


def _excluded_primes(K: QuadField, modulus) -> set:
    if modulus is None:
        return set()
    if isinstance(modulus, int):
        primes = set()
        for q in sympy.primefactors(modulus):
            primes.update(splitting(K, q).primes)
        return primes
    return set(prime_factorization(modulus))


def ideals_of_norm_factored(order: QuadOrder, n: int, modulus=None) -> list[tuple[QuadIdeal, dict]]:
    """Ideals of norm n coprime to the modulus, each with its prime factorization.

    For a non-maximal order O_f the O_K-ideals coprime to f are returned; they
    correspond bijectively to the invertible O_f-ideals coprime to f.
    """
    K = order.field
    excluded = _excluded_primes(K, modulus)
    if order.conductor > 1:
        excluded |= _excluded_primes(K, order.conductor)
    if n == 1:
        return [(K.maximal_order().unit_ideal(), {})]
    pieces = [_prime_power_options(K, q, e, excluded) for q, e in sorted(sympy.factorint(n).items())]
    out = []
    for combo in itertools.product(*pieces):
        fac: dict = {}
        ideal = None
        for fc, I in combo:
            fac.update(fc)
            ideal = I if ideal is None else ideal_mul(ideal, I)
        out.append((ideal, fac))
    out.sort(key=lambda t: t[0].key)
    return out


def ideals_of_norm(order: QuadOrder, n: int, modulus=None) -> list[QuadIdeal]:
    return [I for I, _ in ideals_of_norm_factored(order, n, modulus)]


def ideals_of_norm_bruteforce(K: QuadField, n: int) -> list[QuadIdeal]:
    """Oracle: every index-n sublattice of O_K closed under multiplication by w."""
    O = K.maximal_order()
    out = []
    for a in sympy.divisors(n):
        c = n // a
        for b in range(a):
            I = QuadIdeal(O, a, b, c)
            if I.is_ideal():
                out.append(I)
    return sorted(out, key=lambda I: I.key)
