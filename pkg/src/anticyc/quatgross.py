"""Definite quaternion algebras, Eichler orders, Brandt matrices, Gross points and
finite-level theta elements for weight 2.

Conventions
-----------
* B = (a, b | Q) with i^2 = a, j^2 = b, k = ij; elements are 4-tuples of Fractions.
* Lattices are stored by a common denominator and an integer Hermite normal form.
* Ideals are right ideals of a fixed Eichler order O; classes are taken up to left
  multiplication by B^x. B(q)[i][j] counts the q-neighbours of I_i lying in class j,
  so every row sums to q + 1 and B(q) acts on functions on the class set as T_q.
* w_i is the full unit count |O_l(I_i)^x|; the mass is sum 1/w_i.
* Gross points of conductor m: right O-ideals I with O_l(I) cap f(K) = f(O_m) for a fixed
  embedding f: K -> B, up to left multiplication by f(K)^x. Pic(O_m) acts by
  sigma . I = f(a_sigma cap O_m) I with a_sigma the least-norm representative.
"""

from __future__ import annotations

import itertools
import math
import pickle
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import sympy

from .abgroup import FiniteAbelianGroup
from .classfield import AssumptionError, RingClassGroup
from .exactnum import PadicNum
from .heckechar import AnticyclotomicSplitting
from .iwasawa import CycPadic, GroupCharacter, GroupRing, GRElt
from .quadfield import QuadField, QuadIdeal, kronecker

Quat = tuple  # (x0, x1, x2, x3) of Fractions

CACHE_MAGIC = b"ANTICYC-BRANDT"
CACHE_VERSION = 1


# ---------------------------------------------------------------------------
# the algebra
# ---------------------------------------------------------------------------


def hilbert_symbol(a: int, b: int, l: int) -> int:
    def split(x):
        e = 0
        while x % l == 0:
            x //= l
            e += 1
        return e, x

    al, u = split(a)
    be, v = split(b)
    if l == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        omg = lambda x: ((x * x - 1) // 8) % 2
        s = eps(u) * eps(v) + al * omg(v) + be * omg(u)
        return -1 if s % 2 else 1
    e = (l - 1) // 2
    sign = -1 if (al * be * e) % 2 else 1
    return sign * int(sympy.legendre_symbol(u % l, l)) ** be * int(sympy.legendre_symbol(v % l, l)) ** al


class QuaternionAlgebra:
    def __init__(self, a: int, b: int):
        self.a, self.b = a, b

    def __repr__(self) -> str:
        return f"QuaternionAlgebra({self.a}, {self.b})"

    def __eq__(self, other) -> bool:
        return isinstance(other, QuaternionAlgebra) and (self.a, self.b) == (other.a, other.b)

    def __hash__(self):
        return hash((self.a, self.b))

    def mul(self, x: Quat, y: Quat) -> Quat:
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    @staticmethod
    def conj(x: Quat) -> Quat:
        return (x[0], -x[1], -x[2], -x[3])

    def nrd(self, x: Quat) -> Fraction:
        a, b = self.a, self.b
        return Fraction(x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3])

    @staticmethod
    def trd(x: Quat) -> Fraction:
        return Fraction(2 * x[0])

    def bilinear(self, x: Quat, y: Quat) -> Fraction:
        """(x, y) with (x, x) = nrd(x)."""
        a, b = self.a, self.b
        return Fraction(x[0] * y[0] - a * x[1] * y[1] - b * x[2] * y[2] + a * b * x[3] * y[3])

    def ramified_primes(self) -> list[int]:
        primes = set(sympy.primefactors(2 * self.a * self.b))
        return sorted(l for l in primes if hilbert_symbol(self.a, self.b, l) == -1)

    def is_definite(self) -> bool:
        return self.a < 0 and self.b < 0


def algebra_for(N_minus: int) -> QuaternionAlgebra:
    """A definite algebra ramified exactly at the primes of N_minus (and infinity)."""
    primes = sympy.primefactors(N_minus)
    if N_minus < 1 or sympy.factorint(N_minus) and any(e > 1 for e in sympy.factorint(N_minus).values()):
        raise AssumptionError("N^- must be squarefree")
    if len(primes) % 2 == 0:
        raise AssumptionError("N^- must have an odd number of prime factors for a definite algebra")
    for s in itertools.count(2):
        for a in range(1, s):
            b = s - a
            if a > b:
                continue
            B = QuaternionAlgebra(-a, -b)
            if B.ramified_primes() == primes:
                return B
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------


def hnf_rows(rows: Iterable[Sequence[int]], ncols: int = 4) -> list[list[int]]:
    """Upper triangular Hermite normal form of the row span (full rank expected)."""
    A = [list(r) for r in rows if any(r)]
    out = []
    for col in range(ncols):
        active = [r for r in A if r[col] != 0]
        rest = [r for r in A if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r2 = [x - q * y for x, y in zip(r, piv)]
                if r2[col] != 0:
                    nxt.append(r2)
                elif any(r2):
                    rest.append(r2)
            active = nxt
        if not active:
            raise ValueError("lattice is not of full rank")
        piv = active[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        A = rest
    for i in range(ncols):
        for r in range(i):
            q = out[r][i] // out[i][i]
            if q:
                out[r] = [x - q * y for x, y in zip(out[r], out[i])]
    return out


class Lattice:
    """A full-rank Z-lattice in B: rows / den with rows in Hermite normal form."""

    __slots__ = ("alg", "den", "rows", "_basis", "_gram")

    def __init__(self, alg: QuaternionAlgebra, den: int, rows: list[list[int]]):
        g = den
        for r in rows:
            for x in r:
                g = math.gcd(g, x)
        if g > 1:
            den //= g
            rows = [[x // g for x in r] for r in rows]
        self.alg, self.den, self.rows = alg, den, tuple(tuple(r) for r in rows)
        self._basis = None
        self._gram = None

    @classmethod
    def from_gens(cls, alg: QuaternionAlgebra, gens: Iterable[Quat]) -> "Lattice":
        gens = [tuple(Fraction(x) for x in g) for g in gens]
        den = 1
        for g in gens:
            for x in g:
                den = math.lcm(den, x.denominator)
        rows = [[int(x * den) for x in g] for g in gens]
        return cls(alg, den, hnf_rows(rows))

    @property
    def key(self):
        return (self.den, self.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, Lattice) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other: "Lattice") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"Lattice(den={self.den}, rows={self.rows})"

    @property
    def basis(self) -> list[Quat]:
        if self._basis is None:
            self._basis = [tuple(Fraction(x, self.den) for x in r) for r in self.rows]
        return self._basis

    def det(self) -> Fraction:
        d = Fraction(1)
        for i in range(4):
            d *= Fraction(self.rows[i][i], self.den)
        return d

    def coords(self, x: Quat) -> list[int] | None:
        """Integer coordinates of x in the basis, or None if x is not in the lattice."""
        v = [Fraction(t) * self.den for t in x]
        if any(t.denominator != 1 for t in v):
            return None
        v = [int(t) for t in v]
        c = [0] * 4
        for i in range(4):
            piv = self.rows[i][i]
            if v[i] % piv:
                return None
            c[i] = v[i] // piv
            if c[i]:
                v = [a - c[i] * b for a, b in zip(v, self.rows[i])]
        return c if not any(v) else None

    def contains(self, x: Quat) -> bool:
        return self.coords(x) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(b) for b in other.basis)

    def __mul__(self, other: "Lattice") -> "Lattice":
        m = self.alg.mul
        return Lattice.from_gens(self.alg, [m(x, y) for x in self.basis for y in other.basis])

    def left_mul(self, gens: Sequence[Quat]) -> "Lattice":
        m = self.alg.mul
        return Lattice.from_gens(self.alg, [m(g, x) for g in gens for x in self.basis])

    def conj(self) -> "Lattice":
        return Lattice.from_gens(self.alg, [self.alg.conj(x) for x in self.basis])

    def scale(self, c) -> "Lattice":
        c = Fraction(c)
        return Lattice.from_gens(self.alg, [tuple(c * t for t in x) for x in self.basis])

    def gram(self) -> list[list[Fraction]]:
        if self._gram is None:
            B = self.basis
            self._gram = [[self.alg.bilinear(B[i], B[j]) for j in range(4)] for i in range(4)]
        return self._gram

    def element(self, c: Sequence[int]) -> Quat:
        B = self.basis
        return tuple(sum((ci * B[i][t] for i, ci in enumerate(c)), Fraction(0)) for t in range(4))

    def elements_of_norm(self, target, at_most: bool = False) -> list[Quat]:
        """All x with nrd(x) == target (or 0 < nrd(x) <= target when at_most)."""
        target = Fraction(target)
        vecs = short_vectors(self.gram(), target)
        out = []
        for c, n in vecs:
            if at_most or n == target:
                out.append(self.element(c))
        return out

    def is_order(self) -> bool:
        one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
        if not self.contains(one):
            return False
        m = self.alg.mul
        for x in self.basis:
            if self.alg.nrd(x).denominator != 1 or self.alg.trd(x).denominator != 1:
                return False
            for y in self.basis:
                if not self.contains(m(x, y)):
                    return False
        return True

    def discriminant(self) -> int:
        """Reduced discriminant: sqrt |det(trd(b_i b_j))|."""
        B = self.basis
        M = sympy.Matrix(4, 4, lambda i, j: sympy.Rational(self.alg.trd(self.alg.mul(B[i], B[j]))))
        d = abs(M.det())
        r = sympy.sqrt(d)
        if not r.is_Integer:
            raise ValueError("discriminant is not a square")
        return int(r)


# ---------------------------------------------------------------------------
# reduction and enumeration
# ---------------------------------------------------------------------------


def lll_gram(G: list[list[Fraction]], delta: Fraction = Fraction(3, 4)) -> tuple[list[list[Fraction]], list[list[int]]]:
    """LLL on a positive definite Gram matrix; returns (reduced Gram, T) with new basis = T * old."""
    n = len(G)
    T = [[int(i == j) for j in range(n)] for i in range(n)]
    G = [row[:] for row in G]

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        Bs = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = G[i][j]
                for k in range(j):
                    s -= mu[j][k] * mu[i][k] * Bs[k]
                mu[i][j] = s / Bs[j]
            s = G[i][i]
            for k in range(i):
                s -= mu[i][k] * mu[i][k] * Bs[k]
            Bs[i] = s
        return mu, Bs

    def sub(i, j, q):
        # b_i -= q b_j
        T[i] = [a - q * b for a, b in zip(T[i], T[j])]
        for k in range(n):
            G[i][k] -= q * G[j][k]
        for k in range(n):
            G[k][i] = G[i][k] if k != i else G[k][i]
        G[i][i] = G[i][i]  # recomputed below
        # fix diagonal: G_ii = (b_i - q b_j, b_i - q b_j) already folded by symmetric updates
        return

    k = 1
    mu, Bs = gso()
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                # update T and G for b_k -= q b_j
                T[k] = [a - q * b for a, b in zip(T[k], T[j])]
                row = [G[k][t] - q * G[j][t] for t in range(n)]
                row[k] = G[k][k] - 2 * q * G[k][j] + q * q * G[j][j]
                for t in range(n):
                    G[k][t] = row[t]
                    G[t][k] = row[t]
                mu, Bs = gso()
        if Bs[k] >= (delta - mu[k][k - 1] ** 2) * Bs[k - 1]:
            k += 1
        else:
            T[k], T[k - 1] = T[k - 1], T[k]
            G[k], G[k - 1] = G[k - 1], G[k]
            for row in G:
                row[k], row[k - 1] = row[k - 1], row[k]
            mu, Bs = gso()
            k = max(k - 1, 1)
    return G, T


def short_vectors(G: list[list[Fraction]], bound: Fraction) -> list[tuple[tuple[int, ...], Fraction]]:
    """All nonzero integer x with x^T G x <= bound, as (x, value)."""
    n = len(G)
    Gr, T = lll_gram(G)
    # Cholesky-type decomposition q_ii, q_ij of the reduced form (floats, exact check after)
    Q = [[float(Gr[i][j]) for j in range(n)] for i in range(n)]
    q = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            q[i][j] = Q[i][j]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    B = float(bound) * (1 + 1e-9) + 1e-9
    out = []
    x = [0] * n

    def rec(i, rem):
        # center for x_i
        c = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(rem, 0.0) / q[i][i])
        lo, hi = math.ceil(c - r - 1e-9), math.floor(c + r + 1e-9)
        for xi in range(lo, hi + 1):
            x[i] = xi
            t = rem - q[i][i] * (xi - c) ** 2
            if t < -1e-9 * (1 + B):
                continue
            if i == 0:
                out.append(tuple(x))
            else:
                rec(i - 1, t)
        x[i] = 0

    rec(n - 1, B)
    res = []
    for v in out:
        if not any(v):
            continue
        val = sum(Gr[i][j] * v[i] * v[j] for i in range(n) for j in range(n))
        if 0 < val <= bound:
            orig = tuple(sum(v[i] * T[i][j] for i in range(n)) for j in range(n))
            res.append((orig, val))
    res.sort()
    return res


# ---------------------------------------------------------------------------
# orders
# ---------------------------------------------------------------------------


def _ring_closure(L: Lattice, limit: int = 10) -> Lattice | None:
    for _ in range(limit):
        L2 = Lattice.from_gens(L.alg, list(L.basis) + [L.alg.mul(x, y) for x in L.basis for y in L.basis])
        if L2 == L:
            return L
        for x in L2.basis:
            if L.alg.nrd(x).denominator != 1 or L.alg.trd(x).denominator != 1:
                return None
        L = L2
    return None


def maximal_order(alg: QuaternionAlgebra) -> Lattice:
    """A maximal order, by enlarging Z<i, j> one prime at a time."""
    one = (1, 0, 0, 0)
    O = Lattice.from_gens(alg, [one, (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    target = math.prod(alg.ramified_primes())
    while True:
        d = O.discriminant()
        if d == target:
            return O
        l = min(sympy.primefactors(d // target))
        found = None
        for c in itertools.product(range(l), repeat=4):
            if not any(c):
                continue
            x = tuple(Fraction(t, l) for t in O.element(c))
            if alg.nrd(x).denominator != 1 or alg.trd(x).denominator != 1:
                continue
            L = _ring_closure(Lattice.from_gens(alg, list(O.basis) + [x]))
            if L is not None and L.is_order():
                found = L
                break
        if found is None:
            raise ArithmeticError(f"could not enlarge the order at {l}")
        O = found


def _mod_l_kernel(rows: list[list[int]], l: int) -> list[list[int]]:
    M = sympy.Matrix(rows)
    ns = M.nullspace(iszerofunc=lambda x: x % l == 0) if False else None
    # Gaussian elimination mod l
    A = [[x % l for x in r] for r in rows]
    ncols = len(A[0]) if A else 0
    piv_cols = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = pow(A[r][c], -1, l)
        A[r] = [(x * inv) % l for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % l for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in piv_cols]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for i, pc in enumerate(piv_cols):
            v[pc] = (-A[i][fcol]) % l
        basis.append(v)
    return basis


def eichler_order(O: Lattice, N_plus: int) -> Lattice:
    """{x in O : I x in I} for I = O l + O e with e of norm divisible by l, for each l | N^+."""
    alg = O.alg
    if N_plus == 1:
        return O
    parts = []
    for l in sympy.primefactors(N_plus):
        if N_plus % (l * l) == 0:
            raise AssumptionError("N^+ must be squarefree")
        e = None
        for c in itertools.product(range(l), repeat=4):
            if not any(c):
                continue
            x = O.element(c)
            if alg.nrd(x) % l == 0:
                e = x
                break
        I = Lattice.from_gens(alg, [tuple(l * t for t in b) for b in O.basis] + [alg.mul(b, e) for b in O.basis])
        # coordinates mod l relative to O
        Ic = [O.coords(b) for b in I.basis]
        # I / lO: the rows of Ic mod l span a 2-dimensional subspace V
        V = _row_space_mod(Ic, l)
        comp = _complement_projection(V, l)
        # x in O/lO with g x in V for g in V-basis: linear in x
        eqs = []
        for g in V:
            gq = O.element(g)
            cols = []
            for t in range(4):
                img = O.coords(alg.mul(gq, O.basis[t]))
                cols.append(comp(img))
            for row in range(len(cols[0])):
                eqs.append([cols[t][row] for t in range(4)])
        ker = _mod_l_kernel(eqs, l)
        E = Lattice.from_gens(alg, [tuple(l * t for t in b) for b in O.basis] + [O.element(v) for v in ker])
        parts.append((l, E))
    if len(parts) == 1:
        return parts[0][1]
    N = N_plus
    gens = []
    for l, E in parts:
        gens += [tuple((N // l) * t for t in b) for b in E.basis]
    return Lattice.from_gens(alg, gens)


def _row_space_mod(rows: list[list[int]], l: int) -> list[list[int]]:
    A = [[x % l for x in r] for r in rows]
    out = []
    for c in range(4):
        p = next((i for i, r in enumerate(A) if r[c] and all(r[t] == 0 for t in range(c))), None)
        if p is None:
            continue
        r = A.pop(p)
        inv = pow(r[c], -1, l)
        r = [(x * inv) % l for x in r]
        A = [[(x - s[c] * y) % l for x, y in zip(s, r)] if s[c] else s for s in A]
        out.append(r)
    return out


def _complement_projection(V: list[list[int]], l: int):
    """Linear map F_l^4 -> F_l^{4 - dim V} with kernel V."""
    pivots = [next(c for c in range(4) if r[c]) for r in V]
    free = [c for c in range(4) if c not in pivots]

    def proj(x):
        x = [t % l for t in x]
        for r, pc in zip(V, pivots):
            if x[pc]:
                f = x[pc]
                x = [(a - f * b) % l for a, b in zip(x, r)]
        return [x[c] for c in free]

    return proj


# ---------------------------------------------------------------------------
# right ideals
# ---------------------------------------------------------------------------


def _sqrt_fraction(x: Fraction) -> Fraction:
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n != x.numerator or d * d != x.denominator:
        raise ValueError("not a square")
    return Fraction(n, d)


class IdealClassSet:
    """Right ideals of an Eichler order O, their classes, neighbours and invariants."""

    def __init__(self, O: Lattice):
        self.O = O
        self.alg = O.alg
        self._detO = O.det()
        self._nrd_cache: dict = {}
        self._inv_cache: dict = {}

    def nrd(self, I: Lattice) -> Fraction:
        if I not in self._nrd_cache:
            self._nrd_cache[I] = _sqrt_fraction(abs(I.det() / self._detO))
        return self._nrd_cache[I]

    def left_order(self, I: Lattice) -> Lattice:
        return (I * I.conj()).scale(1 / self.nrd(I))

    def invariant(self, I: Lattice, bound: int = 3) -> tuple[int, ...]:
        """Counts of x in I with nrd(x)/nrd(I) = 1..bound."""
        if I not in self._inv_cache:
            n = self.nrd(I)
            counts = [0] * bound
            for c, val in short_vectors(I.gram(), n * bound):
                t = val / n
                if t.denominator == 1 and 1 <= t <= bound:
                    counts[int(t) - 1] += 1
            self._inv_cache[I] = tuple(counts)
        return self._inv_cache[I]

    def equivalence(self, I: Lattice, J: Lattice) -> Quat | None:
        """x in B^x with x I = J, or None."""
        if self.invariant(I) != self.invariant(J):
            return None
        L = J * I.conj()
        nI, nJ = self.nrd(I), self.nrd(J)
        xs = L.elements_of_norm(nI * nJ)
        if not xs:
            return None
        x = xs[0]
        return tuple(t / nI for t in x)

    def neighbors(self, I: Lattice, q: int) -> list[Lattice]:
        """The q + 1 right ideals J with qI < J < I of index q^2, sorted."""
        alg = self.alg
        nI = self.nrd(I)
        qI = [tuple(q * t for t in b) for b in I.basis]
        found: dict = {}
        target = q * q * abs(I.det())
        for c in itertools.product(range(q), repeat=4):
            if not any(c):
                continue
            x = I.element(c)
            t = alg.nrd(x) / nI
            if t.denominator != 1 or t.numerator % q:
                continue
            if any(J.contains(x) for J in found.values()):
                continue
            J = Lattice.from_gens(alg, qI + [alg.mul(x, o) for o in self.O.basis])
            if abs(J.det()) != target:
                continue
            found[J.key] = J
            if len(found) == q + 1:
                break
        out = sorted(found.values())
        if len(out) != q + 1:
            raise ArithmeticError(f"found {len(out)} neighbours at {q}, expected {q + 1}")
        return out

    def unit_count(self, I: Lattice) -> int:
        R = self.left_order(I)
        return len(R.elements_of_norm(1))


# ---------------------------------------------------------------------------
# Brandt systems
# ---------------------------------------------------------------------------


def eichler_mass(N_minus: int, N_plus: int) -> Fraction:
    m = Fraction(1, 24)
    for l in sympy.primefactors(N_minus):
        m *= l - 1
    for l in sympy.primefactors(N_plus):
        m *= l + 1
    return m


class BrandtSystem:
    def __init__(self, N_minus: int, N_plus: int, Q: int = 13):
        if math.gcd(N_minus, N_plus) != 1:
            raise AssumptionError("N^- and N^+ must be coprime")
        self.N_minus, self.N_plus, self.Q = N_minus, N_plus, Q
        self.N = N_minus * N_plus
        self.alg = algebra_for(N_minus)
        self.maximal = maximal_order(self.alg)
        self.order = eichler_order(self.maximal, N_plus)
        if self.order.discriminant() != self.N:
            raise ArithmeticError("Eichler order has the wrong discriminant")
        self.cs = IdealClassSet(self.order)
        self.mass = eichler_mass(N_minus, N_plus)
        self.q0 = next(q for q in sympy.primerange(2, 10**6) if self.N % q)
        self._build_classes()
        self._brandt: dict[int, list[list[int]]] = {}
        self._nbr_cache: dict = {}

    def __repr__(self) -> str:
        return f"BrandtSystem(N-={self.N_minus}, N+={self.N_plus}, h={self.h})"

    def _build_classes(self):
        reps = [self.order]
        weights = [self.cs.unit_count(self.order)]
        queue = [self.order]
        total = Fraction(1, weights[0])
        while queue and total < self.mass:
            I = queue.pop(0)
            for J in self.cs.neighbors(I, self.q0):
                if self._find_class(J, reps) is None:
                    reps.append(J)
                    w = self.cs.unit_count(J)
                    weights.append(w)
                    total += Fraction(1, w)
                    queue.append(J)
                    if total >= self.mass:
                        break
        if total != self.mass:
            raise ArithmeticError(f"mass mismatch: {total} != {self.mass}")
        self.reps = reps
        self.weights = weights
        self.h = len(reps)

    def _find_class(self, J: Lattice, reps: list[Lattice]) -> int | None:
        for i, I in enumerate(reps):
            if self.cs.equivalence(I, J) is not None:
                return i
        return None

    def class_index(self, J: Lattice) -> int:
        i = self._find_class(J, self.reps)
        if i is None:
            raise ArithmeticError("ideal in no known class")
        return i

    def neighbors(self, I: Lattice, q: int) -> list[Lattice]:
        key = (I.key, q)
        if key not in self._nbr_cache:
            self._nbr_cache[key] = self.cs.neighbors(I, q)
        return self._nbr_cache[key]

    def brandt(self, q: int) -> list[list[int]]:
        if self.N % q == 0:
            raise ValueError("q divides the level")
        if q not in self._brandt:
            M = [[0] * self.h for _ in range(self.h)]
            for i, I in enumerate(self.reps):
                for J in self.cs.neighbors(I, q):
                    M[i][self.class_index(J)] += 1
            self._brandt[q] = M
        return self._brandt[q]

    def mass_sum(self) -> Fraction:
        return sum((Fraction(1, w) for w in self.weights), Fraction(0))

    def eisenstein(self) -> list[int]:
        return [1] * self.h

    def eigenvector(self, a: dict[int, int], primes: Iterable[int] | None = None) -> list[int]:
        """The joint eigenvector with B(q) v = a_q v, as a primitive integer vector."""
        qs = [q for q in (primes or sorted(a)) if self.N % q and q in a]
        if not qs:
            raise ValueError("no usable Hecke eigenvalues")
        rows = []
        for q in qs:
            M = sympy.Matrix(self.brandt(q)) - a[q] * sympy.eye(self.h)
            rows.append(M)
        ns = sympy.Matrix.vstack(*rows).nullspace()
        if not ns:
            raise ArithmeticError("no eigenvector for these eigenvalues")
        if len(ns) > 1:
            raise ArithmeticError("eigenspace is not one-dimensional; use more primes")
        v = ns[0]
        den = sympy.ilcm(*[sympy.Rational(x).q for x in v])
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = math.gcd(g, x)
        w = [x // g for x in w]
        first = next(x for x in w if x)
        if first < 0:
            w = [-x for x in w]
        return w

    def check_eigenvector(self, v: Sequence[int], a: dict[int, int]) -> dict[int, bool]:
        out = {}
        for q, aq in sorted(a.items()):
            if self.N % q:
                B = self.brandt(q)
                out[q] = all(sum(B[i][j] * v[j] for j in range(self.h)) == aq * v[i] for i in range(self.h))
        return out

    def weighted_symmetric(self, q: int) -> bool:
        """w_j B_ij = w_i B_ji."""
        B, w = self.brandt(q), self.weights
        return all(w[j] * B[i][j] == w[i] * B[j][i] for i in range(self.h) for j in range(self.h))

    def commute(self, qs: Sequence[int]) -> bool:
        mats = [sympy.Matrix(self.brandt(q)) for q in qs]
        return all(A * B == B * A for A, B in itertools.combinations(mats, 2))


def class_set_and_brandt(N_minus: int, N_plus: int, Q: int = 13) -> BrandtSystem:
    sys = BrandtSystem(N_minus, N_plus, Q)
    for q in sympy.primerange(2, Q + 1):
        if sys.N % q:
            sys.brandt(q)
    return sys


def save_brandt(sys: BrandtSystem, path: str) -> None:
    from .thetamods import atomic_write

    data = {
        "N_minus": sys.N_minus,
        "N_plus": sys.N_plus,
        "Q": sys.Q,
        "algebra": (sys.alg.a, sys.alg.b),
        "order": (sys.order.den, sys.order.rows),
        "reps": [(I.den, I.rows) for I in sys.reps],
        "weights": sys.weights,
        "brandt": sys._brandt,
    }
    atomic_write(path, CACHE_MAGIC + bytes([CACHE_VERSION]) + pickle.dumps(data, protocol=4))


def load_brandt(path: str) -> BrandtSystem:
    with open(path, "rb") as fh:
        raw = fh.read()
    if not raw.startswith(CACHE_MAGIC):
        raise ValueError("not a Brandt cache file")
    version = raw[len(CACHE_MAGIC)]
    if version != CACHE_VERSION:
        raise ValueError(f"cache version {version} is not supported")
    data = pickle.loads(raw[len(CACHE_MAGIC) + 1 :])
    sys = BrandtSystem.__new__(BrandtSystem)
    sys.N_minus, sys.N_plus, sys.Q = data["N_minus"], data["N_plus"], data["Q"]
    sys.N = sys.N_minus * sys.N_plus
    sys.alg = QuaternionAlgebra(*data["algebra"])
    sys.order = Lattice(sys.alg, data["order"][0], [list(r) for r in data["order"][1]])
    sys.maximal = None
    sys.cs = IdealClassSet(sys.order)
    sys.mass = eichler_mass(sys.N_minus, sys.N_plus)
    sys.q0 = next(q for q in sympy.primerange(2, 10**6) if sys.N % q)
    sys.reps = [Lattice(sys.alg, d, [list(r) for r in rows]) for d, rows in data["reps"]]
    sys.weights = list(data["weights"])
    sys.h = len(sys.reps)
    sys._brandt = dict(data["brandt"])
    sys._nbr_cache = {}
    return sys


# ---------------------------------------------------------------------------
# Gross points
# ---------------------------------------------------------------------------


def heegner_check(N_minus: int, N_plus: int, K: QuadField, p: int, c: int) -> list[tuple[str, bool]]:
    d = K.d
    checks = []
    for l in sympy.primefactors(N_minus):
        checks.append((f"{l} | N^- is inert in K", kronecker(d, l) == -1))
    for l in sympy.primefactors(N_plus):
        checks.append((f"{l} | N^+ is split in K", kronecker(d, l) == 1))
    checks.append((f"p = {p} is inert in K", kronecker(d, p) == -1))
    checks.append(("gcd(c p, N D_K) = 1", math.gcd(c * p, N_minus * N_plus * K.D) == 1))
    return checks


def embedding_number(N_minus: int, N_plus: int, K: QuadField, m: int) -> int:
    """Total number of optimal embeddings of O_m into the class set, up to units (Eichler)."""
    h = RingClassGroup(K, m).full.order()
    e = 1
    for l in sympy.primefactors(N_minus):
        e *= 1 - kronecker(K.d, l)
    for l in sympy.primefactors(N_plus):
        e *= 1 + kronecker(K.d, l)
    return h * e


def _omega_data(K: QuadField) -> tuple[int, int]:
    """Trace and norm of w."""
    d = K.d
    return d, (d * d - d) // 4


def optimal_embeddings_bruteforce(sys: BrandtSystem, K: QuadField, m: int) -> int:
    """Count optimal embeddings of O_m by lattice search, weighted by |O_m^x| / |R_i^x|."""
    t, n = _omega_data(K)
    T, Nm = m * t, m * m * n
    units_m = K.num_units if m == 1 else 2
    total = Fraction(0)
    for I, w in zip(sys.reps, sys.weights):
        R = sys.cs.left_order(I)
        cnt = 0
        for z in R.elements_of_norm(Nm):
            if sys.alg.trd(z) != T:
                continue
            if any(R.contains(tuple(s / l for s in z)) for l in sympy.primefactors(m)):
                continue
            cnt += 1
        total += Fraction(cnt * units_m, w)
    if total.denominator != 1:
        raise ArithmeticError("non-integral embedding count")
    return int(total)


@dataclass
class GrossLevel:
    n: int
    conductor: int
    ring: RingClassGroup
    elements: list
    reps: dict
    base: Lattice
    points: dict
    classes: dict


class GrossPoints:
    """Gross points of conductor c p^n along a fixed embedding f and a fixed path of base points."""

    def __init__(self, sys: BrandtSystem, K: QuadField, c: int, p: int):
        failed = [name for name, ok in heegner_check(sys.N_minus, sys.N_plus, K, p, c) if not ok]
        if failed:
            raise AssumptionError("; ".join(failed))
        self.sys, self.K, self.c, self.p = sys, K, c, p
        self.alg = sys.alg
        self._levels: dict[int, GrossLevel] = {}
        self._find_base()

    def f(self, x: Sequence) -> Quat:
        """f(u + v w) = u + v y."""
        u, v = Fraction(x[0]), Fraction(x[1])
        return (u + v * self.y[0], v * self.y[1], v * self.y[2], v * self.y[3])

    def _find_base(self):
        t, n = _omega_data(self.K)
        c = self.c
        for I in self.sys.reps:
            R = self.sys.cs.left_order(I)
            cands = [z for z in R.elements_of_norm(c * c * n) if self.alg.trd(z) == c * t]
            for z in sorted(cands):
                if any(R.contains(tuple(s / l for s in z)) for l in sympy.primefactors(c)):
                    continue
                self.y = tuple(s / c for s in z)
                self.base0 = I
                return
        raise ArithmeticError("no optimal embedding of O_c found")

    def conductor(self, I: Lattice, max_exp: int) -> int:
        R = self.sys.cs.left_order(I)
        divs = sorted(self.c * self.p**e for e in range(max_exp + 1))
        divs = sorted(set(d2 for d in divs for d2 in sympy.divisors(d)))
        for m in divs:
            if R.contains(tuple(m * s for s in self.y)):
                return m
        raise ArithmeticError("conductor exceeds the search range")

    def act(self, a: QuadIdeal, m: int, I: Lattice) -> Lattice:
        """f(a cap O_m) I."""
        A, B, C = a.a, a.b, a.c
        g = math.gcd(m, C)
        gens = [(A, 0), ((m // g) * B, (m // g) * C)]
        return I.left_mul([self.f(x) for x in gens])

    def level(self, n: int) -> GrossLevel:
        if n in self._levels:
            return self._levels[n]
        m = self.c * self.p**n
        if n == 0:
            base = self.base0
        else:
            prev = self.level(n - 1).base
            ups = [J for J in self.sys.neighbors(prev, self.p) if self.conductor(J, n + 1) == m]
            if not ups:
                raise ArithmeticError("no neighbour of the expected conductor")
            base = ups[0]
        ring = RingClassGroup(self.K, m)
        elements = sorted(ring.full.elements())
        reps = {g: ring.representative(g) for g in elements}
        points = {g: self.act(reps[g], m, base) for g in elements}
        classes = {g: self.sys.class_index(points[g]) for g in elements}
        lvl = GrossLevel(n, m, ring, elements, reps, base, points, classes)
        self._levels[n] = lvl
        return lvl

    def project(self, g, n_from: int, n_to: int):
        """Image of a Galois element of level n_from in the group of level n_to."""
        src = self.level(n_from)
        dst = self.level(n_to)
        return dst.ring.full_class_of(src.reps[g])

    def k_equivalent(self, I: Lattice, J: Lattice) -> bool:
        """J = f(lambda) I for some lambda in K^x."""
        cs = self.sys.cs
        if cs.invariant(I) != cs.invariant(J):
            return False
        L = J * I.conj()
        y = self.y
        m = self.alg.mul
        for x in L.elements_of_norm(cs.nrd(I) * cs.nrd(J)):
            if m(x, y) == m(y, x):
                return True
        return False


def gross_points(sys: BrandtSystem, K: QuadField, c: int, p: int, n: int) -> GrossLevel:
    return GrossPoints(sys, K, c, p).level(n)


@dataclass
class TraceReport:
    n: int
    points: int
    relation_failures: int
    structure_failures: int
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.relation_failures == 0 and self.structure_failures == 0


def trace_relation_check(
    gp: GrossPoints, n: int, v: Sequence, a_p, structural: bool = True
) -> TraceReport:
    """a_p v(x) = sum over the p points above x of v + v(point below), for every level-n point x.

    At n = 0 all p + 1 neighbours lie above. With ``structural`` the neighbours are
    matched, up to K^x, with the Galois orbit of the base points one level up and down.
    """
    p = gp.p
    lvl = gp.level(n)
    up = gp.level(n + 1) if structural else None
    down = gp.level(n - 1) if (structural and n > 0) else None
    fiber: dict = {}
    if structural:
        for g in up.elements:
            fiber.setdefault(gp.project(g, n + 1, n), []).append(g)
    rel_bad = 0
    str_bad = 0
    details = []
    m = lvl.conductor
    for g in lvl.elements:
        x = lvl.points[g]
        nbrs = gp.sys.neighbors(x, p)
        conds = [gp.conductor(J, n + 2) for J in nbrs]
        above = [J for J, cd in zip(nbrs, conds) if cd == m * p]
        below = [J for J, cd in zip(nbrs, conds) if cd == m // p] if n > 0 else []
        expect_above = p + 1 if n == 0 else p
        if len(above) != expect_above or len(below) != (1 if n > 0 else 0):
            str_bad += 1
            details.append((g, "neighbour conductors", conds))
            continue
        lhs = a_p * v[lvl.classes[g]]
        rhs = sum(v[gp.sys.class_index(J)] for J in above) + sum(v[gp.sys.class_index(J)] for J in below)
        if lhs != rhs:
            rel_bad += 1
            details.append((g, "relation", lhs, rhs))
        if structural:
            cands = [up.points[h] for h in fiber.get(g, [])]
            if len(cands) != len(above):
                str_bad += 1
                details.append((g, "fiber size", len(cands), len(above)))
            else:
                used = set()
                for J in above:
                    hit = [i for i, P in enumerate(cands) if i not in used and gp.k_equivalent(P, J)]
                    if len(hit) != 1:
                        str_bad += 1
                        details.append((g, "up match", len(hit)))
                        break
                    used.add(hit[0])
            if down is not None:
                P = down.points[gp.project(g, n, n - 1)]
                if not gp.k_equivalent(P, below[0]):
                    str_bad += 1
                    details.append((g, "down match"))
    return TraceReport(n, len(lvl.elements), rel_bad, str_bad, details)


# ---------------------------------------------------------------------------
# theta elements
# ---------------------------------------------------------------------------


def unit_root(a_p: int, p: int, prec: int) -> PadicNum:
    """The root of X^2 - a_p X + p that is a p-adic unit."""
    if a_p % p == 0:
        raise AssumptionError("a_p is not a p-adic unit (f is not ordinary at p)")
    mod = p**prec
    x = a_p % p
    for _ in range(prec + 2):
        fx = (x * x - a_p * x + p) % mod
        dfx = (2 * x - a_p) % mod
        x = (x - fx * pow(dfx, -1, mod)) % mod
    return PadicNum(p, 2, prec, x)


@dataclass
class ThetaElement:
    """Theta_n = alpha^{-n} S_n with S_n = sum_sigma v(x_n^sigma) [sigma] in Z[G_n]."""

    n: int
    group: FiniteAbelianGroup
    sums: dict
    alpha: PadicNum | None
    base_shift: tuple = ()

    def regularized(self, prec: int) -> GRElt:
        R = GroupRing(self.group, self.alpha.p, prec)
        scale = self.alpha.inverse() ** self.n if self.n else PadicNum(self.alpha.p, 2, prec, 1)
        return R.element({g: scale * c for g, c in self.sums.items()})

    def eval_complex(self, k: Sequence[int]) -> complex:
        import cmath

        total = 0j
        for g, c in self.sums.items():
            e = sum(Fraction(ki * gi, d) for ki, gi, d in zip(k, g, self.group.invariants)) % 1
            total += c * cmath.exp(2j * math.pi * float(e))
        return total

    def eval_exact(self, k: Sequence[int]) -> dict[Fraction, int]:
        """S_n evaluated at the character k, as {root-of-unity exponent: integer multiplicity}."""
        out: dict[Fraction, int] = {}
        for g, c in self.sums.items():
            e = sum(Fraction(ki * gi, d) for ki, gi, d in zip(k, g, self.group.invariants)) % 1
            out[e] = out.get(e, 0) + c
        return {e: c for e, c in out.items() if c}

    def eval_padic(self, k: Sequence[int], prec: int) -> CycPadic:
        chi = GroupCharacter(self.group, k)
        from .iwasawa import eval_char

        return eval_char(self.regularized(prec), chi)


def theta_element(gp: GrossPoints, v: Sequence[int], n: int, alpha: PadicNum | None, base_shift=None) -> ThetaElement:
    lvl = gp.level(n)
    G = lvl.ring.full
    sums: dict = {}
    for g in lvl.elements:
        h = G.add(g, base_shift) if base_shift is not None else g
        c = v[lvl.classes[h]]
        if c:
            sums[g] = sums.get(g, 0) + c
    return ThetaElement(n, G, sums, alpha, tuple(base_shift) if base_shift is not None else ())


def corestriction_check(gp: GrossPoints, v: Sequence[int], a_p: int, n: int) -> bool:
    """pi(S_{n+1}) = a_p S_n - nu(S_{n-1}) (n >= 1), pi(S_1) = a_p S_0 up to the unit index (n = 0).

    pi pushes forward to level n; nu sends [tau] to the sum of its preimages.
    """
    lvl, up = gp.level(n), gp.level(n + 1)
    S_up = theta_element(gp, v, n + 1, None).sums
    S = theta_element(gp, v, n, None).sums
    pushed: dict = {}
    for g, c in S_up.items():
        h = gp.project(g, n + 1, n)
        pushed[h] = pushed.get(h, 0) + c
    u = 1
    if n == 0:
        u = (gp.p + 1) * lvl.ring.full.order() // up.ring.full.order()
    expected: dict = {g: a_p * S.get(g, 0) // 1 for g in lvl.elements}
    if n == 0:
        expected = {g: a_p * S.get(g, 0) for g in lvl.elements}
        return all(u * pushed.get(g, 0) == expected[g] for g in lvl.elements)
    low = gp.level(n - 1)
    S_low = theta_element(gp, v, n - 1, None).sums
    for g in lvl.elements:
        expected[g] -= S_low.get(gp.project(g, n, n - 1), 0)
    return all(pushed.get(g, 0) == expected[g] for g in lvl.elements)


def stabilized_theta(gp: GrossPoints, v: Sequence[int], n: int, alpha: PadicNum) -> dict:
    """theta_n = alpha^{-n} (S_n - alpha^{-1} nu(S_{n-1})) as {sigma: PadicNum}; theta_0 = S_0.

    These are compatible under projection for n >= 1, and pi(theta_1) = (1 - alpha^{-2}) theta_0.
    """
    lvl = gp.level(n)
    S = theta_element(gp, v, n, None).sums
    ainv = alpha.inverse()
    out = {}
    if n == 0:
        return {g: ainv**0 * S.get(g, 0) for g in lvl.elements}
    low = theta_element(gp, v, n - 1, None).sums
    scale = ainv**n
    for g in lvl.elements:
        c = scale * (ainv * (-low.get(gp.project(g, n, n - 1), 0)) + S.get(g, 0))
        out[g] = c
    return out


def project_padic(gp: GrossPoints, x: dict, n_from: int, n_to: int) -> dict:
    out: dict = {}
    for g, c in x.items():
        h = gp.project(g, n_from, n_to)
        out[h] = out[h] + c if h in out else c
    return out


def inversion_symmetry(theta: ThetaElement) -> tuple[int, tuple] | None:
    """(sign, g0) with iota(S_n) = sign [g0] S_n, or None."""
    G = theta.group
    inv = {G.neg(g): c for g, c in theta.sums.items()}
    if not theta.sums:
        return (1, G.zero())
    some = min(theta.sums)
    for sign in (1, -1):
        for g0 in G.elements():
            shifted = {G.add(g0, g): sign * c for g, c in theta.sums.items()}
            if shifted == inv:
                return sign, g0
    return None


def padic_valuation(x: CycPadic) -> int:
    """Largest r with x in p^r Z_{p^2}[zeta] at the working precision (prec if zero)."""
    p, prec = x.p, x.prec
    best = prec
    for a, b in x.reduced():
        for t in (a, b):
            if t:
                v = 0
                while t % p == 0 and v < prec:
                    t //= p
                    v += 1
                best = min(best, v)
    return best


def eval_wild(
    theta: ThetaElement,
    p: int,
    chi_minus: Fraction,
    chi_t: Sequence[Fraction] | None = None,
    prec: int = 6,
) -> tuple[CycPadic, int]:
    """Evaluate Theta_n at the character (chi_t, chi^-) of Delta x Gamma; returns (value, valuation).

    chi^- is the value exponent on the fixed generator of Gamma; chi_t the value
    exponents on the Delta generators (trivial when omitted).
    """
    S = AnticyclotomicSplitting(theta.group, p)
    if chi_t is None:
        chi_t = [Fraction(0)] * S.delta.rank
    if Fraction(chi_minus) * S.gamma_order % 1 != 0:
        raise ValueError("wild character has too high a level for this theta element")
    k = S.recombine_character(chi_t, Fraction(chi_minus))
    val = theta.eval_padic(k, prec)
    return val, padic_valuation(val)
