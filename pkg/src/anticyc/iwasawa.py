"""Finite-level models of Iwasawa algebras: group rings O[G] with O = Z_{p^2} / p^prec,
the automorphism sigma of O[G x G], the anticyclotomic projection tau, character
twists and evaluation at characters.

Characters of p-power order take values in Z_{p^2}[zeta_M], which is ramified over
Z_{p^2}; such values are carried as polynomials in zeta_M with PadicNum coefficients
(``CycPadic``) and reduced modulo Phi_M only when compared.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .abgroup import FiniteAbelianGroup
from .exactnum import PadicNum, cyclotomic_coeffs

Elt = tuple[int, ...]


class CycPadic:
    """sum_k c_k zeta_M^k with c_k in Z_{p^2}/p^prec."""

    __slots__ = ("p", "prec", "M", "c")

    def __init__(self, p: int, prec: int, M: int, coeffs: dict[int, PadicNum] | None = None):
        self.p, self.prec, self.M = p, prec, M
        self.c: dict[int, PadicNum] = {}
        for k, v in (coeffs or {}).items():
            k %= M
            self.c[k] = self.c[k] + v if k in self.c else v

    @classmethod
    def scalar(cls, x: PadicNum, M: int = 1) -> "CycPadic":
        return cls(x.p, x.prec, M, {0: x})

    @classmethod
    def root(cls, p: int, prec: int, f: Fraction) -> "CycPadic":
        f = Fraction(f) % 1
        M = f.denominator
        return cls(p, prec, M, {f.numerator: PadicNum(p, 2, prec, 1)})

    def embed(self, M2: int) -> "CycPadic":
        if M2 % self.M:
            raise ValueError("target conductor must be a multiple")
        s = M2 // self.M
        return CycPadic(self.p, self.prec, M2, {k * s: v for k, v in self.c.items()})

    def _align(self, other: "CycPadic") -> tuple["CycPadic", "CycPadic"]:
        from math import lcm

        M = lcm(self.M, other.M)
        return self.embed(M), other.embed(M)

    def __add__(self, other):
        if isinstance(other, PadicNum):
            other = CycPadic.scalar(other)
        a, b = self._align(other)
        out = dict(a.c)
        for k, v in b.c.items():
            out[k] = out[k] + v if k in out else v
        return CycPadic(self.p, min(self.prec, other.prec), a.M, out)

    __radd__ = __add__

    def __neg__(self):
        return CycPadic(self.p, self.prec, self.M, {k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (PadicNum, int)):
            return CycPadic(self.p, self.prec, self.M, {k: v * other for k, v in self.c.items()})
        a, b = self._align(other)
        out: dict[int, PadicNum] = {}
        for (k1, v1), (k2, v2) in itertools.product(a.c.items(), b.c.items()):
            k = (k1 + k2) % a.M
            out[k] = out[k] + v1 * v2 if k in out else v1 * v2
        return CycPadic(self.p, min(self.prec, other.prec), a.M, out)

    __rmul__ = __mul__

    def reduced(self) -> list[tuple[int, int]]:
        """Coefficients in the power basis of Q(zeta_M), as pairs of residues mod p^prec."""
        phi = cyclotomic_coeffs(self.M)
        deg = len(phi) - 1
        mod = self.p**self.prec
        vec = [[0, 0] for _ in range(max(self.M, deg))]
        for k, v in self.c.items():
            vec[k][0] += v.a
            vec[k][1] += v.b
        for k in range(len(vec) - 1, deg - 1, -1):
            ca, cb = vec[k]
            if ca or cb:
                vec[k] = [0, 0]
                base = k - deg
                for i in range(deg):
                    if phi[i]:
                        vec[base + i][0] -= ca * phi[i]
                        vec[base + i][1] -= cb * phi[i]
        return [(a % mod, b % mod) for a, b in vec[:deg]]

    def __eq__(self, other) -> bool:
        if isinstance(other, PadicNum):
            other = CycPadic.scalar(other)
        if not isinstance(other, CycPadic):
            return NotImplemented
        a, b = self._align(other)
        prec = min(self.prec, other.prec)
        mod = self.p**prec
        ra = [(x % mod, y % mod) for x, y in a.reduced()]
        rb = [(x % mod, y % mod) for x, y in b.reduced()]
        return ra == rb

    __hash__ = None  # type: ignore[assignment]

    def as_padic(self) -> PadicNum:
        """The value when it lies in Z_{p^2}."""
        red = self.reduced()
        if any(x or y for x, y in red[1:]):
            raise ValueError("value is not in the unramified layer")
        return PadicNum(self.p, 2, self.prec, *red[0])

    def __repr__(self) -> str:
        return f"CycPadic(M={self.M}, {self.reduced()})"


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------


class GroupCharacter:
    """chi(g) = zeta^{sum k_i g_i / d_i} * prod u_i^{g_i} on a finite abelian group.

    ``k`` gives the finite-order part on the Smith generators; ``units`` optionally
    gives PadicNum values u_i with u_i^{d_i} = 1 to the working precision.
    """

    def __init__(self, G: FiniteAbelianGroup, k: Sequence[int] | None = None, units: Sequence[PadicNum] | None = None):
        self.G = G
        self.k = tuple(int(x) % d for x, d in zip(k, G.invariants)) if k is not None else (0,) * G.rank
        self.units = tuple(units) if units is not None else None

    def exponent(self, g: Sequence[int]) -> Fraction:
        return sum((Fraction(ki * gi, d) for ki, gi, d in zip(self.k, g, self.G.invariants)), Fraction(0)) % 1

    def value(self, g: Sequence[int], p: int, prec: int) -> CycPadic:
        v = CycPadic.root(p, prec, self.exponent(g))
        if self.units is not None:
            u = PadicNum(p, 2, prec, 1)
            for ui, gi, d in zip(self.units, g, self.G.invariants):
                u = u * ui ** (gi % d)
            v = v * u
        return v

    def __mul__(self, other: "GroupCharacter") -> "GroupCharacter":
        if other.G != self.G:
            raise ValueError("characters of different groups")
        k = [a + b for a, b in zip(self.k, other.k)]
        if self.units is None:
            units = other.units
        elif other.units is None:
            units = self.units
        else:
            units = [a * b for a, b in zip(self.units, other.units)]
        return GroupCharacter(self.G, k, units)

    @classmethod
    def trivial(cls, G: FiniteAbelianGroup) -> "GroupCharacter":
        return cls(G)


# ---------------------------------------------------------------------------
# group rings
# ---------------------------------------------------------------------------


class GroupRing:
    """O[G] with O = Z_{p^2}/p^prec."""

    def __init__(self, G: FiniteAbelianGroup, p: int, prec: int):
        self.G, self.p, self.prec = G, p, prec

    def __repr__(self) -> str:
        return f"GroupRing({self.G.invariants}, p={self.p}, prec={self.prec})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupRing) and (self.G, self.p, self.prec) == (other.G, other.p, other.prec)

    def __hash__(self):
        return hash((self.G, self.p, self.prec))

    def scalar(self, x) -> PadicNum:
        if isinstance(x, PadicNum):
            return x.reduce(self.prec)
        return PadicNum(self.p, 2, self.prec, 0) + x

    def element(self, terms: dict | None = None) -> "GRElt":
        return GRElt(self, terms or {})

    def basis(self, g: Sequence[int], c=1) -> "GRElt":
        return GRElt(self, {self.G.reduce(g): self.scalar(c)})

    def zero(self) -> "GRElt":
        return GRElt(self, {})

    def one(self) -> "GRElt":
        return self.basis(self.G.zero())

    def random(self, rng: random.Random, support: int = 4) -> "GRElt":
        mod = self.p**self.prec
        out = {}
        for _ in range(support):
            g = tuple(rng.randrange(d) for d in self.G.invariants)
            out[g] = PadicNum(self.p, 2, self.prec, rng.randrange(mod), rng.randrange(mod))
        return GRElt(self, out)


class GRElt:
    __slots__ = ("R", "terms")

    def __init__(self, R: GroupRing, terms: dict):
        self.R = R
        clean = {}
        for g, c in terms.items():
            g = R.G.reduce(g)
            c = R.scalar(c)
            if g in clean:
                c = clean[g] + c
            clean[g] = c
        self.terms = {g: c for g, c in clean.items() if not c == 0}

    def _check(self, other: "GRElt"):
        if other.R != self.R:
            raise ValueError("elements of different group rings")

    def __add__(self, other: "GRElt") -> "GRElt":
        self._check(other)
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out[g] + c if g in out else c
        return GRElt(self.R, out)

    def __neg__(self) -> "GRElt":
        return GRElt(self.R, {g: -c for g, c in self.terms.items()})

    def __sub__(self, other: "GRElt") -> "GRElt":
        return self + (-other)

    def __mul__(self, other) -> "GRElt":
        if not isinstance(other, GRElt):
            c = self.R.scalar(other)
            return GRElt(self.R, {g: v * c for g, v in self.terms.items()})
        self._check(other)
        G = self.R.G
        out: dict = {}
        for (g, a), (h, b) in itertools.product(self.terms.items(), other.terms.items()):
            k = G.add(g, h)
            out[k] = out[k] + a * b if k in out else a * b
        return GRElt(self.R, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GRElt):
            return NotImplemented
        return self.R == other.R and not (self - other).terms

    __hash__ = None  # type: ignore[assignment]

    def augmentation(self) -> PadicNum:
        total = self.R.scalar(0)
        for c in self.terms.values():
            total = total + c
        return total

    def map_group(self, f: Callable[[Elt], Elt], target: GroupRing) -> "GRElt":
        """Push forward along a group homomorphism."""
        out: dict = {}
        for g, c in self.terms.items():
            h = target.G.reduce(f(g))
            c = target.scalar(c)
            out[h] = out[h] + c if h in out else c
        return GRElt(target, out)

    def __repr__(self) -> str:
        return f"GRElt({self.terms})"


def group_half(G: FiniteAbelianGroup) -> int:
    e = G.exponent()
    if e % 2 == 0:
        raise ValueError("square roots need a group of odd order")
    return pow(2, -1, e) if e > 1 else 0


# ---------------------------------------------------------------------------
# the maps
# ---------------------------------------------------------------------------


def tensor_ring(R: GroupRing) -> GroupRing:
    """O[G x G] = O[G] (x) O[G]; elements of G x G are concatenated tuples."""
    return GroupRing(FiniteAbelianGroup.product(R.G, R.G), R.p, R.prec)


def _split(G: FiniteAbelianGroup, x: Elt) -> tuple[Elt, Elt]:
    r = G.rank
    return tuple(x[:r]), tuple(x[r:])


def sigma_on_pair(G: FiniteAbelianGroup, g: Elt, d: Elt) -> tuple[Elt, Elt]:
    """(g, d) -> (g^{1/2} d^{1/2}, g^{1/2} d^{-1/2})."""
    h = group_half(G)
    s = G.mul(h, G.add(g, d))
    t = G.mul(h, G.sub(g, d))
    return s, t


def sigma_auto(x: GRElt, base: GroupRing) -> GRElt:
    """The ring automorphism [g] (x) [d] -> [g^{1/2} d^{1/2}] (x) [g^{1/2} d^{-1/2}] of O[G x G]."""
    G = base.G
    T = tensor_ring(base)
    if x.R != T:
        raise ValueError("element is not in O[G x G]")

    def f(z):
        a, b = _split(G, z)
        s, t = sigma_on_pair(G, a, b)
        return s + t

    return x.map_group(f, T)


class ConjugationGroup:
    """A finite abelian group with complex conjugation and its anticyclotomic quotient.

    The default model is Gamma_inf at level n: (Z/p^n)^2 in the log coordinates of
    the principal units of Z_{p^2}, conjugation (x, y) -> (x, -y), and Gamma^- = Z/p^n
    read off the second coordinate.
    """

    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        self.G = FiniteAbelianGroup([p**n, p**n]) if n > 0 else FiniteAbelianGroup([])
        self.minus = FiniteAbelianGroup([p**n]) if n > 0 else FiniteAbelianGroup([])

    def conj(self, g: Elt) -> Elt:
        if self.n == 0:
            return ()
        return (g[0] % self.p**self.n, (-g[1]) % self.p**self.n)

    def to_minus(self, g: Elt) -> Elt:
        """Gamma^- coordinate of an element fixed up to sign by conjugation (x = 0)."""
        if self.n == 0:
            return ()
        if g[0] % self.p**self.n:
            raise ValueError("element is not anticyclotomic")
        return (g[1] % self.p**self.n,)

    def tau(self, g: Elt) -> Elt:
        """g^{1/2} (g^c)^{-1/2} as an element of Gamma^-."""
        G = self.G
        h = group_half(G)
        return self.to_minus(G.mul(h, G.sub(g, self.conj(g))))

    def project(self, g: Elt, m: int) -> Elt:
        return tuple(x % self.p**m for x in g)

    def project_minus(self, g: Elt, m: int) -> Elt:
        return tuple(x % self.p**m for x in g)


def tau_project(x: GRElt, model: ConjugationGroup) -> GRElt:
    target = GroupRing(model.minus, x.R.p, x.R.prec)
    return x.map_group(model.tau, target)


def twist_by(alpha: GroupCharacter, x: GRElt) -> dict[Elt, CycPadic]:
    """[g] -> alpha(g) [g]; coefficients become CycPadic when alpha has finite-order part."""
    R = x.R
    return {g: alpha.value(g, R.p, R.prec) * c for g, c in x.terms.items()}


def eval_char(x: GRElt | dict, chi: GroupCharacter, p: int | None = None, prec: int | None = None) -> CycPadic:
    """sum_g c_g chi(g)."""
    if isinstance(x, GRElt):
        p, prec, terms = x.R.p, x.R.prec, x.terms
    else:
        terms = x
        if p is None or prec is None:
            raise ValueError("p and precision are needed for twisted elements")
    total = CycPadic(p, prec, 1, {})
    for g, c in terms.items():
        v = chi.value(g, p, prec)
        total = total + v * c if isinstance(c, PadicNum) else total + v * c
    return total


def anticyc_project(x: GRElt, base: GroupRing, model: ConjugationGroup) -> GRElt:
    """(tau, tau) o sigma : O[G x G] -> O[Gamma^- x Gamma^-]."""
    G = base.G
    y = sigma_auto(x, base)
    target = tensor_ring(GroupRing(model.minus, base.p, base.prec))

    def f(z):
        a, b = _split(G, z)
        return model.tau(a) + model.tau(b)

    return y.map_group(f, target)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def sigma_squared_table(G: FiniteAbelianGroup, pairs: Iterable[tuple[Elt, Elt]]) -> list[tuple[Elt, Elt, Elt, Elt]]:
    """For each pair, (g, d, sigma^2 first, sigma^2 second)."""
    out = []
    for g, d in pairs:
        s, t = sigma_on_pair(G, g, d)
        s2, t2 = sigma_on_pair(G, s, t)
        out.append((g, d, s2, t2))
    return out


def sigma_squared_is_identity(G: FiniteAbelianGroup, pairs: Iterable[tuple[Elt, Elt]]) -> tuple[bool, int]:
    """Literal test of sigma o sigma = id; returns (holds, number of failing pairs)."""
    bad = sum(1 for g, d, s2, t2 in sigma_squared_table(G, pairs) if (s2, t2) != (G.reduce(g), G.reduce(d)))
    return bad == 0, bad


def sigma_squared_is_halving(G: FiniteAbelianGroup, pairs: Iterable[tuple[Elt, Elt]]) -> bool:
    """sigma o sigma sends [g] (x) [d] to [g^{1/2}] (x) [d^{1/2}]."""
    h = group_half(G)
    return all((s2, t2) == (G.mul(h, g), G.mul(h, d)) for g, d, s2, t2 in sigma_squared_table(G, pairs))


def all_pairs(G: FiniteAbelianGroup) -> Iterable[tuple[Elt, Elt]]:
    els = G.elements()
    return itertools.product(els, els)


def is_group_hom_on_generators(f: Callable[[Elt], Elt], src: FiniteAbelianGroup, dst: FiniteAbelianGroup) -> bool:
    """f(x + g) = f(x) + f(g) for every x and every generator g; this makes f a homomorphism."""
    gens = src.gens()
    for x in src.elements():
        fx = f(x)
        for g in gens:
            if dst.reduce(f(src.add(x, g))) != dst.add(fx, f(g)):
                return False
    return dst.reduce(f(src.zero())) == dst.zero()


def sigma_checks_vectorized(p: int, n: int) -> dict[str, int | bool]:
    """Exhaustive sigma checks on Gamma_inf x Gamma_inf at level n, vectorized.

    Returns the number of pairs where sigma^2 differs from the identity, whether
    sigma^2 is the halving map everywhere, and whether sigma is additive against
    every generator.
    """
    import numpy as np

    mod = p**n
    h = pow(2, -1, mod)
    r = np.arange(mod, dtype=np.int64)
    g0, g1, d0, d1 = (a.ravel() for a in np.meshgrid(r, r, r, r, indexing="ij"))
    X = np.stack([g0, g1, d0, d1], axis=1)

    def sig(A):
        g, d = A[:, :2], A[:, 2:]
        return np.concatenate([(h * (g + d)) % mod, (h * (g - d)) % mod], axis=1)

    S = sig(X)
    S2 = sig(S)
    not_id = int(np.any(S2 != X % mod, axis=1).sum())
    halving = bool(np.all(S2 == (h * X) % mod))
    additive = True
    for j in range(4):
        e = np.zeros(4, dtype=np.int64)
        e[j] = 1
        lhs = sig((X + e) % mod)
        rhs = (S + sig(e[None, :])) % mod
        if not np.array_equal(lhs, rhs):
            additive = False
    return {"pairs": int(X.shape[0]), "not_identity": not_id, "halving": halving, "additive": additive}
