"""Algebraic Hecke characters of an imaginary quadratic field.

A character of infinity type (a, b) and modulus f is determined by a character
eps of (O_K/f)^x, with psi((alpha)) = eps(alpha) alpha^{-a} conj(alpha)^{-b}, and
by its values on ideals g_j representing the Smith generators of Cl_K.

Values lie in the ring K (x) Q(zeta) [B_1, ..., B_r] / (B_j^{d_j} - kappa_j beta_j),
where g_j^{d_j} = (beta_j), kappa_j is a root of unity and B_j is a formal root.
A ring built for an inert prime p picks kappa_j so that kappa_j beta_j is a
principal unit at p; then every B_j has a p-adic image in Z_{p^2}. One gets

    psi(g_j) = eta_j * B_j^{b-a} * N(g_j)^{-b},   eta_j^{d_j} = eps(beta_j) kappa_j^{a-b},

and the d_j choices of eta_j give all extensions of eps. Roots of unity are
carried as exact fractions mod 1 until a value is built.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import sympy

from .abgroup import FiniteAbelianGroup
from .classfield import (
    AssumptionError,
    RayClassGroup,
    ResidueUnits,
    RingClassGroup,
    _class_group_generators,
    _InertComponent,
)
from .exactnum import CycInt, PadicNum, log_over_p, root_of_one_unit, teichmuller
from .quadfield import (
    QuadField,
    QuadIdeal,
    class_group,
    ideal_mul,
    kronecker,
    prime_factorization,
    principal_generator,
    splitting,
)

KElt = tuple  # (u, v) meaning u + v*w, entries int or Fraction


def _frac_mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def root_of_unity(f: Fraction) -> CycInt:
    """exp(2 pi i f) as a cyclotomic number."""
    f = _frac_mod1(Fraction(f))
    return CycInt.zeta(f.denominator, f.numerator)


# ---------------------------------------------------------------------------
# value ring
# ---------------------------------------------------------------------------


class ValueRing:
    """K (x) Q(zeta)[B_j] with B_j^{d_j} = kappa_j beta_j for fixed class-group generators."""

    def __init__(self, K: QuadField, p: int | None = None, min_norm: int = 31):
        self.K = K
        self.p = p
        self.D = K.D
        if K.D == 3:
            self.s_cyc: CycInt | None = CycInt(3, [1, 2])
        elif K.D == 4:
            self.s_cyc = CycInt(4, [0, 2])
        else:
            self.s_cyc = None
        gens, orders = _prime_class_generators(K, min_norm)
        self.gens = gens
        self.orders = orders
        self.norms = [g.norm() for g in gens]
        self.betas = [principal_generator(g**d) for g, d in zip(gens, orders)]
        self.rank = len(gens)
        self.kappas = [Fraction(0)] * self.rank
        if p is not None and self.rank:
            if not K.is_inert(p):
                raise AssumptionError("p must be inert in K")
            comp = _InertComponent(K, p, 1)
            order = p * p - 1
            self.kappas = [
                Fraction(-comp._table[comp.to_model(b).residue()], order) % 1 for b in self.betas
            ]

    def __repr__(self) -> str:
        return f"ValueRing({self.K}, p={self.p}, B-orders={self.orders})"

    # constructors
    def zero(self) -> "AlgValue":
        return AlgValue(self, {})

    def one(self) -> "AlgValue":
        return self.from_cyc(CycInt.one())

    def from_cyc(self, c: CycInt, bexp: Sequence[int] | None = None) -> "AlgValue":
        key = (0,) + tuple(bexp or (0,) * self.rank)
        return AlgValue(self, {key: c} if not c.is_zero() else {})

    def from_rational(self, x) -> "AlgValue":
        return self.from_cyc(CycInt.from_int(Fraction(x)))

    def from_K(self, x: KElt, bexp: Sequence[int] | None = None) -> "AlgValue":
        """u + v w = (u + v d/2) + (v/2) s."""
        u, v = Fraction(x[0]), Fraction(x[1])
        re = CycInt.from_int(u + v * self.K.d / 2)
        im = CycInt.from_int(v / 2)
        b = tuple(bexp or (0,) * self.rank)
        if self.s_cyc is not None:
            c = re + im * self.s_cyc
            return AlgValue(self, {(0,) + b: c} if not c.is_zero() else {})
        terms = {}
        if not re.is_zero():
            terms[(0,) + b] = re
        if not im.is_zero():
            terms[(1,) + b] = im
        return AlgValue(self, terms)

    def monomial(self, root: Fraction, kval: KElt, bexp: Sequence[int]) -> "AlgValue":
        """zeta^root * kval * prod B_j^{bexp_j}, with arbitrary integer exponents."""
        K = self.K
        kval = (Fraction(kval[0]), Fraction(kval[1]))
        red = []
        for j, e in enumerate(bexp):
            q, r = divmod(e, self.orders[j])
            if q:
                kval = K.mul(kval, K.power(self.betas[j], q))
                root += q * self.kappas[j]
            red.append(r)
        v = self.from_K(kval, red)
        return v.scale(root_of_unity(root))


class AlgValue:
    """Element of a ValueRing: {(s-exponent, B-exponents): CycInt}."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: ValueRing, terms: dict):
        self.ring = ring
        self.terms = {k: c for k, c in terms.items() if not c.is_zero()}

    def _same(self, other) -> "AlgValue":
        if isinstance(other, AlgValue):
            if other.ring is not self.ring:
                raise ValueError("values from different value rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.from_rational(other)
        if isinstance(other, CycInt):
            return self.ring.from_cyc(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, c in o.terms.items():
            out[k] = out[k] + c if k in out else c
        return AlgValue(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgValue(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "AlgValue":
        if not isinstance(c, CycInt):
            c = CycInt.from_int(Fraction(c))
        return AlgValue(self.ring, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycInt)):
            return self.scale(other)
        o = self._same(other)
        if o is NotImplemented:
            return NotImplemented
        R = self.ring
        out: dict = {}

        def put(key, c):
            if key in out:
                out[key] = out[key] + c
            else:
                out[key] = c

        for k1, c1 in self.terms.items():
            for k2, c2 in o.terms.items():
                es = k1[0] + k2[0]
                c = c1 * c2
                if es == 2:
                    es, c = 0, c * (-R.D)
                bexp = [a + b for a, b in zip(k1[1:], k2[1:])]
                over = [j for j, e in enumerate(bexp) if e >= R.orders[j]]
                if not over:
                    put((es,) + tuple(bexp), c)
                    continue
                for j in over:
                    bexp[j] -= R.orders[j]
                partial = AlgValue(R, {(es,) + tuple(bexp): c})
                for j in over:
                    partial = partial * R.from_K(R.betas[j]).scale(root_of_unity(R.kappas[j]))
                for k, v in partial.terms.items():
                    put(k, v)
        return AlgValue(R, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers of values are not supported")
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.terms

    def to_complex(self, b_roots: Sequence[complex] | None = None) -> complex:
        R = self.ring
        if b_roots is None:
            b_roots = complex_B_roots(R)
        s = 1j * math.sqrt(R.D)
        out = 0j
        for k, c in self.terms.items():
            term = c.to_complex() * (s ** k[0])
            for bj, e in zip(b_roots, k[1:]):
                term *= bj**e
            out += term
        return out

    def rational_value(self) -> Fraction | None:
        """The value as a rational number when it is one."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) != 1:
            return None
        (k, c), = self.terms.items()
        if any(k):
            return None
        cs = c.coeffs()
        if any(cs[1:]):
            return None
        return cs[0]

    def __repr__(self) -> str:
        return f"AlgValue({self.terms})"


def complex_B_roots(R: ValueRing) -> list[complex]:
    """The principal d_j-th roots of beta_j: the fixed complex embedding of the B_j."""
    out = []
    for beta, d, kap in zip(R.betas, R.orders, R.kappas):
        z = R.K.to_complex(beta) * cmath.exp(2j * math.pi * float(kap))
        out.append(cmath.exp(cmath.log(z) / d))
    return out


def _prime_class_generators(K: QuadField, min_norm: int) -> tuple[list[QuadIdeal], list[int]]:
    """Prime ideals of prime norm >= min_norm representing the Smith generators of Cl_K."""
    cg = class_group(K.maximal_order())
    G = cg.group
    targets = {g: i for i, g in enumerate(G.gens())}
    found: dict[int, QuadIdeal] = {}
    q = min_norm - 1
    while len(found) < len(targets):
        q = int(sympy.nextprime(q))
        spl = splitting(K, q)
        if not spl.is_split:
            continue
        for P in spl.primes:
            c = cg.class_of(P)
            if c in targets and targets[c] not in found:
                found[targets[c]] = P
    return [found[i] for i in range(len(targets))], list(G.invariants)


@lru_cache(maxsize=None)
def default_value_ring(K: QuadField, p: int | None = None) -> ValueRing:
    return ValueRing(K, p)


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------


def ideal_lcm(I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
    fi, fj = prime_factorization(I), prime_factorization(J)
    out = I.order.unit_ideal()
    for P in set(fi) | set(fj):
        out = ideal_mul(out, P ** max(fi.get(P, 0), fj.get(P, 0)))
    return out


def unit_root_fraction(K: QuadField, u: KElt) -> Fraction:
    """The unit u as exp(2 pi i f)."""
    w = K.num_units
    ang = cmath.phase(K.to_complex(u)) / (2 * math.pi)
    return _frac_mod1(Fraction(round(ang * w), w))


class HeckeCharacter:
    """Common interface: ``infinity_type``, ``modulus``, ``ring`` and ``__call__`` on ideals."""

    K: QuadField
    infinity_type: tuple[int, int]
    modulus: QuadIdeal
    ring: ValueRing

    def __call__(self, I: QuadIdeal) -> AlgValue:
        return self.evaluate(I)

    def evaluate(self, I: QuadIdeal) -> AlgValue:
        raise NotImplementedError

    def is_coprime(self, I: QuadIdeal) -> bool:
        return not any(P.contains_ideal(I) for P in prime_factorization(self.modulus))

    def value_on_prime(self, P: QuadIdeal) -> AlgValue:
        cache = self.__dict__.setdefault("_prime_cache", {})
        if P not in cache:
            cache[P] = self.evaluate(P)
        return cache[P]

    def evaluate_factored(self, fac: dict) -> AlgValue:
        out = self.ring.one()
        for P, e in fac.items():
            out = out * self.value_on_prime(P) ** e
        return out

    @property
    def weight(self) -> int:
        a, b = self.infinity_type
        if b != 0:
            raise ValueError("weight is defined for infinity type (1 - nu, 0)")
        return 1 - a

    def rational_part_fraction(self, n: int) -> Fraction:
        """f with psi((n)) = exp(2 pi i f) n^{-a-b} for a rational integer n coprime to the modulus."""
        raise NotImplementedError

    def nebentypus(self, n: int) -> CycInt:
        """chi_psi(n) = chi(n) * (d_K | n) where psi((n)) = n^{nu-1} chi(n)."""
        k = int(kronecker(self.K.d, n)) if n > 0 else 0
        if k == 0 or math.gcd(n, self.modulus.norm()) != 1:
            return CycInt.zero()
        return root_of_unity(self.rational_part_fraction(n)) * k

    # algebra
    def __mul__(self, other: "HeckeCharacter") -> "HeckeCharacter":
        return ProductCharacter(self, other)

    def conjugate(self) -> "HeckeCharacter":
        return ConjugateCharacter(self)

    def inverse(self) -> "HeckeCharacter":
        raise NotImplementedError

    def norm_twist(self, t: int) -> "HeckeCharacter":
        return NormTwist(self, t)


class BaseCharacter(HeckeCharacter):
    """A character given by eps on (O/f)^x and root choices on the class-group generators."""

    def __init__(
        self,
        K: QuadField,
        infinity_type: tuple[int, int],
        modulus: QuadIdeal,
        eps: Sequence[int],
        roots: Sequence[int],
        ring: ValueRing | None = None,
        units: ResidueUnits | None = None,
    ):
        self.K = K
        self.infinity_type = tuple(infinity_type)
        self.modulus = modulus
        self.ring = ring or default_value_ring(K)
        self.units = units or ResidueUnits(K, modulus)
        self.eps = tuple(int(k) % m for k, m in zip(eps, self.units.invariants))
        self.roots = tuple(roots)
        for g in self.ring.gens:
            if not self.is_coprime(g):
                raise ValueError("modulus meets the fixed class-group generators of the value ring")
        a, b = self.infinity_type
        self._cl = class_group(K.maximal_order())
        self._int_mod = modulus.a
        self._eta = []
        for beta, d, kap, t in zip(self.ring.betas, self.ring.orders, self.ring.kappas, self.roots):
            self._eta.append(_frac_mod1((self.eps_fraction(beta) + (a - b) * kap + t) / d))
        self._check_units()

    def __repr__(self) -> str:
        return f"HeckeCharacter(D={self.K.D}, type={self.infinity_type}, modulus={self.modulus}, eps={self.eps}, roots={self.roots})"

    def label(self) -> str:
        return f"D{self.K.D}_t{self.infinity_type[0]}_{self.infinity_type[1]}_f{self.modulus.a}-{self.modulus.b}-{self.modulus.c}_e{'.'.join(map(str, self.eps))}_r{'.'.join(map(str, self.roots))}"

    def eps_fraction(self, x: Sequence) -> Fraction:
        """eps(x) = exp(2 pi i f) for x in K coprime to the modulus."""
        u, v = Fraction(x[0]), Fraction(x[1])
        den = math.lcm(u.denominator, v.denominator)
        if self._int_mod == 1:
            return Fraction(0)
        if math.gcd(den, self._int_mod) != 1:
            raise ValueError("denominator not prime to the modulus")
        dl = self.units.dlog((int(u * den), int(v * den)))
        f = sum(Fraction(k * e, m) for k, e, m in zip(self.eps, dl, self.units.invariants))
        if den > 1:
            dl2 = self.units.dlog((den, 0))
            f -= sum(Fraction(k * e, m) for k, e, m in zip(self.eps, dl2, self.units.invariants))
        return _frac_mod1(f)

    def _check_units(self):
        a, b = self.infinity_type
        for u in self.K.units():
            f = self.eps_fraction(u) + (b - a) * unit_root_fraction(self.K, u)
            if _frac_mod1(f) != 0:
                raise ValueError("eps does not satisfy the unit condition")

    def evaluate(self, I: QuadIdeal) -> AlgValue:
        if not self.is_coprime(I):
            raise ValueError("ideal is not coprime to the modulus")
        K, R = self.K, self.ring
        a, b = self.infinity_type
        e = self._cl.class_of(I) if R.rank else ()
        J, M = I, 1
        for g, ej, ng in zip(R.gens, e, R.norms):
            if ej:
                J = ideal_mul(J, g.conj() ** ej)
                M *= ng**ej
        gamma = principal_generator(J)
        alpha = (Fraction(gamma[0], M), Fraction(gamma[1], M))
        root = self.eps_fraction(alpha)
        kval = K.mul(K.power(alpha, -a), K.power(K.conj(alpha), -b))
        bexp = []
        scal = Fraction(1)
        for ej, eta, ng in zip(e, self._eta, R.norms):
            root += ej * eta
            bexp.append(ej * (b - a))
            scal *= Fraction(ng) ** (-b * ej)
        kval = (kval[0] * scal, kval[1] * scal)
        return R.monomial(root, kval, bexp)

    def rational_part_fraction(self, n: int) -> Fraction:
        return self.eps_fraction((n, 0))

    def inverse(self) -> "BaseCharacter":
        a, b = self.infinity_type
        roots = tuple((-t) % d for t, d in zip(self.roots, self.ring.orders))
        # eta^{-1} is the root for eps^{-1} with index -t
        return BaseCharacter(
            self.K, (-a, -b), self.modulus, [-k for k in self.eps], roots, self.ring, self.units
        )

    def is_primitive(self) -> bool:
        return conductor_exponents(self) == prime_factorization(self.modulus)

    def conductor(self) -> QuadIdeal:
        out = self.K.maximal_order().unit_ideal()
        for P, e in conductor_exponents(self).items():
            out = ideal_mul(out, P**e)
        return out


class ProductCharacter(HeckeCharacter):
    def __init__(self, left: HeckeCharacter, right: HeckeCharacter):
        if left.ring is not right.ring:
            raise ValueError("characters use different value rings")
        self.K, self.ring = left.K, left.ring
        self.left, self.right = left, right
        self.infinity_type = (
            left.infinity_type[0] + right.infinity_type[0],
            left.infinity_type[1] + right.infinity_type[1],
        )
        self.modulus = ideal_lcm(left.modulus, right.modulus)

    def evaluate(self, I):
        return self.left.evaluate(I) * self.right.evaluate(I)

    def value_on_prime(self, P):
        return self.left.value_on_prime(P) * self.right.value_on_prime(P)

    def rational_part_fraction(self, n):
        return _frac_mod1(self.left.rational_part_fraction(n) + self.right.rational_part_fraction(n))

    def inverse(self):
        return ProductCharacter(self.left.inverse(), self.right.inverse())


class ConjugateCharacter(HeckeCharacter):
    """psi^c(a) = psi(conj(a)); infinity type (b, a)."""

    def __init__(self, base: HeckeCharacter):
        self.K, self.ring, self.base = base.K, base.ring, base
        self.infinity_type = (base.infinity_type[1], base.infinity_type[0])
        self.modulus = base.modulus.conj()

    def evaluate(self, I):
        return self.base.evaluate(I.conj())

    def value_on_prime(self, P):
        return self.base.value_on_prime(P.conj())

    def rational_part_fraction(self, n):
        return self.base.rational_part_fraction(n)

    def inverse(self):
        return ConjugateCharacter(self.base.inverse())


class NormTwist(HeckeCharacter):
    """psi |.|^t with |a| = N(a)^{-1}; adds (t, t) to the infinity type."""

    def __init__(self, base: HeckeCharacter, t: int):
        self.K, self.ring, self.base, self.t = base.K, base.ring, base, t
        a, b = base.infinity_type
        self.infinity_type = (a + t, b + t)
        self.modulus = base.modulus

    def evaluate(self, I):
        return self.base.evaluate(I) * (Fraction(I.norm()) ** (-self.t))

    def value_on_prime(self, P):
        return self.base.value_on_prime(P) * (Fraction(P.norm()) ** (-self.t))

    def rational_part_fraction(self, n):
        return self.base.rational_part_fraction(n)

    def inverse(self):
        return NormTwist(self.base.inverse(), -self.t)


def trivial_character(K: QuadField, ring: ValueRing | None = None) -> BaseCharacter:
    O = K.maximal_order()
    R = ring or default_value_ring(K)
    return BaseCharacter(K, (0, 0), O.unit_ideal(), [], [0] * R.rank, R)


# ---------------------------------------------------------------------------
# conductors
# ---------------------------------------------------------------------------


def _kernel_residues(units: ResidueUnits, modulus: QuadIdeal, L: QuadIdeal) -> list[tuple[int, int]]:
    """Elements 1 + x, x in L, units mod modulus, modulo the modulus (L contains the modulus)."""
    index = modulus.norm() // L.norm()
    (a1, _), (b1, c1) = L.basis()
    seen = set()
    out = []
    rng = range(index + 1)
    for i in rng:
        for j in rng:
            x = (1 + i * a1 + j * b1, j * c1)
            v = x[1] % modulus.c
            k = x[1] // modulus.c
            key = ((x[0] - k * modulus.b) % modulus.a, v)
            if key in seen or not units.is_unit(key):
                continue
            seen.add(key)
            out.append(key)
            if len(seen) >= index:
                return out
    return out


def conductor_exponents(psi: BaseCharacter) -> dict[QuadIdeal, int]:
    fac = prime_factorization(psi.modulus)
    out = {}
    for P, e in fac.items():
        k = e
        while k > 0:
            smaller = psi.modulus
            # modulus with P-exponent k - 1
            L = psi.K.maximal_order().unit_ideal()
            for Q, f in fac.items():
                L = ideal_mul(L, Q ** (k - 1 if Q == P else f))
            if all(psi.eps_fraction(x) == 0 for x in _kernel_residues(psi.units, smaller, L)):
                k -= 1
            else:
                break
        if k:
            out[P] = k
    return out


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def enumerate_characters(
    K: QuadField,
    infinity_type: tuple[int, int],
    modulus: QuadIdeal | int,
    primitive: bool = False,
    ring: ValueRing | None = None,
) -> list[BaseCharacter]:
    """All characters of the given infinity type defined modulo the modulus.

    Every eps on (O/f)^x satisfying the unit condition is extended over the
    class-group generators in all h_K ways. With ``primitive=True`` only
    characters of conductor exactly f are kept.
    """
    O = K.maximal_order()
    if isinstance(modulus, int):
        modulus = QuadIdeal(O, modulus, 0, modulus)
    R = ring or default_value_ring(K)
    units = ResidueUnits(K, modulus)
    a, b = infinity_type
    inv = units.invariants
    # unit condition: eps(u) = u^{a-b}
    unit_dl = [(units.dlog(u), unit_root_fraction(K, u)) for u in K.units()]
    out = []
    for eps in itertools.product(*[range(m) for m in inv]):
        ok = True
        for dl, f in unit_dl:
            val = sum(Fraction(k * e, m) for k, e, m in zip(eps, dl, inv)) + (b - a) * f
            if _frac_mod1(val) != 0:
                ok = False
                break
        if not ok:
            continue
        for roots in itertools.product(*[range(d) for d in R.orders]):
            psi = BaseCharacter(K, infinity_type, modulus, eps, roots, R, units)
            if primitive and not psi.is_primitive():
                break
            out.append(psi)
    return out


# ---------------------------------------------------------------------------
# p-adic embedding and psi_0
# ---------------------------------------------------------------------------


class PadicEmbedding:
    """iota_p: values -> Z_{p^2} / p^prec for p inert in K.

    zeta_M goes to teich(g)^{(p^2-1)/M} for the fixed generator g of F_{p^2}^x,
    sqrt(-D) goes to u t where -D = r u^2, and B_j goes to a fixed d_j-th root of beta_j.
    """

    def __init__(self, K: QuadField, p: int, prec: int, ring: ValueRing | None = None):
        if not K.is_inert(p):
            raise AssumptionError("p must be inert in K")
        self.K, self.p, self.prec = K, p, prec
        self.ring = ring or default_value_ring(K, p)
        if self.ring.rank and self.ring.p != p:
            raise ValueError("value ring was not built for this prime")
        self.comp = _InertComponent(K, p, prec)
        self.order = p * p - 1
        self.teich_gen = teichmuller(PadicNum(p, 2, prec, *self.comp.gen_residue))
        self.s_image = PadicNum(p, 2, prec, 0, self.comp.u)
        self.b_images = [
            self._root(beta, d, kap) for beta, d, kap in zip(self.ring.betas, self.ring.orders, self.ring.kappas)
        ]

    def element(self, x: KElt) -> PadicNum:
        u, v = Fraction(x[0]), Fraction(x[1])
        den = math.lcm(u.denominator, v.denominator)
        if den % self.p == 0:
            raise ValueError("element not integral at p")
        return self.comp.to_model((int(u * den), int(v * den))) * Fraction(1, den)

    def _root(self, beta: KElt, d: int, kappa: Fraction) -> PadicNum:
        y = self.element(beta) * self.zeta(kappa)
        if y.residue() != (1, 0):
            raise ValueError("kappa beta is not a principal unit at p")
        return root_of_one_unit(y, d)

    def log_teich(self, x: KElt) -> int:
        """k with teich(x) = iota(zeta_{p^2-1})^k."""
        return self.comp._table[self.element(x).residue()]

    def zeta(self, f: Fraction) -> PadicNum:
        f = _frac_mod1(Fraction(f))
        if self.order % f.denominator:
            raise ValueError("root of unity not in the unramified quadratic extension")
        return self.teich_gen ** (f.numerator * (self.order // f.denominator))

    def cyc(self, c: CycInt) -> PadicNum:
        z = self.zeta(Fraction(1, c.m))
        out = PadicNum(self.p, 2, self.prec, 0)
        power = PadicNum(self.p, 2, self.prec, 1)
        for co in c.coeffs():
            if co:
                out = out + power * co
            power = power * z
        return out

    def __call__(self, x: AlgValue) -> PadicNum:
        out = PadicNum(self.p, 2, self.prec, 0)
        for k, c in x.terms.items():
            term = self.cyc(c)
            if k[0]:
                term = term * self.s_image
            for bj, e in zip(self.b_images, k[1:]):
                if e:
                    term = term * bj**e
            out = out + term
        return out


def avatar(psi: HeckeCharacter, I: QuadIdeal, iota: PadicEmbedding) -> PadicNum:
    """The p-adic avatar on an ideal prime to the modulus and to p."""
    return iota(psi(I))


def build_psi0(K: QuadField, p: int, prec: int, ring: ValueRing | None = None) -> tuple[BaseCharacter, PadicEmbedding]:
    """psi_0: conductor (p), infinity type (-1, 0), avatar with values in 1 + pZ_{p^2}.

    eps(alpha) = zeta_{p^2-1}^{-log_g(alpha mod p)}, so iota_p(eps(alpha)) = w(alpha)^{-1}
    and the avatar of (alpha) is <alpha>. On a class-group generator the root is
    chosen so that the avatar is again a 1-unit.
    """
    if not K.is_inert(p):
        raise AssumptionError("p must be inert in K")
    if class_group(K.maximal_order()).group.order() % p == 0:
        raise AssumptionError("p divides h_K")
    if p < 5:
        raise AssumptionError("p must be at least 5")
    R = ring or default_value_ring(K, p)
    O = K.maximal_order()
    modulus = QuadIdeal(O, p, 0, p)
    units = ResidueUnits(K, modulus)
    iota = PadicEmbedding(K, p, prec, R)
    # (O/p)^x is cyclic of order p^2 - 1; teich(g_U) = iota(zeta)^j for its generator g_U
    order = p * p - 1
    if list(units.invariants) != [order]:
        raise AssumptionError("unexpected structure of (O/p)^x")
    j = iota.log_teich(units.generators[0])
    eps = [(-j) % order]
    roots = []
    for j, (beta, d) in enumerate(zip(R.betas, R.orders)):
        found = None
        for t in range(d):
            trial = list(roots) + [t] + [0] * (R.rank - j - 1)
            psi = BaseCharacter(K, (-1, 0), modulus, eps, trial, R, units)
            val = iota(psi(R.gens[j]))
            if val.residue() == (1, 0):
                found = t
                break
        if found is None:
            raise NotImplementedError("no root choice gives a 1-unit avatar")
        roots.append(found)
    psi0 = BaseCharacter(K, (-1, 0), modulus, eps, roots, R, units)
    return psi0, iota


def avatar_in_one_units(psi: HeckeCharacter, iota: PadicEmbedding, ideals: Iterable[QuadIdeal]) -> bool:
    try:
        return all(iota(psi(I)).residue() == (1, 0) for I in ideals)
    except ValueError:
        # a value outside Q_{p^2}
        return False


# ---------------------------------------------------------------------------
# anticyclotomic splitting G = Delta x Gamma_n
# ---------------------------------------------------------------------------


class AnticyclotomicSplitting:
    """A fixed decomposition of a finite abelian group G = Delta x Gamma with Gamma cyclic of p-power order.

    Each Smith factor Z/d is split as Z/p^e x Z/m (d = p^e m); Gamma is the largest
    p-power factor (the last one on ties) and Delta is everything else.
    """

    def __init__(self, G: FiniteAbelianGroup, p: int):
        self.G, self.p = G, p
        parts = []
        for d in G.invariants:
            e = 1
            while d % p == 0:
                d //= p
                e *= p
            parts.append((e, d))
        self.parts = parts
        pidx = [i for i, (e, _) in enumerate(parts) if e > 1]
        if pidx:
            best = max(pidx, key=lambda i: (parts[i][0], i))
            self.gamma_index = best
            self.gamma_order = parts[best][0]
        else:
            self.gamma_index = None
            self.gamma_order = 1
        delta_inv = []
        for i, (e, m) in enumerate(parts):
            if i != self.gamma_index:
                delta_inv.append(e)
            delta_inv.append(m)
        self._delta_raw = delta_inv
        self.delta = FiniteAbelianGroup(delta_inv)
        self.gamma = FiniteAbelianGroup([self.gamma_order])

    def _raw_delta(self, x: Sequence[int]) -> list[int]:
        out = []
        for i, ((e, m), xi) in enumerate(zip(self.parts, x)):
            if i != self.gamma_index:
                out.append(xi % e)
            out.append(xi % m)
        return out

    def split_element(self, x: Sequence[int]) -> tuple[tuple[int, ...], int]:
        raw = self._raw_delta(x)
        delta = tuple(r % d for r, d in zip(raw, self._delta_raw) if d != 1)
        g = x[self.gamma_index] % self.gamma_order if self.gamma_index is not None else 0
        return delta, g

    def combine_element(self, delta: Sequence[int], g: int) -> tuple[int, ...]:
        it = iter(delta)
        raw_full = []
        for d in self._delta_raw:
            raw_full.append(next(it) if d != 1 else 0)
        pos = 0
        out = []
        for i, (e, m) in enumerate(self.parts):
            if i != self.gamma_index:
                pe = raw_full[pos]
                pos += 1
            else:
                pe = g
            pm = raw_full[pos]
            pos += 1
            out.append(_crt(pe, e, pm, m))
        return tuple(out)

    def character_value(self, k: Sequence[int], x: Sequence[int]) -> Fraction:
        return _frac_mod1(sum(Fraction(ki * xi, d) for ki, xi, d in zip(k, x, self.G.invariants)))

    def split_character(self, k: Sequence[int]) -> tuple[tuple[Fraction, ...], Fraction]:
        """(values of chi on the Delta generators, value of chi on the Gamma generator)."""
        dvals = []
        for gen in self.delta.gens():
            dvals.append(self.character_value(k, self.combine_element(gen, 0)))
        gval = self.character_value(k, self.combine_element(self.delta.zero(), 1)) if self.gamma_index is not None else Fraction(0)
        return tuple(dvals), gval

    def recombine_character(self, dvals: Sequence[Fraction], gval: Fraction) -> tuple[int, ...]:
        """Exponent vector of the character with the given values."""
        k = []
        for gen_idx, d in enumerate(self.G.invariants):
            e = [0] * self.G.rank
            e[gen_idx] = 1
            delta, g = self.split_element(e)
            v = gval * g + sum(dv * c for dv, c in zip(dvals, delta))
            v = _frac_mod1(v)
            k.append(int(v * d) % d)
        return tuple(k)


def _crt(a: int, m: int, b: int, n: int) -> int:
    if m == 1:
        return b % n
    if n == 1:
        return a % m
    return int(sympy.ntheory.modular.crt([m, n], [a, b])[0])


def split_anticyclotomic(k: Sequence[int], splitting_data: AnticyclotomicSplitting):
    return splitting_data.split_character(k)


# ---------------------------------------------------------------------------
# Assumption: chi_t = gamma / gamma^c
# ---------------------------------------------------------------------------


@dataclass
class GammaWitness:
    ray_group: RayClassGroup
    exponents: tuple[int, ...] | None

    @property
    def exists(self) -> bool:
        return self.exponents is not None


def find_gamma(K: QuadField, c: int, chi_t: Sequence[int]) -> GammaWitness:
    """Search characters gamma of Cl_{cO_K} with gamma / gamma^c = chi_t on Pic(O_c).

    chi_t is an exponent vector on the Smith form of Pic(O_c). The first witness in
    lexicographic order of exponent vectors is returned.
    """
    O = K.maximal_order()
    H = RayClassGroup(K, QuadIdeal(O, c, 0, c))
    ring = RingClassGroup(K, c)
    to_ring = H.induced(ring)
    conj = H.induced(H, lambda I: I.conj())
    G = H.full
    gens = G.gens()
    targets = []
    for g in gens:
        r = to_ring(g)
        targets.append(_frac_mod1(sum(Fraction(ki * xi, d) for ki, xi, d in zip(chi_t, r, ring.group.invariants))))
    diffs = [G.sub(g, conj(g)) for g in gens]
    for k in itertools.product(*[range(d) for d in G.invariants]):
        ok = True
        for dvec, tgt in zip(diffs, targets):
            v = _frac_mod1(sum(Fraction(ki * xi, d) for ki, xi, d in zip(k, dvec, G.invariants)))
            if v != tgt:
                ok = False
                break
        if ok:
            return GammaWitness(H, tuple(k))
    return GammaWitness(H, None)


# ---------------------------------------------------------------------------
# finite-level anticyclotomic avatars
# ---------------------------------------------------------------------------


def anticyclotomic_avatar(
    psi: HeckeCharacter, iota: PadicEmbedding, c: int, level: int
) -> tuple[RingClassGroup, tuple[int, ...]]:
    """The character a -> avatar(a)/avatar(conj a) of Pic(O_{c p^{level+1}}) reduced to level p^level.

    The avatar quotient is a principal unit x; its exponent is the t-coordinate
    of log(x)/p mod p^level, read against the fixed generator exp(p t) of the
    anticyclotomic 1-units. The result is an exponent vector on the Smith generators,
    with values in (1/p^level) Z / Z. Avatar values of finite prime-to-p order
    contribute nothing.
    """
    p = iota.p
    if iota.prec < level + 2:
        raise ValueError("embedding precision too small for this level")
    G = RingClassGroup(iota.K, c * p ** (level + 1))
    inv = G.group.invariants
    mod = p**level
    k = []
    for gen, d in zip(G.group.gens(), inv):
        I = G.representative(gen)
        x = iota(psi(I)) / iota(psi(I.conj()))
        w = teichmuller(x)
        y = log_over_p(x / w)
        e = Fraction(y.b % mod, mod)
        # exponent vector entry: value exp(2 pi i e) on a generator of order d
        if (e * d).denominator != 1:
            raise ArithmeticError("avatar does not factor through this ring class group")
        k.append(int(e * d) % d)
    return G, tuple(k)


def wild_avatar_units(
    psi: HeckeCharacter, iota: PadicEmbedding, G: RingClassGroup, j: int = 1
) -> list[PadicNum]:
    """Principal-unit part of (avatar(a) / avatar(conj a))^j on the Smith generators of G.

    With psi = psi_0 this is the anticyclotomic character of infinity type (-j, j)
    through Gamma^-, to the precision allowed by the conductor of G.
    """
    out = []
    for gen in G.group.gens():
        I = G.representative(gen)
        x = iota(psi(I)) / iota(psi(I.conj()))
        u = x / teichmuller(x)
        out.append(u**j)
    return out


# ---------------------------------------------------------------------------
# algebra and serialization
# ---------------------------------------------------------------------------


def char_algebra(psi1: HeckeCharacter, psi2: HeckeCharacter, t: int = 0) -> dict[str, HeckeCharacter]:
    return {
        "product": psi1 * psi2,
        "conjugate": psi1.conjugate(),
        "norm_twist": psi1.norm_twist(t),
        "inverse": psi1.inverse(),
    }


FORMAT_VERSION = 1


def dumps_character(psi: BaseCharacter) -> str:
    R = psi.ring
    m = psi.modulus
    lines = [
        f"anticyc-hecke-character {FORMAT_VERSION}",
        f"disc {psi.K.D}",
        f"ring-prime {R.p if R.p is not None else 0}",
        f"infinity-type {psi.infinity_type[0]} {psi.infinity_type[1]}",
        f"modulus {m.a} {m.b} {m.c}",
        "unit-invariants " + " ".join(map(str, psi.units.invariants)),
        "eps " + " ".join(map(str, psi.eps)),
        "class-orders " + " ".join(map(str, R.orders)),
        "roots " + " ".join(map(str, psi.roots)),
    ]
    return "\n".join(lines) + "\n"


def loads_character(text: str) -> BaseCharacter:
    fields: dict[str, list[str]] = {}
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0][0] != "anticyc-hecke-character":
        raise ValueError("not a character file")
    if int(lines[0][1]) != FORMAT_VERSION:
        raise ValueError(f"unsupported character format version {lines[0][1]}")
    for ln in lines[1:]:
        fields[ln[0]] = ln[1:]
    K = QuadField(int(fields["disc"][0]))
    rp = int(fields["ring-prime"][0])
    R = default_value_ring(K, rp or None)
    a, b, c = map(int, fields["modulus"])
    modulus = QuadIdeal(K.maximal_order(), a, b, c)
    units = ResidueUnits(K, modulus)
    if list(units.invariants) != [int(x) for x in fields.get("unit-invariants", [])]:
        raise ValueError("unit group structure does not match the file")
    if list(R.orders) != [int(x) for x in fields.get("class-orders", [])]:
        raise ValueError("class group structure does not match the file")
    return BaseCharacter(
        K,
        tuple(map(int, fields["infinity-type"])),
        modulus,
        [int(x) for x in fields.get("eps", [])],
        [int(x) for x in fields.get("roots", [])],
        R,
        units,
    )
