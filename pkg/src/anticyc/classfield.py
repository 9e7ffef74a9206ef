"""Ray class groups, ring class groups and the maps between them.

A ray class group mod n is presented on two kinds of generators: ideals
representing the Smith generators of Cl_K, and elements of O_K representing
generators of (O_K/n)^x. Relations come from the residue group structure, the
global units and the powers g_j^{d_j} = (beta_j). Every homomorphism induced by
a map on ideals (conjugation, change of modulus, passage to ring classes) is
evaluated on these generator ideals and extended linearly.

Frobenius elements are normalised geometrically: the class of a prime ideal q
corresponds to Frob_q^{-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import sympy

from .abgroup import BlackBoxGroup, FiniteAbelianGroup, Presentation, hom_matrix_is_iso, smith_normal_form
from .exactnum import PadicNum, log_over_p, quadratic_nonresidue, teichmuller
from .quadfield import (
    QuadField,
    QuadIdeal,
    QuadOrder,
    class_group,
    ideal_mul,
    ideals_of_norm,
    kronecker,
    prime_factorization,
    principal_generator,
    splitting,
)

ENUMERATION_LIMIT = 5000


class AssumptionError(ValueError):
    """A standing hypothesis (p prime to h_K, p >= 5, splitting type) fails."""


Elt = tuple[int, int]


def _reduce_mod(x: Sequence[int], L: QuadIdeal) -> Elt:
    """Canonical residue of an integral element modulo the lattice L."""
    u, v = int(x[0]), int(x[1])
    k = v // L.c
    return ((u - k * L.b) % L.a, v - k * L.c)


def _one_combination(A: QuadIdeal, B: QuadIdeal) -> Elt:
    """b in B with 1 - b in A, for coprime ideals A, B."""
    rows = [list(v) for v in A.basis()] + [list(v) for v in B.basis()]
    D, U, V = smith_normal_form(rows)
    if abs(D[0][0]) != 1 or abs(D[1][1]) != 1:
        raise ValueError("ideals are not coprime")
    # x*rows = (1, 0): with y = x U^{-1}, y D = e1 V
    target = [V[0][0], V[0][1]]
    y = [target[0] * D[0][0], target[1] * D[1][1], 0, 0]
    x = [sum(y[i] * U[i][j] for i in range(4)) for j in range(4)]
    b = (x[2] * rows[2][0] + x[3] * rows[3][0], x[2] * rows[2][1] + x[3] * rows[3][1])
    return b


# ---------------------------------------------------------------------------
# (O_K / P^e)^x components
# ---------------------------------------------------------------------------


class _Component:
    ideal: QuadIdeal
    invariants: list[int]
    generators: list[Elt]

    def dlog(self, x: Sequence[int]) -> list[int]:
        raise NotImplementedError


class _EnumeratedComponent(_Component):
    def __init__(self, K: QuadField, prime: QuadIdeal, power: QuadIdeal):
        self.ideal = power
        self.K = K
        units = []
        for v in range(power.c):
            for u in range(power.a):
                x = _reduce_mod((u, v), power)
                if not prime.contains(x):
                    units.append(x)
        one = _reduce_mod((1, 0), power)

        def op(x, y):
            return _reduce_mod(K.mul(x, y), power)

        self._bb = BlackBoxGroup(units, op, one)
        self.invariants = list(self._bb.group.invariants)
        self.generators = [self._bb.element_of(g) for g in self._bb.group.gens()]

    def dlog(self, x):
        return list(self._bb.dlog(_reduce_mod(x, self.ideal)))


class _InertComponent(_Component):
    """(O_K/q^e)^x = F_{q^2}^x x (1 + qO)/(1 + q^e O) through the model Z_q[t]/(t^2 - r)."""

    def __init__(self, K: QuadField, q: int, e: int):
        self.K, self.q, self.e = K, q, e
        self.ideal = QuadIdeal(K.maximal_order(), q**e, 0, q**e)
        mod = q**e
        r = quadratic_nonresidue(q)
        # sqrt(d) = u t with u^2 = d / r
        u = _sqrt_mod_prime_power(K.d * pow(r, -1, mod) % mod, q, e)
        self.u = u
        self.inv2 = pow(2, -1, mod)
        self.model_w = ((K.d * self.inv2) % mod, (u * self.inv2) % mod)
        # generator of F_{q^2}^x and its log table
        self.gen_residue = _f_q2_generator(q, r)
        self._table = {}
        x = (1, 0)
        for k in range(q * q - 1):
            self._table[x] = k
            x = _f_q2_mul(x, self.gen_residue, q, r)
        self.invariants = [q * q - 1] + ([q ** (e - 1)] * 2 if e > 1 else [])
        g = teichmuller(PadicNum(q, 2, e, *self.gen_residue))
        gens = [self.from_model(g)]
        if e > 1:
            from .exactnum import exp_of_p

            gens.append(self.from_model(exp_of_p(PadicNum(q, 2, e, 1, 0), e)))
            gens.append(self.from_model(exp_of_p(PadicNum(q, 2, e, 0, 1), e)))
        self.generators = gens

    def to_model(self, x: Sequence[int]) -> PadicNum:
        a, b = self.model_w
        return PadicNum(self.q, 2, self.e, int(x[0]) + int(x[1]) * a, int(x[1]) * b)

    def from_model(self, y: PadicNum) -> Elt:
        # y = A + B t, t = (2w - d)/u
        mod = self.q**self.e
        uinv = pow(self.u, -1, mod)
        v = (2 * y.b * uinv) % mod
        a = (y.a - y.b * uinv * self.K.d) % mod
        return _reduce_mod((a, v), self.ideal)

    def dlog(self, x):
        y = self.to_model(x)
        if not y.is_unit():
            raise ValueError("element is not a unit modulo the component")
        out = [self._table[y.residue()]]
        if self.e > 1:
            one = y / teichmuller(y)
            lg = log_over_p(one)
            m = self.q ** (self.e - 1)
            out += [lg.a % m, lg.b % m]
        return out


class _SplitComponent(_Component):
    """(O_K/P^e)^x = (Z/q^e)^x for P of degree one above an odd prime q."""

    def __init__(self, K: QuadField, prime: QuadIdeal, e: int):
        q = prime.a
        self.K, self.q, self.e = K, q, e
        mod = q**e
        self.mod = mod
        self.ideal = prime**e
        # w = root of x^2 - d x + n_w lifted mod q^e, congruent to w mod P
        root0 = (-prime.b) % q
        r = root0
        for _ in range(e + 1):
            f = r * r - K.d * r + K.n_w
            df = 2 * r - K.d
            r = (r - f * pow(df, -1, mod)) % mod
        self.root = r
        self.g = int(sympy.primitive_root(mod))
        self.invariants = [(q - 1) * q ** (e - 1)]
        self.generators = [_reduce_mod((self.g, 0), self.ideal)]

    def dlog(self, x):
        val = (int(x[0]) + int(x[1]) * self.root) % self.mod
        if val % self.q == 0:
            raise ValueError("element is not a unit modulo the component")
        return [int(sympy.discrete_log(self.mod, val, self.g))]


def _sqrt_mod_prime_power(a: int, q: int, e: int) -> int:
    # the root whose residue mod q is smallest, so models agree across precisions
    roots = sympy.sqrt_mod(a, q**e, all_roots=True)
    if not roots:
        raise ArithmeticError("no square root")
    return min(roots, key=lambda x: (x % q, x))


def _f_q2_mul(x, y, q, r):
    return ((x[0] * y[0] + r * x[1] * y[1]) % q, (x[0] * y[1] + x[1] * y[0]) % q)


def _f_q2_generator(q: int, r: int) -> Elt:
    """Smallest primitive element of F_q[t]/(t^2 - r) in (b, a) lexicographic order."""
    n = q * q - 1
    primes = sympy.primefactors(n)
    for b in range(q):
        for a in range(q):
            if (a, b) == (0, 0):
                continue
            x = (a, b)
            ok = True
            for ell in primes:
                y, e, base = (1, 0), n // ell, x
                while e:
                    if e & 1:
                        y = _f_q2_mul(y, base, q, r)
                    base = _f_q2_mul(base, base, q, r)
                    e >>= 1
                if y == (1, 0):
                    ok = False
                    break
            if ok:
                return x
    raise ArithmeticError("no primitive element")


class ResidueUnits:
    """(O_K / n)^x as a product over the prime-power factors of n."""

    def __init__(self, K: QuadField, modulus: QuadIdeal, method: str = "auto"):
        if modulus.order.conductor != 1:
            raise ValueError("modulus must be an ideal of O_K")
        self.K = K
        self.modulus = modulus
        self.primes = sorted(prime_factorization(modulus).items(), key=lambda t: t[0].key)
        comps: list[_Component] = []
        for P, e in self.primes:
            power = P**e
            q = sympy.factorint(P.norm())
            qq = next(iter(q))
            structured = method == "structured" or (method == "auto" and power.norm() > ENUMERATION_LIMIT)
            if structured and qq != 2:
                if splitting(K, qq).is_inert:
                    comps.append(_InertComponent(K, qq, e))
                    continue
                if splitting(K, qq).is_split:
                    comps.append(_SplitComponent(K, P, e))
                    continue
            if power.norm() > 50 * ENUMERATION_LIMIT:
                raise NotImplementedError("residue group too large for enumeration")
            comps.append(_EnumeratedComponent(K, P, power))
        self.components = comps
        self.invariants: list[int] = [d for c in comps for d in c.invariants]
        # CRT lifts of component generators
        O = K.maximal_order()
        gens: list[Elt] = []
        for i, comp in enumerate(comps):
            others = O.unit_ideal()
            for j, c2 in enumerate(comps):
                if j != i:
                    others = ideal_mul(others, c2.ideal)
            if len(comps) > 1:
                b = _one_combination(comp.ideal, others)  # b = 1 mod comp, 0 mod others
                e_i = b
            else:
                e_i = (1, 0)
            one_minus = (1 - e_i[0], -e_i[1])
            for g in comp.generators:
                x = K.mul(g, e_i)
                gens.append((x[0] + one_minus[0], x[1] + one_minus[1]))
        self.generators = gens

    def order(self) -> int:
        out = 1
        for P, e in self.primes:
            n = P.norm()
            out *= n ** (e - 1) * (n - 1)
        return out

    def is_unit(self, x: Sequence[int]) -> bool:
        return not any(P.contains(x) for P, _ in self.primes)

    def dlog(self, x: Sequence[int]) -> list[int]:
        out: list[int] = []
        for c in self.components:
            out.extend(c.dlog(x))
        return out


# ---------------------------------------------------------------------------
# class groups
# ---------------------------------------------------------------------------


class _GroupWithClassMap:
    """Common interface: ``group`` and ``class_of(ideal)``."""

    group: FiniteAbelianGroup

    def class_of(self, I: QuadIdeal) -> tuple[int, ...]:
        raise NotImplementedError


def _class_group_generators(K: QuadField, avoid: int) -> tuple[list[QuadIdeal], list[int]]:
    """Ideals of O_K with norm prime to ``avoid`` representing the Smith generators of Cl_K."""
    cg = class_group(K.maximal_order())
    G = cg.group
    targets = {g: i for i, g in enumerate(G.gens())}
    found: dict[int, QuadIdeal] = {}
    n = 1
    while len(found) < len(targets):
        n += 1
        if math.gcd(n, avoid) != 1:
            continue
        for I in ideals_of_norm(K.maximal_order(), n):
            c = cg.class_of(I)
            if c in targets and targets[c] not in found:
                found[targets[c]] = I
    return [found[i] for i in range(len(targets))], list(G.invariants)


class RayClassGroup(_GroupWithClassMap):
    """Cl_n(K), or its maximal p-quotient when p is given."""

    def __init__(self, K: QuadField, modulus: QuadIdeal, p: int | None = None, method: str = "auto"):
        O = K.maximal_order()
        self.K, self.modulus, self.p = K, modulus, p
        self.units = ResidueUnits(K, modulus, method)
        self._avoid = modulus.norm()
        self._cl = class_group(O)
        gj, dj = _class_group_generators(K, self._avoid)
        self.class_gens, self.class_orders = gj, dj
        self.class_gen_norms = [g.norm() for g in gj]
        self.betas = [principal_generator(g**d) for g, d in zip(gj, dj)]
        r = len(gj)
        k = len(self.units.invariants)
        rels: list[list[int]] = []
        for i, m in enumerate(self.units.invariants):
            row = [0] * (r + k)
            row[r + i] = m
            rels.append(row)
        for u in K.units():
            rels.append([0] * r + self.units.dlog(u))
        for j, (d, beta) in enumerate(zip(dj, self.betas)):
            row = [0] * r + [-x for x in self.units.dlog(beta)]
            row[j] = d
            rels.append(row)
        self.ngens = r + k
        if self.ngens == 0:
            self.presentation = None
            self.full = FiniteAbelianGroup([])
        else:
            self.presentation = Presentation(r + k, rels)
            self.full = self.presentation.group
        self.gen_ideals: list[QuadIdeal] = list(gj) + [
            QuadIdeal.from_generators(O, [x]) for x in self.units.generators
        ]
        if p is None:
            self.group = self.full
            self._proj = lambda x: tuple(x)
            self._section = lambda x: tuple(x)
        else:
            self.group, self._proj, self._section = self.full.p_part_section(p)
        self._modulus_primes = [P for P, _ in self.units.primes]
        self._int_mod = modulus.a

    def __repr__(self) -> str:
        tag = f", p={self.p}" if self.p else ""
        return f"RayClassGroup(D={self.K.D}, modulus={self.modulus}{tag}: {self.group.invariants})"

    def order_formula(self) -> int:
        """h_K phi(n) / [O^x : O^x_{n,1}] for the full group."""
        hK = self._cl.group.order()
        ones = sum(1 for u in self.K.units() if self.modulus.contains((u[0] - 1, u[1])))
        return hK * self.units.order() * ones // self.K.num_units

    def is_coprime(self, I: QuadIdeal) -> bool:
        return not any(P.contains_ideal(I) for P in self._modulus_primes)

    def presentation_vector(self, I: QuadIdeal) -> list[int]:
        """A vector over the presentation generators representing the class of I."""
        if not self.is_coprime(I):
            raise ValueError("ideal is not coprime to the modulus")
        K = self.K
        e = self._cl.class_of(I) if self.class_gens else ()
        J, M = I, 1
        for g, ej, ng in zip(self.class_gens, e, self.class_gen_norms):
            if ej:
                J = ideal_mul(J, g.conj() ** ej)
                M *= ng**ej
        gamma = principal_generator(J)
        if gamma is None:
            raise ArithmeticError("class decomposition failed")
        minv = pow(M, -1, self._int_mod) if self._int_mod > 1 else 0
        alpha = (gamma[0] * minv, gamma[1] * minv)
        return list(e) + self.units.dlog(alpha)

    def full_class_of(self, I: QuadIdeal) -> tuple[int, ...]:
        if self.presentation is None:
            return ()
        return self.presentation.to_group(self.presentation_vector(I))

    def class_of(self, I: QuadIdeal) -> tuple[int, ...]:
        return self._proj(self.full_class_of(I))

    def element_class_of(self, alpha: Sequence[int]) -> tuple[int, ...]:
        """Class of the principal ideal (alpha) for an integral alpha."""
        return self.class_of(QuadIdeal.from_generators(self.K.maximal_order(), [alpha]))

    def lift_vector(self, x: Sequence[int]) -> list[int]:
        if self.presentation is None:
            return []
        return self.presentation.lift(self._section(x))

    def induced(self, dst: _GroupWithClassMap, ideal_map: Callable[[QuadIdeal], QuadIdeal] | None = None) -> "GroupHom":
        """The homomorphism self.group -> dst.group induced by a map on ideals."""
        f = ideal_map or (lambda I: I)
        images = [dst.class_of(f(I)) for I in self.gen_ideals]
        return GroupHom(self, dst, images)


class GroupHom:
    """Homomorphism out of a ray class group given by images of presentation generators."""

    def __init__(self, src: RayClassGroup, dst: _GroupWithClassMap, images: list[tuple[int, ...]]):
        self.src, self.dst, self.images = src, dst, images

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        G = self.dst.group
        out = G.zero()
        for c, img in zip(self.src.lift_vector(x), self.images):
            if c:
                out = G.add(out, G.mul(c, img))
        return out

    def matrix(self) -> list[tuple[int, ...]]:
        """Images of the Smith generators of the source group."""
        return [self(g) for g in self.src.group.gens()]


class RingClassGroup(_GroupWithClassMap):
    """Pic(O_n), or its maximal p-quotient, with O_K-ideals coprime to n as input."""

    def __init__(self, K: QuadField, n: int, p: int | None = None):
        self.K, self.n, self.p = K, n, p
        self.order_ = QuadOrder(K, n)
        self._cg = class_group(self.order_)
        self.full = self._cg.group
        if p is None:
            self.group = self.full
            self._proj = lambda x: tuple(x)
            self._section = lambda x: tuple(x)
        else:
            self.group, self._proj, self._section = self.full.p_part_section(p)

    def __repr__(self) -> str:
        tag = f", p={self.p}" if self.p else ""
        return f"RingClassGroup(D={self.K.D}, n={self.n}{tag}: {self.group.invariants})"

    def full_class_of(self, I: QuadIdeal) -> tuple[int, ...]:
        if I.order.conductor == 1:
            if math.gcd(I.norm(), self.n) != 1:
                raise ValueError("ideal is not coprime to the conductor")
            if self.n > 1:
                I = I.intersect_order(self.n)
        return self._cg.class_of(I)

    def class_of(self, I: QuadIdeal) -> tuple[int, ...]:
        return self._proj(self.full_class_of(I))

    def order_formula(self) -> int:
        return self.order_.class_number_formula()

    @cached_property
    def representatives(self) -> dict[tuple[int, ...], QuadIdeal]:
        """For each class of the full group, the O_K-ideal coprime to n of least norm (then HNF)."""
        want = self.full.order()
        out: dict[tuple[int, ...], QuadIdeal] = {}
        m = 0
        while len(out) < want:
            m += 1
            if math.gcd(m, self.n) != 1:
                continue
            for I in ideals_of_norm(self.K.maximal_order(), m):
                c = self.full_class_of(I)
                if c not in out:
                    out[c] = I
        return out

    def representative(self, g: Sequence[int]) -> QuadIdeal:
        return self.representatives[tuple(g)]


def ray_class_group(K: QuadField, modulus: QuadIdeal | int, p: int | None = None) -> RayClassGroup:
    if isinstance(modulus, int):
        modulus = QuadIdeal(K.maximal_order(), modulus, 0, modulus)
    return RayClassGroup(K, modulus, p)


def ring_class_group(K: QuadField, n: int, p: int | None = None) -> RingClassGroup:
    return RingClassGroup(K, n, p)


def ring_class_group_via_ray(K: QuadField, n: int) -> int:
    """|Pic(O_n)| as |Cl_{nO_K}| / |image of (Z/n)^x|, an independent route."""
    O = K.maximal_order()
    H = RayClassGroup(K, QuadIdeal(O, n, 0, n))
    image = set()
    for a in range(1, max(n, 2)):
        if math.gcd(a, n) == 1:
            image.add(H.full_class_of(QuadIdeal(O, a, 0, a)))
    # the image is a subgroup; close it under addition
    G = H.full
    closure = {G.zero()}
    frontier = list(image)
    while frontier:
        x = frontier.pop()
        for y in list(closure):
            z = G.add(x, y)
            if z not in closure:
                closure.add(z)
                frontier.append(z)
    return G.order() // len(closure)


# ---------------------------------------------------------------------------
# Artin symbols
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArtinSymbol:
    group: FiniteAbelianGroup
    element: tuple[int, ...]

    def __mul__(self, other: "ArtinSymbol") -> "ArtinSymbol":
        return ArtinSymbol(self.group, self.group.add(self.element, other.element))

    def inverse(self) -> "ArtinSymbol":
        return ArtinSymbol(self.group, self.group.neg(self.element))

    def is_identity(self) -> bool:
        return self.element == self.group.zero()


def frobenius(q_ideal: QuadIdeal, target: _GroupWithClassMap) -> ArtinSymbol:
    """Frob_q in the target group; the class of q itself is Frob_q^{-1}."""
    cls = target.class_of(q_ideal)
    return ArtinSymbol(target.group, target.group.neg(cls))


def class_symbol(I: QuadIdeal, target: _GroupWithClassMap) -> ArtinSymbol:
    return ArtinSymbol(target.group, target.class_of(I))


# ---------------------------------------------------------------------------
# decompositions c O_K = cc', n O_K = n+ n+' (n-)
# ---------------------------------------------------------------------------


def chosen_prime(K: QuadField, q: int) -> QuadIdeal:
    """The fixed prime above a split q: the one with the smaller Hermite basis."""
    spl = splitting(K, q)
    if not spl.is_split:
        raise AssumptionError(f"{q} is not split in {K}")
    return spl.primes[0]


def split_part_ideal(K: QuadField, m: int) -> QuadIdeal:
    """The ideal prod chosen_prime(q)^e over q^e || m; all q must split."""
    out = K.maximal_order().unit_ideal()
    for q, e in sorted(sympy.factorint(m).items()):
        out = ideal_mul(out, chosen_prime(K, q) ** e)
    return out


@dataclass(frozen=True)
class Decomposition:
    c: int
    n_plus: int
    n_minus: int


def decompose(K: QuadField, c: int, n: int, p: int) -> Decomposition:
    if math.gcd(c * n, p) != 1:
        raise AssumptionError("c and n must be prime to p")
    for q in sympy.primefactors(c):
        if not K.is_split(q):
            raise AssumptionError(f"c must be divisible only by split primes ({q})")
    n_plus, n_minus = 1, 1
    for q, e in sympy.factorint(n).items():
        if K.is_split(q):
            n_plus *= q**e
        elif K.is_inert(q):
            if e > 1:
                raise AssumptionError("n- must be squarefree")
            n_minus *= q
        else:
            raise AssumptionError(f"{q} ramifies in K")
    return Decomposition(c, n_plus, n_minus)


def _check_p(K: QuadField, p: int):
    if p < 5:
        raise AssumptionError("p must be at least 5")
    if class_group(K.maximal_order()).group.order() % p == 0:
        raise AssumptionError("p divides the class number of K")


def _int_ideal(K: QuadField, m: int) -> QuadIdeal:
    return QuadIdeal(K.maximal_order(), m, 0, m)


class TauIso:
    """tau_{cn}: H(c n+) x H(c' n+') x H(n-) -> H(cn), the inverse of the three projections."""

    def __init__(self, K: QuadField, c: int, n: int, p: int):
        _check_p(K, p)
        self.K, self.p = K, p
        self.dec = decompose(K, c, n, p)
        cc = split_part_ideal(K, c * self.dec.n_plus)
        self.H1 = RayClassGroup(K, cc, p)
        self.H2 = RayClassGroup(K, cc.conj(), p)
        self.H3 = RayClassGroup(K, _int_ideal(K, self.dec.n_minus), p)
        self.H = RayClassGroup(K, _int_ideal(K, c * n), p)
        self.pi = [self.H.induced(G) for G in (self.H1, self.H2, self.H3)]
        self.product = FiniteAbelianGroup.product(self.H1.group, self.H2.group, self.H3.group)
        images = [self._pi_all(g) for g in self.H.group.gens()]
        self.is_isomorphism = hom_matrix_is_iso(self.H.group, self.product, images)
        if not self.is_isomorphism:
            raise ArithmeticError("projections do not give an isomorphism")
        if self.H.group.order() > 10**6:
            raise NotImplementedError("group too large for the inverse table")
        self._inverse = {self._pi_all(w): w for w in self.H.group.elements()}

    def _pi_all(self, w) -> tuple[int, ...]:
        return tuple(self.pi[0](w)) + tuple(self.pi[1](w)) + tuple(self.pi[2](w))

    def __call__(self, x, y, z) -> tuple[int, ...]:
        return self._inverse[tuple(x) + tuple(y) + tuple(z)]


class SigmaMap:
    """sigma_{cn}: H(m) x H(m') -> H[cn], with m = c n+ (n-) and m' its conjugate.

    In conjugated mode the second argument also lies in H(m) and is first moved to
    H(m') by complex conjugation.
    """

    def __init__(self, K: QuadField, c: int, n: int, p: int, conjugated: bool = False):
        if p in (2, 3):
            raise AssumptionError("square roots need p >= 5")
        self.tau = TauIso(K, c, n, p)
        self.K, self.p, self.conjugated = K, p, conjugated
        dec = self.tau.dec
        m = ideal_mul(split_part_ideal(K, c * dec.n_plus), _int_ideal(K, dec.n_minus))
        self.Hm = RayClassGroup(K, m, p)
        self.Hmbar = RayClassGroup(K, m.conj(), p)
        t = self.tau
        self.x_of = self.Hm.induced(t.H1)
        self.a_of = self.Hm.induced(t.H3)
        self.y_of = self.Hmbar.induced(t.H2)
        self.b_of = self.Hmbar.induced(t.H3)
        self.conj = self.Hm.induced(self.Hmbar, lambda I: I.conj())
        self.ring = RingClassGroup(K, c * n, p)
        self.to_ring = t.H.induced(self.ring)

    @property
    def domain(self) -> tuple[RayClassGroup, RayClassGroup]:
        return (self.Hm, self.Hm if self.conjugated else self.Hmbar)

    def __call__(self, A: Sequence[int], B: Sequence[int]) -> tuple[int, ...]:
        if self.conjugated:
            B = self.conj(B)
        x, a = self.x_of(A), self.a_of(A)
        y, b = self.y_of(B), self.b_of(B)
        H3 = self.tau.H3.group
        s = H3.sqrt(H3.add(a, b))
        return self.to_ring(self.tau(x, y, s))

    def on_ideals(self, I: QuadIdeal, J: QuadIdeal) -> tuple[int, ...]:
        first, second = self.domain
        return self(first.class_of(I), second.class_of(J))


@dataclass(frozen=True)
class FrobRow:
    map_name: str
    inputs: str
    expected: tuple[int, ...]
    actual: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


def frobenius_table(sigma: SigmaMap, sigma_c: SigmaMap, q: int) -> list[FrobRow]:
    """Images of the ideal-class pairs built from q under sigma_{cn} and its conjugated variant.

    Expected values: for split q = Q Qbar, sigma sends ((q),(q)) -> 1, (Q,Q) -> Frob_Q^{-1},
    (Qbar,Qbar) -> Frob_Q, (Q,Qbar) -> 1, and sigma^c sends ((q),(q)) -> 1, (Q,Qbar) -> Frob_Q^{-1},
    (Qbar,Q) -> Frob_Q, (Q,Q) -> 1. For inert q both maps send ((q),(q)) -> 1.
    """
    K = sigma.K
    ring = sigma.ring
    one = ring.group.zero()
    qq = _int_ideal(K, q)
    rows = []
    spl = splitting(K, q)
    if spl.is_ramified:
        raise AssumptionError(f"{q} ramifies in K")
    if not spl.is_split:
        for name, s in (("sigma", sigma), ("sigma^c", sigma_c)):
            rows.append(FrobRow(name, "((q),(q))", one, s.on_ideals(qq, qq)))
        return rows
    Q = chosen_prime(K, q)
    Qb = Q.conj()
    frob_inv = frobenius(Q, ring).inverse().element
    frob = frobenius(Q, ring).element
    cases = {
        "sigma": [("((q),(q))", qq, qq, one), ("(Q,Q)", Q, Q, frob_inv), ("(Qbar,Qbar)", Qb, Qb, frob), ("(Q,Qbar)", Q, Qb, one)],
        "sigma^c": [("((q),(q))", qq, qq, one), ("(Q,Qbar)", Q, Qb, frob_inv), ("(Qbar,Q)", Qb, Q, frob), ("(Q,Q)", Q, Q, one)],
    }
    for name, s in (("sigma", sigma), ("sigma^c", sigma_c)):
        for label, I, J, exp in cases[name]:
            rows.append(FrobRow(name, label, tuple(exp), tuple(s.on_ideals(I, J))))
    return rows


def tau_iso(K: QuadField, c: int, n: int, p: int) -> TauIso:
    return TauIso(K, c, n, p)


def sigma_map(K: QuadField, c: int, n: int, p: int, conjugated: bool = False) -> SigmaMap:
    return SigmaMap(K, c, n, p, conjugated)


# ---------------------------------------------------------------------------
# Gamma_infinity at finite level
# ---------------------------------------------------------------------------


class GammaLevel:
    """The p-part of H(p^{n+1}) for p inert, in explicit coordinates (Z/p^n)^2.

    An ideal a = (alpha) prod g_j^{e_j} goes to log<alpha>/p + sum e_j log<beta_j>/(p d_j),
    written in the basis (1, t) of Z_{p^2} = Z_p[t]/(t^2 - r). Complex conjugation
    acts by (x, y) -> (x, -y).
    """

    def __init__(self, K: QuadField, p: int, n: int):
        if not K.is_inert(p):
            raise AssumptionError("p must be inert in K")
        _check_p(K, p)
        self.K, self.p, self.n = K, p, n
        self.mod = p**n
        self.group = FiniteAbelianGroup([self.mod, self.mod])
        self._comp = _InertComponent(K, p, n + 1)
        O = K.maximal_order()
        self._cl = class_group(O)
        gj, dj = _class_group_generators(K, p)
        self.class_gens, self.class_orders = gj, dj
        self._gen_coords = []
        for g, d in zip(gj, dj):
            beta = principal_generator(g**d)
            x, y = self.element_coords(beta)
            dinv = pow(d, -1, self.mod)
            self._gen_coords.append(((x * dinv) % self.mod, (y * dinv) % self.mod))

    def to_padic(self, alpha: Sequence) -> PadicNum:
        """Image of an element of K, integral at p, in Z_{p^2} mod p^{n+1}."""
        from fractions import Fraction

        u, v = Fraction(alpha[0]), Fraction(alpha[1])
        den = math.lcm(u.denominator, v.denominator)
        if den % self.p == 0:
            raise ValueError("element is not integral at p")
        num = self._comp.to_model((int(u * den), int(v * den)))
        return num * Fraction(1, den)

    def element_coords(self, alpha: Sequence) -> tuple[int, int]:
        y = self.to_padic(alpha)
        if not y.is_unit():
            raise ValueError("element is not a unit at p")
        lg = log_over_p(y / teichmuller(y))
        return (lg.a % self.mod, lg.b % self.mod)

    def class_of(self, I: QuadIdeal) -> tuple[int, int]:
        if I.norm() % self.p == 0:
            raise ValueError("ideal is not prime to p")
        K = self.K
        e = self._cl.class_of(I) if self.class_gens else ()
        J, M = I, 1
        for g, ej in zip(self.class_gens, e):
            if ej:
                J = ideal_mul(J, g.conj() ** ej)
                M *= g.norm() ** ej
        gamma = principal_generator(J)
        x, y = self.element_coords(gamma)
        # (gamma) / M = a * prod g_j^{-e_j}
        mx, my = self.element_coords((M, 0))
        x, y = x - mx, y - my
        for (cx, cy), ej in zip(self._gen_coords, e):
            x += ej * cx
            y += ej * cy
        return (x % self.mod, y % self.mod)

    def conj(self, g: Sequence[int]) -> tuple[int, int]:
        return (g[0] % self.mod, (-g[1]) % self.mod)

    def anticyclotomic(self, g: Sequence[int]) -> int:
        """tau(g) = g^{1/2} (g^c)^{-1/2} has coordinates (0, y); return y."""
        return g[1] % self.mod

    def project(self, g: Sequence[int], m: int) -> tuple[int, int]:
        return (g[0] % self.p**m, g[1] % self.p**m)
