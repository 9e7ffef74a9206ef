"""Central values of L(f/K, chi, s) = L(f x theta_chi, s) by a smoothed approximate
functional equation, and the interpolation ratio check against theta elements.

Normalization: arithmetic, centre s = 1, Lambda(s) = N^{s/2} prod_mu Gamma_C(s + mu) L(s)
and Lambda(s) = w Lambda(2 - s). With r Gamma_C factors and all shifts zero this is
A^s Gamma(s)^r L(s) up to a constant, A = sqrt(N) / (2 pi)^r, and for any t > 0

    L(1) = sum_n b_n / n * (V_r(n t / A) + w V_r(n / (t A))),

where V_1(x) = exp(-x) and V_2(x) = 2 sqrt(x) K_1(2 sqrt(x)) (the inverse Mellin
transform of Gamma(1 + z)^r / z). Evaluating at two values of t fits w and gives the
functional-equation residual.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2
import sympy
from gmpy2 import mpc, mpfr

from .classfield import AssumptionError, RingClassGroup
from .newform import NewformFile
from .quadfield import QuadField, kronecker, splitting

# Gamma_C shifts per L-series type; the residual test arbitrates the choice
GAMMA_SHIFTS = {
    "rankin-weight2-weight1": (0, 0),
    "weight2": (0,),
}

DEFAULT_BITS = 110


class InsufficientCoefficients(ValueError):
    pass


class TailTooLarge(ArithmeticError):
    pass


def _ctx(bits: int):
    return gmpy2.context(gmpy2.get_context(), precision=bits)


# ---------------------------------------------------------------------------
# smoothing functions
# ---------------------------------------------------------------------------


_NODE_CACHE: dict = {}


def _cosh_nodes(bits: int, hk: int, count: int) -> list:
    key = (bits, hk)
    nodes = _NODE_CACHE.get(key)
    if nodes is None or len(nodes) < count:
        h = mpfr(2) ** (mpfr(-hk) / 4)
        nodes = [gmpy2.cosh(j * h) for j in range(count)]
        _NODE_CACHE[key] = nodes
    return nodes


def smoothing(r: int, x, bits: int, nats: float | None = None):
    """V_r(x) at the current precision (caller sets the context), to about exp(-nats)."""
    x = mpfr(x)
    if r == 1:
        return gmpy2.exp(-x)
    if r != 2:
        raise ValueError("only one or two Gamma_C factors are supported")
    z = 2 * gmpy2.sqrt(x)
    zf = float(z)
    L = (nats if nats is not None else bits * math.log(2)) + 5
    h_target = min(math.sqrt(2 * math.pi**2 / (L * zf)) if zf > 0 else 1.0, math.pi**2 / (2 * L))
    hk = max(0, math.ceil(-4 * math.log2(h_target)))
    h = 2.0 ** (-hk / 4)
    T = math.acosh(1 + L / zf)
    count = int(T / h) + 2
    nodes = _cosh_nodes(bits, hk, count)
    s = nodes[0] * gmpy2.exp(-z * (nodes[0] - 1)) / 2
    for c in nodes[1:count]:
        s += c * gmpy2.exp(-z * (c - 1))
    return z * gmpy2.exp(-z) * s * mpfr(2) ** (mpfr(-hk) / 4)


def smoothing_cutoff(r: int, eps: float) -> float:
    """x with V_r(y) < eps for y >= x."""
    x = 1.0
    while True:
        v = math.exp(-x) if r == 1 else 2 * math.sqrt(x) * math.sqrt(math.pi) / 2 / (x**0.25) * math.exp(-2 * math.sqrt(x)) * 1.2
        if v < eps:
            return x
        x *= 1.1


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------


def _spf(n: int) -> list[int]:
    s = list(range(n + 1))
    for i in range(2, math.isqrt(n) + 1):
        if s[i] == i:
            for j in range(i * i, n + 1, i):
                if s[j] == j:
                    s[j] = i
    return s


def multiplicative_fill(prime_powers: dict[int, list], B: int, one) -> list:
    """a_n for n <= B from a_{l^j} (prime_powers[l][j])."""
    spf = _spf(B)
    a = [None] * (B + 1)
    a[1] = one
    for n in range(2, B + 1):
        l = spf[n]
        m, e = n, 0
        while m % l == 0:
            m //= l
            e += 1
        a[n] = prime_powers[l][e] * a[m] if m > 1 else prime_powers[l][e]
    a[0] = 0
    return a


_CLASS_CACHE: dict = {}


@dataclass
class RingClassCharacter:
    """nu on Pic(O_m) given by the exponent vector k on the Smith generators."""

    K: QuadField
    m: int
    k: tuple

    def __post_init__(self):
        self.ring = RingClassGroup(self.K, self.m)
        self.k = tuple(int(x) % d for x, d in zip(self.k, self.ring.full.invariants))

    @property
    def label(self) -> str:
        return f"nu[m={self.m},k={','.join(map(str, self.k))}]"

    def exponent(self, g: Sequence[int]) -> Fraction:
        inv = self.ring.full.invariants
        return sum((Fraction(ki * gi, d) for ki, gi, d in zip(self.k, g, inv)), Fraction(0)) % 1

    def exponent_on_ideal(self, I) -> Fraction:
        key = (self.K.D, self.m, I.key)
        g = _CLASS_CACHE.get(key)
        if g is None:
            g = _CLASS_CACHE[key] = self.ring.full_class_of(I)
        return self.exponent(g)

    def is_trivial(self) -> bool:
        return not any(self.k)

    def conductor(self) -> int:
        """Least m' | m such that nu factors through Pic(O_m')."""
        best = self.m
        for mp in sorted(sympy.divisors(self.m)):
            if mp == self.m:
                break
            sub = RingClassGroup(self.K, mp)
            ok = True
            for g, I in self.ring.representatives.items():
                if not any(sub.full_class_of(I)) and self.exponent(g) != 0:
                    ok = False
                    break
            if ok:
                best = mp
                break
        return best


def ring_class_theta_coeffs(nu: RingClassCharacter, B: int, bits: int = DEFAULT_BITS) -> list:
    """a_n(theta_nu) = sum over O_K-ideals of norm n coprime to m of nu(a), as mpc."""
    K, m = nu.K, nu.m
    if nu.conductor() != m:
        raise AssumptionError("the ring class character is not primitive of conductor m")
    with _ctx(bits):
        two_pi = 2 * gmpy2.const_pi()
        roots: dict = {}

        def root(e: Fraction):
            if e not in roots:
                roots[e] = mpc(gmpy2.cos(two_pi * e.numerator / e.denominator), gmpy2.sin(two_pi * e.numerator / e.denominator))
            return roots[e]

        one, zero = mpc(1), mpc(0)
        pp: dict[int, list] = {}
        for l in sympy.primerange(2, B + 1):
            emax = int(math.log(B, l)) + 1
            sp = splitting(K, l)
            if m % l == 0:
                vals = [one] + [zero] * emax
            elif sp.is_split:
                P, Q = sp.primes
                x, y = root(nu.exponent_on_ideal(P)), root(nu.exponent_on_ideal(Q))
                vals = [one]
                xp = [one]
                yp = [one]
                for _ in range(emax):
                    xp.append(xp[-1] * x)
                    yp.append(yp[-1] * y)
                for e in range(1, emax + 1):
                    vals.append(sum((xp[i] * yp[e - i] for i in range(e + 1)), zero))
            elif sp.is_ramified:
                x = root(nu.exponent_on_ideal(sp.primes[0]))
                vals = [one]
                for _ in range(emax):
                    vals.append(vals[-1] * x)
            else:
                x = root(nu.exponent_on_ideal(sp.primes[0]))
                vals = [one]
                for e in range(1, emax + 1):
                    vals.append(vals[e - 2] * x if e % 2 == 0 else zero)
            pp[l] = vals
        return multiplicative_fill(pp, B, one)


def rankin_coeffs(f_coeffs: Sequence, theta_coeffs: Sequence, nebentypus, bad: int, B: int, bits: int = DEFAULT_BITS) -> list:
    """b_n of L^{(bad)}(eps, 2s - 1) * sum a_n(f) a_n(theta) n^{-s}.

    ``nebentypus`` is the character of theta (a callable on integers, values +-1, 0).
    """
    if len(f_coeffs) <= B or len(theta_coeffs) <= B:
        raise InsufficientCoefficients(f"need {B} coefficients of both series")
    with _ctx(bits):
        c = [mpc(0)] * (B + 1)
        for n in range(1, B + 1):
            c[n] = mpc(f_coeffs[n]) * theta_coeffs[n]
        b = [mpc(0)] * (B + 1)
        for d in range(1, math.isqrt(B) + 1):
            if math.gcd(d, bad) != 1:
                continue
            e = nebentypus(d)
            if e == 0:
                continue
            w = e * d
            dd = d * d
            for m in range(1, B // dd + 1):
                b[m * dd] += w * c[m]
        return b


@dataclass
class LSeries:
    coeffs: list
    conductor: int
    gamma_shifts: tuple
    label: str = ""
    bits: int = DEFAULT_BITS
    root_number: object = None
    weight: int = 2

    @property
    def length(self) -> int:
        return len(self.coeffs) - 1

    def sanity_window(self, upto: int = 2000) -> list[int]:
        """Indices violating |b_n| <= n^{(k-1)/2} d(n)^3."""
        bad = []
        for n in range(1, min(upto, self.length) + 1):
            bound = n ** ((self.weight - 1) / 2) * sympy.divisor_count(n) ** 3 + 1e-9
            if abs(complex(self.coeffs[n])) > bound:
                bad.append(n)
        return bad


def rankin_series(nf: NewformFile, nu: RingClassCharacter, B: int, bits: int = DEFAULT_BITS, embedding: int = 0) -> LSeries:
    K = nu.K
    m = nu.conductor()
    if math.gcd(nf.level, K.D * m) != 1:
        raise AssumptionError("levels of f and theta must be coprime")
    theta = ring_class_theta_coeffs(nu, B, bits)
    theta_level = K.D * m * m
    eps = lambda d: int(kronecker(K.d, d))
    b = rankin_coeffs(nf.embedded(embedding), theta, eps, nf.level * theta_level, B, bits)
    N = (nf.level * theta_level) ** 2
    return LSeries(b, N, GAMMA_SHIFTS["rankin-weight2-weight1"], f"L({nf.label}/K,{nu.label})", bits, weight=nf.weight)


def newform_series(nf: NewformFile, twist_disc: int = 1, B: int | None = None, bits: int = DEFAULT_BITS, embedding: int = 0) -> LSeries:
    """L(f x chi_d, s) for a fundamental discriminant d coprime to the level (d = 1: L(f, s))."""
    if math.gcd(nf.level, twist_disc) != 1:
        raise AssumptionError("twist must be coprime to the level")
    B = B or nf.bound
    a = nf.embedded(embedding)
    with _ctx(bits):
        b = [mpc(0)] + [mpc(a[n] * (int(kronecker(twist_disc, n)) if twist_disc != 1 else 1)) for n in range(1, B + 1)]
    N = nf.level * twist_disc * twist_disc
    return LSeries(b, N, GAMMA_SHIFTS["weight2"], f"L({nf.label} x ({twist_disc}/.))", bits, weight=nf.weight)


# ---------------------------------------------------------------------------
# central values
# ---------------------------------------------------------------------------


@dataclass
class CentralValue:
    value: complex
    root_number: complex
    fitted_root_number: complex
    residual: float
    tail: float
    terms: int
    label: str = ""
    exact_value: object = field(default=None, repr=False)

    def vanishes(self, tau: float) -> bool:
        return abs(self.value) < tau


def terms_needed(L: LSeries, t2: float = 1.1, eps: float | None = None) -> int:
    r = len(L.gamma_shifts)
    A = math.sqrt(L.conductor) / (2 * math.pi) ** r
    eps = eps if eps is not None else 2.0 ** (-L.bits) / 100
    x = smoothing_cutoff(r, eps)
    return int(math.ceil(x * A * t2)) + 1


_TABLES: dict = {}


def smoothing_table(r: int, conductor: int, scale: Fraction, n_max: int, bits: int, nats: float) -> list:
    """[V_r(n * scale / A) for n <= n_max], cached across characters of one conductor."""
    key = (r, conductor, scale, bits, round(nats, 6))
    tab = _TABLES.get(key)
    if tab is not None and len(tab) > n_max:
        return tab
    with _ctx(bits):
        A = gmpy2.sqrt(mpfr(conductor)) / (2 * gmpy2.const_pi()) ** r
        c = mpfr(scale.numerator) / scale.denominator / A
        tab = [mpfr(0)] + [smoothing(r, n * c, bits, nats) / n for n in range(1, n_max + 1)]
    _TABLES[key] = tab
    return tab


def _partial_sums(L: LSeries, table: list, n_max: int, dual: bool):
    total = mpc(0)
    for n in range(1, n_max + 1):
        b = L.coeffs[n]
        if b == 0:
            continue
        if dual:
            b = b.conjugate()
        total += b * table[n]
    return total


def central_value(
    L: LSeries,
    t2: Fraction = Fraction(11, 10),
    root_number=None,
    tol: float | None = None,
    n_max: int | None = None,
    eps: float | None = None,
) -> CentralValue:
    """L(1) with fitted (or given) root number; eps is the truncation target (default 2^-bits)."""
    if any(L.gamma_shifts):
        raise ValueError("nonzero Gamma_C shifts are not supported")
    r = len(L.gamma_shifts)
    eps = eps if eps is not None else 2.0 ** (-L.bits) / 100
    nats = -math.log(eps)
    need = terms_needed(L, float(t2), eps)
    n_max = n_max or need
    if n_max > L.length:
        raise InsufficientCoefficients(f"{n_max} coefficients needed, {L.length} available")
    with _ctx(L.bits):
        A = gmpy2.sqrt(mpfr(L.conductor)) / (2 * gmpy2.const_pi()) ** r
        t = mpfr(t2.numerator) / t2.denominator
        tab1 = smoothing_table(r, L.conductor, Fraction(1), n_max, L.bits, nats)
        tab2 = smoothing_table(r, L.conductor, t2, n_max, L.bits, nats)
        tab3 = smoothing_table(r, L.conductor, 1 / t2, n_max, L.bits, nats)
        S1 = _partial_sums(L, tab1, n_max, False)
        T1 = _partial_sums(L, tab1, n_max, True)
        S2 = _partial_sums(L, tab2, n_max, False)
        T2 = _partial_sums(L, tab3, n_max, True)
        denom = T2 - T1
        fitted = (S1 - S2) / denom if abs(denom) > mpfr(2) ** (-L.bits // 2) else mpc(float("nan"))
        if root_number is None:
            w = fitted
            for cand in (1, -1):
                if abs(fitted - cand) < 1e-6:
                    w = mpc(cand)
        else:
            w = mpc(root_number)
        v1 = S1 + w * T1
        v2 = S2 + w * T2
        residual = abs(v1 - v2)
        # tail: |b_n| <= 8 n^{0.6} beyond n_max, V decays on the scale sqrt(x)
        x0 = n_max / (float(A) * float(t))
        vx = float(smoothing(r, x0, L.bits, nats))
        tail = 8 * n_max ** (-0.4) * float(A) * float(t) * vx * (math.sqrt(x0) + 1) * 2
        cv = CentralValue(
            value=complex(v1),
            root_number=complex(w),
            fitted_root_number=complex(fitted),
            residual=float(residual),
            tail=tail,
            terms=n_max,
            label=L.label,
            exact_value=v1,
        )
    if tol is not None and tail > tol:
        raise TailTooLarge(f"tail estimate {tail:.3e} exceeds {tol:.3e}")
    return cv


# ---------------------------------------------------------------------------
# interpolation ratios
# ---------------------------------------------------------------------------


@dataclass
class RatioRow:
    label: str
    theta_sq: float
    valuation: int | None
    l_value: float
    ratio: float | None


@dataclass
class RatioReport:
    rows: list
    status: str
    spread: float | None
    mean: float | None
    zero_mismatches: list

    @property
    def ok(self) -> bool:
        return self.status == "constant"

    def text(self) -> str:
        head = ("character", "|nu(Theta)|^2", "v_p", "L(f/K,nu,1)", "ratio")
        body = [
            (
                r.label,
                f"{r.theta_sq:.12g}",
                "-" if r.valuation is None else str(r.valuation),
                f"{r.l_value:.12e}",
                "-" if r.ratio is None else f"{r.ratio:.12g}",
            )
            for r in self.rows
        ]
        widths = [max(len(x) for x in col) for col in zip(head, *body)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [head] + body]
        sp = "-" if self.spread is None else f"{self.spread:.3e}"
        lines.append(f"status: {self.status}; relative spread: {sp}")
        return "\n".join(lines) + "\n"

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["character", "theta_sq", "valuation", "l_value", "ratio"])
        for r in self.rows:
            w.writerow([r.label, repr(r.theta_sq), "" if r.valuation is None else r.valuation, repr(r.l_value), "" if r.ratio is None else repr(r.ratio)])
        return buf.getvalue()


def interpolation_ratio_check(
    labels: Sequence[str],
    theta_values: Sequence[complex],
    l_values: Sequence[float],
    valuations: Sequence[int | None] | None = None,
    tol: float = 1e-3,
    zero_tol: float = 1e-8,
) -> RatioReport:
    """Ratios |nu(Theta)|^2 / L(f/K, nu, 1) over a batch of characters of one conductor."""
    valuations = valuations or [None] * len(labels)
    rows = []
    ratios = []
    mismatches = []
    thetas = [abs(complex(t)) ** 2 for t in theta_values]
    if all(t < zero_tol for t in thetas):
        rows = [RatioRow(lb, th, v, float(abs(complex(lv))), None) for lb, th, v, lv in zip(labels, thetas, valuations, l_values)]
        return RatioReport(rows, "degenerate", None, None, [])
    for lb, th, v, lv in zip(labels, thetas, valuations, l_values):
        lv = float(complex(lv).real)
        if abs(lv) < zero_tol:
            rows.append(RatioRow(lb, th, v, lv, None))
            if th > zero_tol:
                mismatches.append(lb)
            continue
        ratio = th / lv
        ratios.append(ratio)
        rows.append(RatioRow(lb, th, v, lv, ratio))
    if not ratios:
        raise ArithmeticError("all L-values vanish; the batch is uninformative")
    mean = sum(ratios) / len(ratios)
    spread = (max(ratios) - min(ratios)) / abs(mean) if mean else float("inf")
    status = "constant" if spread < tol and not mismatches else "not constant"
    return RatioReport(rows, status, spread, mean, mismatches)
