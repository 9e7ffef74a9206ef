"""Finite abelian groups in Smith normal form and presentations by generators/relations."""

from __future__ import annotations

import itertools
import math
from typing import Callable, Hashable, Iterable, Sequence

Matrix = list[list[int]]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (D, U, V) with U*A*V = D diagonal, d_i | d_{i+1}, U and V unimodular."""
    m = len(a)
    n = len(a[0]) if m else 0
    A = [list(map(int, row)) for row in a]
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row_dst += k*row_src
        if k:
            A[dst] = [x + k * y for x, y in zip(A[dst], A[src])]
            U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        if k:
            for row in A:
                row[dst] += k * row[src]
            for row in V:
                row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(t, i, -q)
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(t, j, -q)
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                # divisibility condition on the remaining block
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if A[i][j] % A[t][t]:
                            add_row(i, t, 1)
                            done = False
                            break
                    if not done:
                        break
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return A, U, V


class FiniteAbelianGroup:
    """Z/d_1 x ... x Z/d_k with every d_i > 1; Smith-form constructors give d_1 | d_2 | ...."""

    __slots__ = ("invariants",)

    def __init__(self, invariants: Iterable[int]):
        inv = tuple(int(d) for d in invariants if d != 1)
        if any(d <= 0 for d in inv):
            raise ValueError("invariants must be positive")
        self.invariants = inv

    def __repr__(self) -> str:
        return f"FiniteAbelianGroup{self.invariants}"

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.invariants == other.invariants

    def __hash__(self):
        return hash(self.invariants)

    @property
    def rank(self) -> int:
        return len(self.invariants)

    def order(self) -> int:
        return math.prod(self.invariants)

    def exponent(self) -> int:
        return math.lcm(*self.invariants) if self.invariants else 1

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(a) % d for a, d in zip(x, self.invariants))

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.invariants))

    def sub(self, x, y) -> tuple[int, ...]:
        return tuple((a - b) % d for a, b, d in zip(x, y, self.invariants))

    def neg(self, x) -> tuple[int, ...]:
        return tuple((-a) % d for a, d in zip(x, self.invariants))

    def mul(self, k: int, x) -> tuple[int, ...]:
        return tuple((k * a) % d for a, d in zip(x, self.invariants))

    def elements(self) -> list[tuple[int, ...]]:
        return [tuple(e) for e in itertools.product(*[range(d) for d in self.invariants])]

    def element_order(self, x) -> int:
        o = 1
        for a, d in zip(x, self.invariants):
            o = math.lcm(o, d // math.gcd(a, d))
        return o

    def gens(self) -> list[tuple[int, ...]]:
        out = []
        for i in range(self.rank):
            g = [0] * self.rank
            g[i] = 1
            out.append(tuple(g))
        return out

    def sqrt(self, x) -> tuple[int, ...]:
        """Unique square root in a group of odd order."""
        n = self.order()
        if n % 2 == 0:
            raise ValueError("square roots are unique only in odd-order groups")
        return self.mul((n + 1) // 2, x)

    def p_part(self, p: int) -> tuple["FiniteAbelianGroup", Callable[[Sequence[int]], tuple[int, ...]]]:
        """The maximal p-quotient together with the projection onto it."""
        keep = []
        for d in self.invariants:
            e = 1
            while d % p == 0:
                d //= p
                e *= p
            keep.append(e)
        idx = sorted((i for i, e in enumerate(keep) if e > 1), key=lambda i: keep[i])
        quot = FiniteAbelianGroup([keep[i] for i in idx])

        def proj_sorted(x: Sequence[int]) -> tuple[int, ...]:
            return tuple(int(x[i]) % keep[i] for i in idx)

        return quot, proj_sorted

    def p_part_section(
        self, p: int
    ) -> tuple["FiniteAbelianGroup", Callable[[Sequence[int]], tuple[int, ...]], Callable[[Sequence[int]], tuple[int, ...]]]:
        """(quotient, projection, section) where the section lands in the p-Sylow subgroup."""
        quot, proj = self.p_part(p)
        keep = []
        for d in self.invariants:
            e = 1
            while d % p == 0:
                d //= p
                e *= p
            keep.append(e)
        idx = sorted((i for i, e in enumerate(keep) if e > 1), key=lambda i: keep[i])
        inv = self.invariants

        def section(y: Sequence[int]) -> tuple[int, ...]:
            x = [0] * self.rank
            for pos, i in enumerate(idx):
                m = inv[i] // keep[i]
                x[i] = (int(y[pos]) * m * pow(m, -1, keep[i])) % inv[i]
            return tuple(x)

        return quot, proj, section

    @staticmethod
    def product(*groups: "FiniteAbelianGroup") -> "FiniteAbelianGroup":
        """Direct product with concatenated (not re-normalised) invariants."""
        inv: list[int] = []
        for g in groups:
            inv.extend(g.invariants)
        return FiniteAbelianGroup(inv)

    def characters(self) -> list[tuple[int, ...]]:
        """Characters as exponent vectors k: chi(x) = exp(2 pi i sum k_i x_i / d_i)."""
        return self.elements()

    def char_value_exponent(self, k: Sequence[int], x: Sequence[int]) -> tuple[int, int]:
        """chi_k(x) = zeta_N^e with N the exponent; returns (e, N)."""
        n = self.exponent()
        e = sum(ki * xi * (n // d) for ki, xi, d in zip(k, x, self.invariants)) % n
        return e, n


class Presentation:
    """Finite abelian group Z^k / <relations> with the map to Smith form coordinates."""

    def __init__(self, ngens: int, relations: Sequence[Sequence[int]]):
        self.ngens = ngens
        rels = [list(r) for r in relations]
        if not rels:
            raise ValueError("a finite group needs relations")
        D, U, V = smith_normal_form(rels)
        diag = [D[i][i] if i < len(D) else 0 for i in range(ngens)]
        if any(d == 0 for d in diag):
            raise ValueError("presentation defines an infinite group")
        self._diag = diag
        self._V = V
        self._keep = [i for i, d in enumerate(diag) if d != 1]
        self.group = FiniteAbelianGroup([diag[i] for i in self._keep])
        # columns of V^{-1} restricted to kept coordinates give generator lifts
        self._Vinv = _inverse_unimodular(V)

    def to_group(self, vec: Sequence[int]) -> tuple[int, ...]:
        out = []
        for i in self._keep:
            s = 0
            for j, x in enumerate(vec):
                if x:
                    s += x * self._V[j][i]
            out.append(s % self._diag[i])
        return tuple(out)

    def lift(self, elem: Sequence[int]) -> list[int]:
        """A vector in Z^k mapping to the given group element."""
        vec = [0] * self.ngens
        for pos, i in enumerate(self._keep):
            x = elem[pos]
            for j in range(self.ngens):
                vec[j] += x * self._Vinv[i][j]
        return vec


def _inverse_unimodular(V: Matrix) -> Matrix:
    from fractions import Fraction

    n = len(V)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(V)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    out = [[int(x) for x in row[n:]] for row in M]
    return out


class BlackBoxGroup:
    """Structure of a finite abelian group given by hashable elements and a product.

    The whole group is enumerated, so this is intended for groups of moderate size.
    """

    def __init__(
        self,
        generators: Sequence[Hashable],
        op: Callable[[Hashable, Hashable], Hashable],
        identity: Hashable,
    ):
        self.op = op
        self.identity = identity
        table: dict[Hashable, tuple[int, ...]] = {identity: ()}
        gens: list[Hashable] = []
        relations: list[list[int]] = []
        for g in generators:
            if g in table:
                continue
            k = len(gens)
            # smallest m with g^m in the current subgroup
            m, cur = 1, g
            while cur not in table:
                cur = op(cur, g)
                m += 1
            rel = [-x for x in _pad(table[cur], k)] + [m]
            relations = [r + [0] for r in relations]
            relations.append(rel)
            new_table: dict[Hashable, tuple[int, ...]] = {}
            power = identity
            for j in range(m):
                for h, vec in table.items():
                    new_table[op(h, power) if j else h] = _pad(vec, k) + (j,)
                power = op(power, g)
            table = new_table
            gens.append(g)
        self.generators = gens
        self._table = table
        if gens:
            self.presentation = Presentation(len(gens), relations)
            self.group = self.presentation.group
        else:
            self.presentation = None
            self.group = FiniteAbelianGroup([])

    def dlog(self, x: Hashable) -> tuple[int, ...]:
        if self.presentation is None:
            if x != self.identity:
                raise KeyError("element not in the trivial group")
            return ()
        return self.presentation.to_group(_pad(self._table[x], len(self.generators)))

    def order(self) -> int:
        return len(self._table)

    def elements(self) -> list[Hashable]:
        return list(self._table)

    def element_of(self, coords: Sequence[int]) -> Hashable:
        vec = self.presentation.lift(coords) if self.presentation else []
        out = self.identity
        for g, e in zip(self.generators, vec):
            out = self.op(out, self.power(g, e))
        return out

    def power(self, g: Hashable, e: int) -> Hashable:
        n = self.order()
        e %= n
        result, base = self.identity, g
        while e:
            if e & 1:
                result = self.op(result, base)
            base = self.op(base, base)
            e >>= 1
        return result


def _pad(vec: tuple[int, ...], k: int) -> tuple[int, ...]:
    return tuple(vec) + (0,) * (k - len(vec))


def hom_matrix_is_iso(
    src: FiniteAbelianGroup, dst: FiniteAbelianGroup, images: Sequence[Sequence[int]]
) -> bool:
    """Is the homomorphism sending the i-th generator of src to images[i] bijective?

    Surjectivity is read off the Smith form of the image lattice together with the
    relations of dst; with equal orders this is equivalent to bijectivity. The
    images must respect the relations of src.
    """
    for d, img in zip(src.invariants, images):
        if any((d * a) % e for a, e in zip(img, dst.invariants)):
            raise ValueError("images do not define a homomorphism")
    if src.order() != dst.order():
        return False
    if dst.rank == 0:
        return True
    rows = [list(img) for img in images]
    for i, e in enumerate(dst.invariants):
        r = [0] * dst.rank
        r[i] = e
        rows.append(r)
    D, _, _ = smith_normal_form(rows)
    return all(abs(D[i][i]) == 1 for i in range(dst.rank))
