"""Ingestion of newform coefficient files.

Format: header lines ``label <s>``, ``weight <k>``, ``level <N>``, ``base-field <F>``
(optionally ``nebentypus trivial``), then one ``n a_n`` row per line. For a quadratic
coefficient field give ``base-field x^2+Bx+C`` and rows ``n a b`` meaning a + b r, where
r is a root of the polynomial; rational entries like ``3/2`` are accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import sympy


class NewformFormatError(ValueError):
    pass


@dataclass
class NewformFile:
    label: str
    weight: int
    level: int
    base_field: str
    coeffs: list = field(repr=False)  # coeffs[n] for 1 <= n <= B; index 0 unused
    trivial_nebentypus: bool = True

    @property
    def bound(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_rational(self) -> bool:
        return self.base_field == "Q"

    def a(self, n: int):
        if n < 1 or n > self.bound:
            raise IndexError(f"a_{n} is beyond the ingested bound {self.bound}")
        return self.coeffs[n]

    def roots(self) -> list[complex]:
        if self.is_rational:
            return [1.0]
        x = sympy.Symbol("x")
        poly = sympy.Poly(sympy.sympify(self.base_field.replace("^", "**")), x)
        return [complex(r) for r in poly.nroots(n=30)]

    def embedded(self, embedding: int = 0) -> list[float | complex]:
        """Complex values of a_n under the chosen embedding of the coefficient field."""
        if self.is_rational:
            return [0] + [int(c) if Fraction(c).denominator == 1 else float(c) for c in self.coeffs[1:]]
        r = self.roots()[embedding]
        return [0] + [float(a) + float(b) * r for a, b in self.coeffs[1:]]

    def validate(self, spot: int = 200) -> None:
        vals = self.embedded(0)
        if vals[1] != 1:
            raise NewformFormatError("a_1 must be 1")
        B = min(self.bound, spot)
        for m in range(2, B + 1):
            for n in range(2, B // m + 1):
                if math.gcd(m, n) == 1 and abs(vals[m * n] - vals[m] * vals[n]) > 1e-9:
                    raise NewformFormatError(f"multiplicativity fails at a_{m * n}")
        for p in sympy.primerange(2, B + 1):
            if self.level % p and abs(vals[p]) > 2 * p ** ((self.weight - 1) / 2) + 1e-9:
                raise NewformFormatError(f"Weil bound fails at p = {p}")


def _parse_number(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except ValueError as exc:
        raise NewformFormatError(f"bad coefficient {tok!r}") from exc


def parse_newform(text: str) -> NewformFile:
    header: dict[str, str] = {}
    rows: dict[int, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not parts[0].lstrip("-").isdigit():
            if len(parts) < 2:
                raise NewformFormatError(f"line {lineno}: header without a value")
            header[parts[0]] = " ".join(parts[1:])
            continue
        n = int(parts[0])
        vals = [_parse_number(t) for t in parts[1:]]
        if len(vals) not in (1, 2):
            raise NewformFormatError(f"line {lineno}: expected 'n a_n' or 'n a b'")
        rows[n] = vals
    for key in ("label", "weight", "level", "base-field"):
        if key not in header:
            raise NewformFormatError(f"missing header line {key!r}")
    base = header["base-field"].replace(" ", "")
    if not rows:
        raise NewformFormatError("no coefficients")
    B = max(rows)
    if sorted(rows) != list(range(1, B + 1)):
        raise NewformFormatError("coefficient rows must be n = 1..B without gaps")
    if base == "Q":
        coeffs = [None] + [v[0] if len(v) == 1 else None for _, v in sorted(rows.items())]
        if any(c is None for c in coeffs[1:]):
            raise NewformFormatError("rational newform rows must have one value")
        coeffs = [0] + [int(c) if c.denominator == 1 else c for c in coeffs[1:]]
    else:
        coeffs = [(Fraction(0), Fraction(0))]
        for _, v in sorted(rows.items()):
            coeffs.append((v[0], v[1] if len(v) == 2 else Fraction(0)))
    neb = header.get("nebentypus", "trivial").strip().lower()
    return NewformFile(
        label=header["label"],
        weight=int(header["weight"]),
        level=int(header["level"]),
        base_field=base,
        coeffs=coeffs,
        trivial_nebentypus=neb in ("trivial", "1"),
    )


def load_newform(path: str | Path, validate: bool = True) -> NewformFile:
    nf = parse_newform(Path(path).read_text())
    if validate:
        nf.validate()
    return nf


def bundled_newform(name: str = "33a1") -> NewformFile:
    return load_newform(Path(__file__).with_name("data") / f"{name}.txt")
