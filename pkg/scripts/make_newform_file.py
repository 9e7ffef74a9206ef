"""Write a newform file for the weight-2 form attached to an elliptic curve over Q.

a_p comes from counting affine points on y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
(a_p = p - #affine points holds at good and bad primes alike); a_n follows by
multiplicativity and the Hecke recursion.

    python3 scripts/make_newform_file.py --label 33.2.a.a --level 33 \
        --ainvs 1,1,0,-11,0 --bound 60000 --out src/anticyc/data/33a1.txt
"""

from __future__ import annotations

import argparse

import numpy as np
import sympy


def count_affine(ainvs: list[int], p: int) -> int:
    a1, a2, a3, a4, a6 = (a % p for a in ainvs)
    x = np.arange(p, dtype=np.int64)
    rhs = (((x + a2) * x % p + a4) * x % p + a6) % p
    lin = (a1 * x + a3) % p
    if p == 2:
        count = 0
        for y in range(2):
            count += int(np.count_nonzero((y * y + lin * y - rhs) % 2 == 0))
        return count
    # y^2 + lin y - rhs = 0 has 1 + (disc / p) solutions
    disc = (lin * lin + 4 * rhs) % p
    squares = np.zeros(p, dtype=np.int64)
    squares[(x * x) % p] = 1
    legendre = np.where(disc == 0, 0, 2 * squares[disc] - 1)
    return int(p + legendre.sum())


def coefficients(ainvs: list[int], level: int, bound: int) -> list[int]:
    a = [0] * (bound + 1)
    a[1] = 1
    ap = {}
    for p in sympy.primerange(2, bound + 1):
        ap[p] = p - count_affine(ainvs, p)
    for n in range(2, bound + 1):
        f = sympy.factorint(n)
        if len(f) == 1:
            (p, e), = f.items()
            if e == 1:
                a[n] = ap[p]
            elif level % p == 0:
                a[n] = ap[p] ** e
            else:
                a[n] = ap[p] * a[n // p] - p * a[n // (p * p)]
        else:
            p, e = next(iter(f.items()))
            q = p**e
            a[n] = a[q] * a[n // q]
    return a


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--label", required=True)
    ap.add_argument("--level", type=int, required=True)
    ap.add_argument("--ainvs", required=True)
    ap.add_argument("--bound", type=int, default=60000)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    ainvs = [int(t) for t in args.ainvs.split(",")]
    a = coefficients(ainvs, args.level, args.bound)
    with open(args.out, "w") as fh:
        fh.write(f"label {args.label}\nweight 2\nlevel {args.level}\nbase-field Q\n")
        for n in range(1, args.bound + 1):
            fh.write(f"{n} {a[n]}\n")


if __name__ == "__main__":
    main()
