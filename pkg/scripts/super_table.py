"""Print H^1 dimensions for the resonant super triples next to the tabulated
values, with the sector parity and the truncation history.

    python3 scripts/super_table.py [--relative]
"""
import argparse
import time
from fractions import Fraction

from supercohom import classify, dim_h1, dim_h1_relative

H = Fraction(1, 2)

# triple -> tabulated dimension
TRIPLES = {
    (-H, -H, Fraction(1)): 6,
    (-H, Fraction(-1), Fraction(3, 2)): 6,
    (Fraction(1, 3), Fraction(1, 5), Fraction(23, 15)): 1,
    (Fraction(1, 3), Fraction(1, 5), Fraction(61, 30)): 1,
    (Fraction(0), Fraction(0), Fraction(1)): 1,
    (Fraction(-1), -H, H): 2,
    (Fraction(0), Fraction(0), H): 1,
    (Fraction(0), Fraction(-1), Fraction(3, 2)): 3,
    (-H, -H, Fraction(3, 2)): 2,
    (Fraction(-1), Fraction(-1), Fraction(5, 2)): 2,
    (Fraction(-1), -H, Fraction(1)): 5,
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--relative", action="store_true", help="also compute the relative dimension")
    args = ap.parse_args()
    print("lambda\tnu\tmu\tclass\ttabulated\tcomputed\tparity\trelative\thistory\tseconds")
    for (lam, nu, mu), want in TRIPLES.items():
        t = time.perf_counter()
        r = dim_h1(lam, nu, mu, parity="both", want_basis=False)
        rel = dim_h1_relative(lam, nu, mu, want_basis=False) if args.relative else "-"
        hist = " ".join(f"{n},{d}:{v}" for n, d, v in r.history)
        print(f"{lam}\t{nu}\t{mu}\t{classify(lam, nu, mu).tag}\t{want}\t{r.dim}\t{r.parity}\t"
              f"{rel}\t{hist}\t{time.perf_counter() - t:.1f}")


if __name__ == "__main__":
    main()
