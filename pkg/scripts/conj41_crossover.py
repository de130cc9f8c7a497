"""Non-intersecting maxima against the conjectured C(n-k-1,k-1)+1, to find where the conjectured family wins.

usage: python scripts/conj41_crossover.py [--k 3] [--n 6 7 8]
"""

import argparse
import time

from setlab.constructions import section4_g_size
from setlab.search.theorems import verify_theorem


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--n", type=int, nargs="+", default=[6, 7, 8])
    a = ap.parse_args()
    first = None
    print(f"{'n':>3} {'optimum':>8} {'conj':>5} {'G':>4} {'orbits':>7} {'sec':>7}  conjectured optimal")
    for n in a.n:
        t0 = time.perf_counter()
        (rep,) = verify_theorem("conj41", n, a.k, 3)
        ok = rep.verdict["conjectured_family_optimal"]
        g = section4_g_size(n, a.k) if 2 * a.k < n else "-"
        print(
            f"{n:>3} {rep.optimum:>8} {rep.verdict['bound']:>5} {g:>4} {len(rep.extremal):>7} "
            f"{time.perf_counter() - t0:>7.2f}  {ok}"
        )
        # track the start of the final run of wins
        if not ok:
            first = None
        elif first is None:
            first = n
    print(f"conjectured family uniquely optimal from n = {first} to the end of the range")


if __name__ == "__main__":
    main()
