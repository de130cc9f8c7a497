"""Exact maxima for the k-uniform d=3 condition with union bound 2k, against the star size.

usage: python scripts/mubayi_sweep.py [--n 5 6 7] [--k 3] [--threads N]
"""

import argparse
import time

from setlab.search.theorems import verify_theorem


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[5, 6, 7])
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--stable", action="store_true", help="run the stability-restricted check instead")
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args()
    name = "stable-mubayi" if a.stable else "mubayi"
    print(f"{'n':>3} {'optimum':>8} {'star':>6} {'orbits':>7} {'nodes':>9} {'sec':>7}  status")
    for n in a.n:
        t0 = time.perf_counter()
        (rep,) = verify_theorem(name, n, a.k, a.d, threads=a.threads)
        v = rep.verdict
        print(
            f"{n:>3} {rep.optimum:>8} {v['bound']:>6} {len(rep.extremal):>7} {rep.nodes:>9} "
            f"{time.perf_counter() - t0:>7.2f}  {v['status']}"
        )


if __name__ == "__main__":
    main()
