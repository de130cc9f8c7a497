"""Sweep contiguous partition specs and check the union threshold and its witness.

For each spec with g_r not d-wise intersecting, checks that g_r satisfies
the condition at s = theorem56_s and that the constructed d sets violate it
at s + 1.  Prints one summary row per (d, k).

usage: python scripts/threshold_sweep.py [--d 3 4] [--k 2 3] [--max-n 7]
"""

import argparse
import itertools
from collections import Counter

from setlab.constructions import PartitionSpec, g_r, theorem56_s, theorem56_witness
from setlab.errors import CapabilityError
from setlab.predicates import ConditionParams, is_conditionally_intersecting, is_d_wise_t_intersecting


def compositions(n, r):
    if r == 1:
        yield (n,)
        return
    for a in range(1, n - r + 2):
        for rest in compositions(n - a, r - 1):
            yield (a,) + rest


def specs(n, k):
    for r in range(1, min(k, n) + 1):
        for sizes in compositions(n, r):
            for th in itertools.product(range(k + 1), repeat=r):
                if sum(th) <= k:
                    yield PartitionSpec.contiguous(sizes, th)


def classify(d, k, spec):
    f = g_r(spec.n, k, spec)
    if is_d_wise_t_intersecting(f, d):
        return "d-wise intersecting"
    s = theorem56_s(d, k, spec)
    if not is_conditionally_intersecting(f, ConditionParams(d, s)):
        return "FAIL: violated at s"
    try:
        theorem56_witness(d, k, spec)
        return "ok"
    except CapabilityError:
        if is_conditionally_intersecting(f, ConditionParams(d, s + 1)):
            return "still CI at s+1"
        return "no distinct witness"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, nargs="+", default=[3, 4])
    ap.add_argument("--k", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--max-n", type=int, default=7)
    a = ap.parse_args()
    for d in a.d:
        for k in a.k:
            tally = Counter(
                classify(d, k, spec) for n in range(k, a.max_n + 1) for spec in specs(n, k)
            )
            print(f"d={d} k={k}: " + ", ".join(f"{name} {c}" for name, c in sorted(tally.items())))


if __name__ == "__main__":
    main()
