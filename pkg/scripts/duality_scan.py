"""Round-trip the unstable-subfamily involution over random CI families drawn from a k-layer.

usage: python scripts/duality_scan.py [--n 6] [--k 2] [--d 3] [--s 4] [--families 1000]
"""

import argparse
import itertools
import random

from setlab.duality import duality_forward, duality_inverse
from setlab.errors import CapabilityError
from setlab.predicates import ConditionParams, is_conditionally_intersecting, iter_unstable_subfamilies
from setlab.setfam import ElementSet, SetFamily, ShiftPair, uniform_family


def random_ci(rng, n, k, p):
    layer = list(uniform_family(n, k).masks)
    rng.shuffle(layer)
    out = []
    for m in layer:
        if is_conditionally_intersecting(SetFamily(n, out + [m]), p):
            out.append(m)
    return SetFamily(n, out)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--s", type=int, default=4)
    ap.add_argument("--families", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    rng = random.Random(a.seed)
    p = ConditionParams(a.d, a.s)
    traced = swapped = refused = failed = 0
    for _ in range(a.families):
        f = random_ci(rng, a.n, a.k, p)
        for i, j in itertools.permutations(range(1, a.n + 1), 2):
            pair = ShiftPair(i, j)
            for combo in iter_unstable_subfamilies(f, pair, p):
                sub = [ElementSet(m, a.n) for m in combo]
                try:
                    tr = duality_forward(sub, f, pair, p)
                except CapabilityError:
                    refused += 1
                    continue
                traced += 1
                swapped += bool(tr.fixed)
                ok = duality_inverse(tr, f, pair, p) == tr.input
                ok = ok and tr.reverse_fixed == tr.swapped and tr.reverse_swapped == tr.fixed
                failed += not ok
    print(f"families {a.families}: traced {traced}, with swaps {swapped}, "
          f"refused (no member avoiding i and j) {refused}, failures {failed}")


if __name__ == "__main__":
    main()
