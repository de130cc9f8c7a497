"""Named families and closed-form size bounds.

All bounds are exact integers (or ``Fraction`` where a ratio is involved).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, NamedTuple, Sequence

from setlab.errors import ArgumentError, CapabilityError
from setlab.predicates import is_d_wise_t_intersecting
from setlab.setfam import (
    ElementSet,
    SetFamily,
    binom,
    elements_of,
    shadow,
    uniform_family,
)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _k_subsets_where(n: int, k: int, keep) -> SetFamily:
    if not 0 <= k <= n:
        raise ArgumentError(f"member size {k} outside 0..{n}")
    return SetFamily(n, (m for m in uniform_family(n, k).masks if keep(m)))


def star(n: int, k: int, center: int) -> SetFamily:
    """All k-subsets of [n] containing ``center``."""
    if not 1 <= k <= n:
        raise ArgumentError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 1 <= center <= n:
        raise ArgumentError(f"center {center} outside 1..{n}")
    bit = 1 << (center - 1)
    return _k_subsets_where(n, k, lambda m: m & bit)


# ---------------------------------------------------------------------------
# partition families


@dataclass(frozen=True)
class PartitionSpec:
    """Ordered parts X_1..X_r partitioning [n] with lower thresholds x_1..x_r."""

    parts: tuple[ElementSet, ...]
    thresholds: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ArgumentError("partition needs at least one part")
        if len(self.parts) != len(self.thresholds):
            raise ArgumentError("one threshold per part is required")
        n = self.parts[0].n
        seen = 0
        for p in self.parts:
            if p.n != n:
                raise ArgumentError("parts are over different ground sets")
            if not p.bits:
                raise ArgumentError("parts must be nonempty")
            if seen & p.bits:
                raise ArgumentError("parts overlap")
            seen |= p.bits
        if seen != (1 << n) - 1:
            raise ArgumentError("parts do not cover the ground set")
        if any(x < 0 for x in self.thresholds):
            raise ArgumentError("thresholds must be nonnegative")

    @classmethod
    def of(cls, n: int, parts: Sequence[Sequence[int]], thresholds: Sequence[int]) -> PartitionSpec:
        return cls(tuple(ElementSet.of(p, n) for p in parts), tuple(thresholds))

    @classmethod
    def contiguous(cls, sizes: Sequence[int], thresholds: Sequence[int]) -> PartitionSpec:
        """Parts laid out as consecutive intervals of the given sizes."""
        n = sum(sizes)
        parts, start = [], 1
        for size in sizes:
            parts.append(list(range(start, start + size)))
            start += size
        return cls.of(n, parts, thresholds)

    @property
    def n(self) -> int:
        return self.parts[0].n

    def check_for(self, k: int) -> None:
        if len(self.parts) > k:
            raise ArgumentError(f"{len(self.parts)} parts exceed k={k}")
        if sum(self.thresholds) > k:
            raise ArgumentError(f"thresholds sum to {sum(self.thresholds)} > k={k}")


def g_r(n: int, k: int, spec: PartitionSpec) -> SetFamily:
    """k-subsets meeting every part X_i in at least x_i elements."""
    if spec.n != n:
        raise ArgumentError(f"partition is over [{spec.n}], not [{n}]")
    spec.check_for(k)
    req = [(p.bits, x) for p, x in zip(spec.parts, spec.thresholds)]
    return _k_subsets_where(n, k, lambda m: all((m & b).bit_count() >= x for b, x in req))


def near_equal_parts(n: int, k: int) -> list[list[int]]:
    """k contiguous intervals of [n], sizes differing by at most one, larger first."""
    q, extra = divmod(n, k)
    parts, start = [], 1
    for i in range(k):
        size = q + (1 if i < extra else 0)
        parts.append(list(range(start, start + size)))
        start += size
    return parts


def h_k(n: int, k: int) -> SetFamily:
    """Transversals of the near-equal k-part partition of [n]."""
    if not 1 <= k <= n:
        raise ArgumentError(f"need n >= k >= 1, got n={n}, k={k}")
    spec = PartitionSpec.of(n, near_equal_parts(n, k), [1] * k)
    parts = [p.bits for p in spec.parts]
    return _k_subsets_where(n, k, lambda m: all((m & b).bit_count() == 1 for b in parts))


def f_j(n: int, k: int, t: int, j: int) -> SetFamily:
    """k-subsets meeting [t + 2j] in at least t + j elements."""
    if t < 1 or j < 0:
        raise ArgumentError(f"need t >= 1 and j >= 0, got t={t}, j={j}")
    if t + 2 * j > n:
        raise ArgumentError(f"t + 2j = {t + 2 * j} exceeds n={n}")
    if t + j > k:
        raise ArgumentError(f"t + j = {t + j} exceeds k={k}")
    head = (1 << (t + 2 * j)) - 1
    return _k_subsets_where(n, k, lambda m: (m & head).bit_count() >= t + j)


def f_prime(n: int, k: int, t: int) -> SetFamily:
    """k-sets holding [t] and meeting [k+1] - [t], plus the k-subsets of [k+1]."""
    if not 1 <= t <= k:
        raise ArgumentError(f"need 1 <= t <= k, got t={t}, k={k}")
    if k + 1 > n:
        raise ArgumentError(f"need k + 1 <= n, got k={k}, n={n}")
    core = (1 << t) - 1
    ring = ((1 << (k + 1)) - 1) & ~core
    first = [m for m in uniform_family(n, k).masks if m & core == core and m & ring]
    top = (1 << (k + 1)) - 1
    second = [top & ~(1 << i) for i in range(k + 1)]
    return SetFamily(n, first + second)


def twin_2_star(n: int, x: int, y: int, assignment: Mapping[int, int]) -> SetFamily:
    """Pairs {z, c(z)} for each z outside {x, y}, with c(z) in {x, y}.

    Both centers must be used: sending every z to one center gives a plain
    star, which is intersecting.
    """
    if x == y or not (1 <= x <= n and 1 <= y <= n):
        raise ArgumentError(f"centers must be distinct elements of 1..{n}, got {x},{y}")
    outside = [z for z in range(1, n + 1) if z not in (x, y)]
    if sorted(assignment) != outside:
        raise ArgumentError(f"assignment must cover exactly {outside}")
    if any(c not in (x, y) for c in assignment.values()):
        raise ArgumentError("assignment targets must be the centers")
    if len(set(assignment.values())) < 2:
        raise ArgumentError("assignment uses one center only; that is a star")
    return SetFamily.of(n, ([z, assignment[z]] for z in outside))


def conjecture41_family(n: int, k: int, x: int, b: ElementSet) -> SetFamily:
    """k-sets through x that miss B, together with B itself (x not in B)."""
    if b.n != n or len(b) != k:
        raise ArgumentError(f"B must be a {k}-subset of [{n}]")
    if not 1 <= x <= n:
        raise ArgumentError(f"x={x} outside 1..{n}")
    if x in b:
        raise ArgumentError(f"x={x} lies in B")
    xbit = 1 << (x - 1)
    members = [m for m in uniform_family(n, k).masks if m & xbit and not m & b.bits]
    return SetFamily(n, members + [b.bits])


def conjecture41_size(n: int, k: int) -> int:
    return binom(n - k - 1, k - 1) + 1


def section4_g_family(
    n: int, k: int, b1: ElementSet, b2: ElementSet, x: int, y: int
) -> SetFamily:
    """{B1, B2} plus the k-sets through x and y that leave B1 | B2."""
    for b in (b1, b2):
        if b.n != n or len(b) != k:
            raise ArgumentError(f"B1, B2 must be {k}-subsets of [{n}]")
    if b1.bits & b2.bits:
        raise ArgumentError("B1 and B2 must be disjoint")
    if x not in b1 or y not in b2:
        raise ArgumentError("need x in B1 and y in B2")
    xy = (1 << (x - 1)) | (1 << (y - 1))
    outside = ((1 << n) - 1) & ~(b1.bits | b2.bits)
    members = [m for m in uniform_family(n, k).masks if m & xy == xy and m & outside]
    return SetFamily(n, members + [b1.bits, b2.bits])


def section4_g_size(n: int, k: int) -> int:
    return binom(n - 2, k - 2) - binom(2 * k - 2, k - 2) + 2


# ---------------------------------------------------------------------------
# union thresholds for partition families


def lemma54_min_n(d: int, k: int) -> int:
    """Least ground set size on which d k-sets can have empty intersection."""
    if d < 2 or k < 2:
        raise ArgumentError(f"need d >= 2 and k >= 2, got d={d}, k={k}")
    return _ceil_div(d * k, d - 1)


def theorem56_s(d: int, k: int, spec: PartitionSpec) -> int:
    """Largest s for which a non-d-wise-intersecting G_r is (d, s)-CI."""
    if d < 2:
        raise ArgumentError(f"need d >= 2, got d={d}")
    spec.check_for(k)
    ys = sum(_ceil_div(d * x, d - 1) for x in spec.thresholds)
    return max(_ceil_div(d * k, d - 1) - 1, ys - 1)


def _fill_part(elements: Sequence[int], d: int, total: int, x: int) -> list[list[int]]:
    """Spread ``elements`` over d sets with empty common intersection.

    Every element but the last goes to the d - 1 currently smallest sets;
    the last goes to enough of the smallest sets that the sizes add up to
    ``total``.  Ties between sets break by index.
    """
    sets: list[list[int]] = [[] for _ in range(d)]
    if not elements:
        return sets
    for e in elements[:-1]:
        for j in sorted(range(d), key=lambda j: (len(sets[j]), j))[: d - 1]:
            sets[j].append(e)
    rest = total - (d - 1) * (len(elements) - 1)
    if not 1 <= rest <= d - 1:
        raise RuntimeError(f"fill count {rest} for the last element outside 1..{d - 1}")
    for j in sorted(range(d), key=lambda j: (len(sets[j]), j))[:rest]:
        sets[j].append(elements[-1])
    if any(not x <= len(s) <= x + 1 for s in sets):
        raise RuntimeError("part fill left a set outside sizes x..x+1")
    return sets


def _merge_parts(d: int, blocks: Sequence[list[list[int]]]) -> Iterator[list[list[int]]]:
    """Every way to glue the per-part blocks with larger pieces on smaller sets.

    Ties leave the relabeling free; choices are yielded depth first with the
    plain sorted assignment first, so callers can skip ones that repeat a set.
    """

    def rec(i: int, out: list[list[int]]) -> Iterator[list[list[int]]]:
        if i == len(blocks):
            yield out
            return
        slots = sorted(range(d), key=lambda j: (len(out[j]), j))
        pieces = sorted(blocks[i], key=len, reverse=True)
        tried = set()
        for perm in itertools.permutations(range(d)):
            chosen = [pieces[q] for q in perm]
            ok = all(
                len(chosen[a]) >= len(chosen[b])
                for a in range(d)
                for b in range(d)
                if len(out[slots[a]]) < len(out[slots[b]])
            )
            key = tuple(tuple(c) for c in chosen)
            if not ok or key in tried:
                continue
            tried.add(key)
            nxt = [list(x) for x in out]
            for slot, piece in zip(slots, chosen):
                nxt[slot].extend(piece)
            yield from rec(i + 1, nxt)

    yield from rec(0, [[] for _ in range(d)])


def theorem56_witness(d: int, k: int, spec: PartitionSpec) -> list[ElementSet]:
    """d members of G_r with empty intersection and union size s + 1.

    Follows the two-case construction: when sum((d-1) y_i) >= dk the part
    fills already total dk; otherwise every part element is used d - 1 times
    and the deficit is made up with elements outside the chosen subparts,
    trimming the overshoot from the largest sets.
    """
    n = spec.n
    spec.check_for(k)
    if d < 2:
        raise ArgumentError(f"need d >= 2, got d={d}")
    family = g_r(n, k, spec)
    if is_d_wise_t_intersecting(family, d, 1):
        raise CapabilityError(f"G_r is {d}-wise intersecting; no witness exists")

    xs = list(spec.thresholds)
    ys = [_ceil_div(d * x, d - 1) for x in xs]
    parts = [elements_of(p.bits) for p in spec.parts]
    if any(len(p) < y for p, y in zip(parts, ys)):
        raise RuntimeError("a part is smaller than its required subpart")
    subparts = [p[:y] for p, y in zip(parts, ys)]
    caps = [(d - 1) * y for y in ys]
    s = theorem56_s(d, k, spec)

    if sum(caps) >= d * k:
        # case I: split dk across the parts, each as large as the rest allows
        amounts, remaining = [], d * k
        for i, x in enumerate(xs):
            floor_rest = sum(d * xl for xl in xs[i + 1:])
            a = min(caps[i], remaining - floor_rest)
            if a < d * x:
                raise RuntimeError("no valid split of dk over the parts")
            amounts.append(a)
            remaining -= a
        if remaining:
            raise RuntimeError("split of dk over the parts did not close")
        extra: list[int] = []
    else:
        amounts = caps
        extra = [e for e in range(1, n + 1) if all(e not in sp for sp in subparts)]

    blocks = [_fill_part(sp, d, a, x) for sp, a, x in zip(subparts, amounts, xs)]
    for sets in _merge_parts(d, blocks):
        if extra:
            sets = _pad_outside(sets, extra, d, k)
        out = [ElementSet.of(a, n) for a in sets]
        # the construction fixes sizes and intersections but not distinctness
        if len({a.bits for a in out}) == d:
            _check_witness(out, family, s)
            return out
    raise CapabilityError(
        f"every admissible relabeling repeats a set (d={d}, k={k}); no distinct witness from this construction"
    )


def _pad_outside(sets: list[list[int]], extra: Sequence[int], d: int, k: int) -> list[list[int]]:
    """Case II: top the sets up to total dk with elements outside the subparts."""
    sets = [list(a) for a in sets]
    total = sum(len(a) for a in sets)
    last = None
    pool = iter(extra)
    while total < d * k:
        last = next(pool, None)
        if last is None:
            raise RuntimeError("ran out of outside elements")
        for j in sorted(range(d), key=lambda j: (len(sets[j]), j))[: d - 1]:
            sets[j].append(last)
        total += d - 1
    while total > d * k:
        holders = [j for j in range(d) if last in sets[j]]
        j = max(holders, key=lambda j: (len(sets[j]), -j))
        sets[j].remove(last)
        total -= 1
    return sets


def _check_witness(sets: Sequence[ElementSet], family: SetFamily, s: int) -> None:
    masks = [a.bits for a in sets]
    union, inter = 0, (1 << family.n) - 1
    for m in masks:
        union |= m
        inter &= m
    ok = (
        len(set(masks)) == len(masks)
        and all(m in family for m in masks)
        and inter == 0
        and union.bit_count() == s + 1
    )
    if not ok:
        raise RuntimeError(f"witness construction failed: {[str(a) for a in sets]}")


# ---------------------------------------------------------------------------
# size bounds for (2, s)-conditionally intersecting subfamilies of 2^[n]


def _k_for(s: int) -> int:
    return s // 2 if s % 2 == 0 else (s + 1) // 2


def theorem62_bound(n: int, s: int) -> int:
    """Maximum size of a (2, s)-CI subfamily of the power set of [n]."""
    if not 1 <= s <= n:
        raise ArgumentError(f"need 1 <= s <= n, got s={s}, n={n}")
    k = _k_for(s)
    if s % 2 == 0:
        return binom(n - 1, k - 1) + sum(binom(n, i) for i in range(k + 1, n + 1))
    return sum(binom(n, i) for i in range(k, n + 1))


def theorem71_bound(n: int, s: int, u: int, case: str) -> int:
    """Maximum size of a (2, s)-CI family of sets with at most u elements.

    ``case`` is ``"i"`` (u >= s - 1, s even), ``"ii"`` (u >= s - 1, s odd)
    or ``"iii"`` (u <= floor(s / 2)).
    """
    if not 1 <= s <= n:
        raise ArgumentError(f"need 1 <= s <= n, got s={s}, n={n}")
    if not 0 <= u <= n:
        raise ArgumentError(f"need 0 <= u <= n, got u={u}")
    if case == "i":
        if s % 2 or u < s - 1:
            raise ArgumentError(f"case i needs even s and u >= s - 1 (s={s}, u={u})")
        k = s // 2
        return binom(n - 1, k - 1) + sum(binom(n, i) for i in range(k + 1, u + 1))
    if case == "ii":
        if s % 2 == 0 or u < s - 1:
            raise ArgumentError(f"case ii needs odd s and u >= s - 1 (s={s}, u={u})")
        k = (s + 1) // 2
        return sum(binom(n, i) for i in range(k, u + 1))
    if case == "iii":
        if u > s // 2:
            raise ArgumentError(f"case iii needs u <= floor(s/2) (s={s}, u={u})")
        return sum(binom(n - 1, r - 1) for r in range(1, u + 1))
    raise ArgumentError(f"unknown case {case!r}; expected i, ii or iii")


def theorem71_case(s: int, u: int) -> str:
    if u >= s - 1:
        return "i" if s % 2 == 0 else "ii"
    if u <= s // 2:
        return "iii"
    raise ArgumentError(f"u={u} is in neither regime u >= s - 1 nor u <= s // 2 for s={s}")


def theorem74_bound(n: int, s: int, u: int) -> int:
    """Bound for the intermediate regime s/2 < u < s - 1."""
    if not 1 <= s <= n:
        raise ArgumentError(f"need 1 <= s <= n, got s={s}, n={n}")
    if not (2 * u > s and u < s - 1):
        raise ArgumentError(f"need s/2 < u < s - 1, got s={s}, u={u}")
    if s % 2 == 0:
        k = s // 2
        return binom(n - 1, k - 1) + sum(binom(n, i) for i in range(k + 1, u + 1))
    k = (s + 1) // 2
    return sum(binom(n, i) for i in range(k, u + 1))


# ---------------------------------------------------------------------------
# shadow bound for t-intersecting uniform families


class KatonaCheck(NamedTuple):
    holds: bool
    lhs: int
    rhs: Fraction
    equality: bool


def katona_bound_check(family: SetFamily, t: int, ell: int) -> KatonaCheck:
    """Compare |shadow_ell(F)| against C(2k-t, ell) / C(2k-t, k) * |F|."""
    sizes = {m.bit_count() for m in family.masks}
    if len(sizes) > 1:
        raise ArgumentError("family must be uniform")
    if t < 1:
        raise ArgumentError(f"t must be >= 1, got {t}")
    if not family.masks:
        raise ArgumentError("family must be nonempty to fix the member size")
    (k,) = sizes
    if not 0 <= k - t <= ell <= k:
        raise ArgumentError(f"need 0 <= k - t <= ell <= k (k={k}, t={t}, ell={ell})")
    for a, b in itertools.combinations(family.masks, 2):
        if (a & b).bit_count() < t:
            raise ArgumentError(f"family is not {t}-intersecting")
    lhs = len(shadow(family, ell))
    rhs = Fraction(binom(2 * k - t, ell), binom(2 * k - t, k)) * len(family)
    return KatonaCheck(lhs >= rhs, lhs, rhs, lhs == rhs)


def katona_equality_expected(family: SetFamily, t: int, ell: int) -> bool:
    """When the shadow bound is tight.

    Always at ell = k (the shadow is the family itself); below that, exactly
    when F is every k-subset of a (2k - t)-set.
    """
    (k,) = {m.bit_count() for m in family.masks}
    if ell == k:
        return True
    support = 0
    for m in family.masks:
        support |= m
    return support.bit_count() == 2 * k - t and len(family) == binom(2 * k - t, k)
