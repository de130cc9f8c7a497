"""Conditional intersection predicates, cluster witnesses and shift instability.

A family is (d, s, t)-conditionally intersecting when every d distinct
members whose union has at most s elements share at least t elements.
Families with fewer than d members satisfy every condition vacuously.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from setlab.errors import ArgumentError
from setlab.setfam import ElementSet, SetFamily, ShiftPair, shift_mask, shift_masks


@dataclass(frozen=True)
class ConditionParams:
    d: int
    s: int
    t: int = 1

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ArgumentError(f"d must be >= 2, got {self.d}")
        if self.s < 0:
            raise ArgumentError(f"s must be >= 0, got {self.s}")
        if self.t < 1:
            raise ArgumentError(f"t must be >= 1, got {self.t}")

    def __str__(self) -> str:
        return f"(d={self.d}, s={self.s}, t={self.t})"


@dataclass(frozen=True)
class ClusterWitness:
    """d members with union size <= s and intersection size <= t - 1."""

    sets: tuple[ElementSet, ...]
    union_size: int
    intersection_size: int


@dataclass(frozen=True)
class UnstableWitness:
    """d members that meet the condition while their shifted images do not."""

    subfamily: tuple[ElementSet, ...]
    pair: ShiftPair
    params: ConditionParams


def _violating_tuples(
    masks: Sequence[int], d: int, s: int, t: int, full: int
) -> Iterator[tuple[int, ...]]:
    """Index tuples (ascending, lexicographic order) of violating d-subsets.

    Branches are cut as soon as the running union exceeds ``s``.
    """
    m = len(masks)
    if m < d:
        return
    idx = [0] * d

    def rec(depth: int, start: int, union: int, inter: int) -> Iterator[tuple[int, ...]]:
        last = m - (d - depth)
        for a in range(start, last + 1):
            u = union | masks[a]
            if u.bit_count() > s:
                continue
            x = inter & masks[a]
            idx[depth] = a
            if depth == d - 1:
                if x.bit_count() < t:
                    yield tuple(idx)
            else:
                yield from rec(depth + 1, a + 1, u, x)

    yield from rec(0, 0, 0, full)


def violating_mask_tuples(masks: Sequence[int], n: int, params: ConditionParams) -> Iterator[tuple[int, ...]]:
    return _violating_tuples(masks, params.d, params.s, params.t, (1 << n) - 1)


def find_violating_cluster(family: SetFamily, params: ConditionParams) -> ClusterWitness | None:
    """First violating d-subset in canonical member order, or None."""
    masks = family.masks
    for tup in violating_mask_tuples(masks, family.n, params):
        return _cluster(family.n, [masks[a] for a in tup])
    return None


def _cluster(n: int, chosen: Sequence[int]) -> ClusterWitness:
    union, inter = 0, (1 << n) - 1
    for m in chosen:
        union |= m
        inter &= m
    return ClusterWitness(
        tuple(ElementSet(m, n) for m in chosen), union.bit_count(), inter.bit_count()
    )


def is_conditionally_intersecting(family: SetFamily, params: ConditionParams) -> bool:
    return find_violating_cluster(family, params) is None


def is_d_wise_t_intersecting(family: SetFamily, d: int, t: int = 1) -> bool:
    return is_conditionally_intersecting(family, ConditionParams(d, family.n, t))


def is_intersecting(family: SetFamily) -> bool:
    """Pairwise intersecting."""
    return is_d_wise_t_intersecting(family, 2, 1)


# ---------------------------------------------------------------------------
# instability under a single shift


def _images(family: SetFamily, pair: ShiftPair) -> dict[int, int]:
    return dict(zip(family.masks, shift_masks(family, pair)))


def is_ij_unstable(
    family: SetFamily, pair: ShiftPair, params: ConditionParams
) -> UnstableWitness | None:
    """Witness that shifting by ``pair`` breaks the condition, else None.

    ``family`` must satisfy the condition itself.  The witness is the
    lexicographically first d-subset (canonical member order) whose shifted
    images violate it.
    """
    pair.check(family.n)
    if not is_conditionally_intersecting(family, params):
        raise ArgumentError(f"family is not conditionally intersecting for {params}")
    for sub in iter_unstable_subfamilies(family, pair, params):
        return UnstableWitness(tuple(ElementSet(m, family.n) for m in sub), pair, params)
    return None


def iter_unstable_subfamilies(
    family: SetFamily, pair: ShiftPair, params: ConditionParams
) -> Iterator[tuple[int, ...]]:
    """All d-subsets (as mask tuples) of ``family`` whose images violate the condition.

    For a conditionally intersecting family these are exactly its
    (i, j)-unstable d-subsets.
    """
    images = shift_masks(family, pair)
    for tup in violating_mask_tuples(images, family.n, params):
        yield tuple(family.masks[a] for a in tup)


def _subfamily_masks(subfamily: Sequence[ElementSet], family: SetFamily) -> list[int]:
    masks = []
    for a in subfamily:
        if a.n != family.n or a.bits not in family:
            raise ArgumentError(f"{a} is not a member of the family")
        masks.append(a.bits)
    if len(set(masks)) != len(masks):
        raise ArgumentError("subfamily members must be distinct")
    return masks


def check_unstable_characterization(
    subfamily: Sequence[ElementSet],
    family: SetFamily,
    pair: ShiftPair,
    params: ConditionParams,
) -> bool:
    """Test the intersection/union chains that characterise instability.

    Holds iff |meet(A)| <= |meet(S(A))| <= t - 1 and
    |join(A)| = |join(S(A))| + 1 = s + 1, with S the shift relative to
    ``family``.
    """
    masks = _subfamily_masks(subfamily, family)
    if len(masks) != params.d:
        raise ArgumentError(f"subfamily has {len(masks)} sets, expected d={params.d}")
    pair.check(family.n)
    return _chains_hold(masks, family, pair, params)


def _chains_hold(masks: Sequence[int], family: SetFamily, pair: ShiftPair, params: ConditionParams) -> bool:
    ibit, jbit = 1 << (pair.i - 1), 1 << (pair.j - 1)
    present = family._mask_set
    full = (1 << family.n) - 1
    u = su = 0
    x = sx = full
    for m in masks:
        img = shift_mask(m, ibit, jbit, present)
        u |= m
        x &= m
        su |= img
        sx &= img
    meet, smeet = x.bit_count(), sx.bit_count()
    join, sjoin = u.bit_count(), su.bit_count()
    return meet <= smeet <= params.t - 1 and join == sjoin + 1 == params.s + 1


class UnstablePartition(NamedTuple):
    """Members of an unstable subfamily split by how they sit against (i, j).

    ``moved``: contain j but not i, and the shift moves them.
    ``has_i``: contain i but not j.  ``has_neither``: avoid both.
    """

    moved: tuple[ElementSet, ...]
    has_i: tuple[ElementSet, ...]
    has_neither: tuple[ElementSet, ...]


def split_by_pair(masks: Sequence[int], family: SetFamily, pair: ShiftPair) -> tuple[list[int], list[int], list[int], list[int]]:
    """Mask-level split into (moved, has_i, has_neither, other)."""
    ibit, jbit = 1 << (pair.i - 1), 1 << (pair.j - 1)
    present = family._mask_set
    moved, has_i, neither, other = [], [], [], []
    for m in masks:
        if m & jbit and not m & ibit and ((m & ~jbit) | ibit) not in present:
            moved.append(m)
        elif m & ibit and not m & jbit:
            has_i.append(m)
        elif not m & ibit and not m & jbit:
            neither.append(m)
        else:
            other.append(m)
    return moved, has_i, neither, other


def partition_unstable_family(
    subfamily: Sequence[ElementSet],
    family: SetFamily,
    pair: ShiftPair,
    params: ConditionParams,
) -> UnstablePartition:
    if not check_unstable_characterization(subfamily, family, pair, params):
        raise ArgumentError(f"subfamily is not {pair}-unstable for {params}")
    masks = sorted((a.bits for a in subfamily), key=lambda m: (m.bit_count(), m))
    moved, has_i, neither, other = split_by_pair(masks, family, pair)
    # an unstable subfamily has no member outside the three classes
    assert not other, other
    n = family.n
    return UnstablePartition(
        tuple(ElementSet(m, n) for m in moved),
        tuple(ElementSet(m, n) for m in has_i),
        tuple(ElementSet(m, n) for m in neither),
    )
