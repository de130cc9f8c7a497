"""The involution pairing (i, j)-unstable and (j, i)-unstable d-subsets.

Given an (i, j)-unstable subfamily A of F that has a member avoiding both
i and j, the members containing i (but not j) that the reverse shift
leaves fixed are swapped over to contain j instead.  The result B is
(j, i)-unstable, and applying the same map to B with the pair reversed
recovers A.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from setlab.errors import ArgumentError, CapabilityError
from setlab.predicates import (
    ConditionParams,
    UnstablePartition,
    check_unstable_characterization,
    partition_unstable_family,
)
from setlab.setfam import ElementSet, SetFamily, ShiftPair, member_key, shift_mask


@dataclass(frozen=True)
class DualityTrace:
    """Every intermediate set of one forward application.

    ``fixed`` are the has-i members the reverse shift leaves in place and
    ``swapped`` their images with i replaced by j.  ``reverse_fixed`` and
    ``reverse_swapped`` are the same two sets computed back from
    ``output``; for a correct map they equal ``swapped`` and ``fixed``.
    """

    input: tuple[ElementSet, ...]
    pair: ShiftPair
    partition: UnstablePartition
    fixed: tuple[ElementSet, ...]
    swapped: tuple[ElementSet, ...]
    output: tuple[ElementSet, ...]
    reverse_fixed: tuple[ElementSet, ...]
    reverse_swapped: tuple[ElementSet, ...]
    output_partition: UnstablePartition


def _sets(masks, n: int) -> tuple[ElementSet, ...]:
    return tuple(ElementSet(m, n) for m in sorted(set(masks), key=member_key))


def _swap(mask: int, out_bit: int, in_bit: int) -> int:
    return (mask & ~out_bit) | in_bit


def duality_forward(
    subfamily: Sequence[ElementSet],
    family: SetFamily,
    pair: ShiftPair,
    params: ConditionParams,
) -> DualityTrace:
    """Map an (i, j)-unstable d-subset of ``family`` to its (j, i)-unstable partner.

    Raises ``CapabilityError`` when no member avoids both i and j, and
    ``ArgumentError`` when ``subfamily`` is not (i, j)-unstable.
    """
    n = family.n
    part = partition_unstable_family(subfamily, family, pair, params)
    if not part.has_neither:
        raise CapabilityError(
            f"subfamily has no member avoiding both {pair.i} and {pair.j}; the involution needs one"
        )
    present = family._mask_set
    ibit, jbit = 1 << (pair.i - 1), 1 << (pair.j - 1)

    fixed = [a.bits for a in part.has_i if shift_mask(a.bits, jbit, ibit, present) == a.bits]
    swapped = [_swap(m, ibit, jbit) for m in fixed]
    kept = [a.bits for a in part.has_i if a.bits not in fixed]
    out = [a.bits for a in part.moved] + [a.bits for a in part.has_neither] + kept + swapped

    rev = pair.reversed()
    if len(set(out)) != len(subfamily) or any(m not in present for m in out):
        raise RuntimeError("mapped subfamily left the family or lost members")
    out_sets = _sets(out, n)
    if not check_unstable_characterization(out_sets, family, rev, params):
        raise RuntimeError(f"mapped subfamily is not {rev}-unstable")
    if len(fixed) == len(part.has_i):
        raise RuntimeError("every has-i member was fixed by the reverse shift")

    out_part = partition_unstable_family(out_sets, family, rev, params)
    # out_part.has_i holds members with j but not i: the reverse has-i class
    reverse_fixed = [
        b.bits for b in out_part.has_i if shift_mask(b.bits, ibit, jbit, present) == b.bits
    ]
    reverse_swapped = [_swap(m, jbit, ibit) for m in reverse_fixed]

    return DualityTrace(
        input=_sets((a.bits for a in subfamily), n),
        pair=pair,
        partition=part,
        fixed=_sets(fixed, n),
        swapped=_sets(swapped, n),
        output=out_sets,
        reverse_fixed=_sets(reverse_fixed, n),
        reverse_swapped=_sets(reverse_swapped, n),
        output_partition=out_part,
    )


def duality_inverse(
    trace_or_output: DualityTrace | Sequence[ElementSet],
    family: SetFamily,
    pair: ShiftPair,
    params: ConditionParams,
) -> tuple[ElementSet, ...]:
    """Recover the (i, j)-unstable subfamily from its (j, i)-unstable partner.

    ``pair`` is the original (i, j); the inverse is the forward map run with
    the pair reversed.
    """
    if isinstance(trace_or_output, DualityTrace):
        if trace_or_output.pair != pair:
            raise ArgumentError(f"trace was built for {trace_or_output.pair}, not {pair}")
        b = trace_or_output.output
    else:
        b = tuple(trace_or_output)
    return duality_forward(b, family, pair.reversed(), params).output
