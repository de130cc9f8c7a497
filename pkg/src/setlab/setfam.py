"""Finite set families over a ground set [n], stored as bitmasks.

Element ``e`` of [n] lives in bit ``e - 1``.  Families keep their members
deduplicated and sorted by (cardinality, mask), so iteration and every
derived output is deterministic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from setlab.errors import ArgumentError, CapabilityError, FormatError

MAX_N = 64
CANONICAL_LIMIT = 8


def popcount(mask: int) -> int:
    return mask.bit_count()


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << (e - 1)
    return mask


def elements_of(mask: int) -> list[int]:
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return out


def member_key(mask: int) -> tuple[int, int]:
    return (mask.bit_count(), mask)


def _check_n(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= MAX_N:
        raise ArgumentError(f"ground set size must be an integer in 1..{MAX_N}, got {n!r}")


@dataclass(frozen=True, slots=True)
class ElementSet:
    """One subset of [n]."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        _check_n(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise ArgumentError(f"mask {self.bits:#x} has elements outside 1..{self.n}")

    @classmethod
    def of(cls, elements: Iterable[int], n: int) -> ElementSet:
        elements = list(elements)
        for e in elements:
            if not isinstance(e, int) or not 1 <= e <= n:
                raise ArgumentError(f"element {e!r} outside 1..{n}")
        return cls(mask_of(elements), n)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(elements_of(self.bits))

    def __contains__(self, e: object) -> bool:
        return isinstance(e, int) and 1 <= e <= self.n and bool(self.bits >> (e - 1) & 1)

    def __lt__(self, other: ElementSet) -> bool:
        return member_key(self.bits) < member_key(other.bits)

    def complement(self) -> ElementSet:
        return ElementSet(((1 << self.n) - 1) & ~self.bits, self.n)

    def __str__(self) -> str:
        return ",".join(map(str, self)) or "-"

    def __repr__(self) -> str:
        return f"ElementSet({{{', '.join(map(str, self))}}}, n={self.n})"


@dataclass(frozen=True)
class ShiftPair:
    """The index pair (i, j) of the shift that swaps j out for i."""

    i: int
    j: int

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ArgumentError(f"shift pair needs distinct elements, got ({self.i},{self.j})")
        if self.i < 1 or self.j < 1:
            raise ArgumentError(f"shift pair elements must be positive, got ({self.i},{self.j})")

    def reversed(self) -> ShiftPair:
        return ShiftPair(self.j, self.i)

    def check(self, n: int) -> None:
        if self.i > n or self.j > n:
            raise ArgumentError(f"shift pair ({self.i},{self.j}) outside ground set 1..{n}")

    def __str__(self) -> str:
        return f"({self.i},{self.j})"


@dataclass(frozen=True, init=False)
class SetFamily:
    """A finite family of distinct subsets of [n] in canonical order.

    Members are held as a tuple of integer masks sorted by
    (cardinality, mask).  Duplicates passed to the constructor collapse.
    """

    n: int
    masks: tuple[int, ...]

    def __init__(self, n: int, masks: Iterable[int] = ()):
        _check_n(n)
        masks = set(masks)
        for m in masks:
            if not isinstance(m, int) or m < 0 or m >> n:
                raise ArgumentError(f"mask {m!r} is not a subset of 1..{n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "masks", tuple(sorted(masks, key=member_key)))

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]]) -> SetFamily:
        """Build from explicit element lists, e.g. ``SetFamily.of(5, [[1, 3], [2, 4]])``."""
        return cls(n, (ElementSet.of(s, n).bits for s in sets))

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[ElementSet]) -> SetFamily:
        masks = []
        for a in sets:
            if a.n != n:
                raise ArgumentError(f"member over ground set {a.n} in a family over {n}")
            masks.append(a.bits)
        return cls(n, masks)

    @property
    def members(self) -> tuple[ElementSet, ...]:
        return tuple(ElementSet(m, self.n) for m in self.masks)

    def __iter__(self) -> Iterator[ElementSet]:
        return (ElementSet(m, self.n) for m in self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def __contains__(self, a: object) -> bool:
        if isinstance(a, ElementSet):
            return a.n == self.n and a.bits in self._mask_set
        if isinstance(a, int):
            return a in self._mask_set
        return False

    @property
    def _mask_set(self) -> frozenset[int]:
        cached = self.__dict__.get("_masks_frozen")
        if cached is None:
            cached = frozenset(self.masks)
            object.__setattr__(self, "_masks_frozen", cached)
        return cached

    def as_lists(self) -> list[list[int]]:
        return [elements_of(m) for m in self.masks]

    def __repr__(self) -> str:
        body = ", ".join("{" + ",".join(map(str, elements_of(m))) + "}" for m in self.masks)
        return f"SetFamily(n={self.n}, [{body}])"


# ---------------------------------------------------------------------------
# standard pools


def uniform_family(n: int, k: int) -> SetFamily:
    """All k-subsets of [n]."""
    _check_n(n)
    if not 0 <= k <= n:
        raise ArgumentError(f"size {k} outside 0..{n}")
    return SetFamily(n, (mask_of(c) for c in itertools.combinations(range(1, n + 1), k)))


def layered_family(n: int, sizes: Iterable[int]) -> SetFamily:
    _check_n(n)
    masks: list[int] = []
    for k in sizes:
        masks.extend(uniform_family(n, k).masks)
    return SetFamily(n, masks)


def power_family(n: int) -> SetFamily:
    return layered_family(n, range(n + 1))


def bounded_family(n: int, u: int) -> SetFamily:
    """All subsets of [n] with at most u elements, the empty set included."""
    if not 0 <= u <= n:
        raise ArgumentError(f"member size bound {u} outside 0..{n}")
    return layered_family(n, range(u + 1))


# ---------------------------------------------------------------------------
# set algebra


def _shared_n(sets: Sequence[ElementSet]) -> int:
    if not sets:
        raise ArgumentError("need at least one set")
    n = sets[0].n
    if any(a.n != n for a in sets):
        raise ArgumentError("sets are over different ground sets")
    return n


def union_size(sets: Sequence[ElementSet]) -> int:
    _shared_n(sets)
    u = 0
    for a in sets:
        u |= a.bits
    return u.bit_count()


def intersection_size(sets: Sequence[ElementSet]) -> int:
    n = _shared_n(sets)
    x = (1 << n) - 1
    for a in sets:
        x &= a.bits
    return x.bit_count()


def shift_mask(mask: int, ibit: int, jbit: int, present: frozenset[int] | set[int]) -> int:
    """Mask-level shift: ``ibit``/``jbit`` are single-bit masks."""
    if mask & jbit and not mask & ibit:
        moved = (mask & ~jbit) | ibit
        if moved not in present:
            return moved
    return mask


def shift_set(a: ElementSet, family: SetFamily, p: ShiftPair) -> ElementSet:
    """Image of member ``a`` under the (i, j)-shift taken relative to ``family``."""
    if a.n != family.n or a.bits not in family:
        raise ArgumentError(f"{a} is not a member of the family")
    p.check(family.n)
    return ElementSet(shift_mask(a.bits, 1 << (p.i - 1), 1 << (p.j - 1), family._mask_set), a.n)


def shift_masks(family: SetFamily, p: ShiftPair) -> list[int]:
    """Shifted image of each member, aligned with ``family.masks``."""
    p.check(family.n)
    ibit, jbit = 1 << (p.i - 1), 1 << (p.j - 1)
    present = family._mask_set
    return [shift_mask(m, ibit, jbit, present) for m in family.masks]


def shift_family(family: SetFamily, p: ShiftPair) -> SetFamily:
    return SetFamily(family.n, shift_masks(family, p))


def is_stable(family: SetFamily) -> bool:
    present = family._mask_set
    for m in family.masks:
        for jb in range(1, family.n):
            jbit = 1 << jb
            if not m & jbit:
                continue
            for ib in range(jb):
                ibit = 1 << ib
                if not m & ibit and ((m & ~jbit) | ibit) not in present:
                    return False
    return True


def stabilize(family: SetFamily) -> tuple[SetFamily, list[ShiftPair]]:
    """Shift with i < j in lexicographic sweeps until a sweep changes nothing.

    Returns the stable family and the pairs whose shift changed the family,
    in application order.  Termination: each effective shift lowers the
    total element sum of the members.
    """
    applied: list[ShiftPair] = []
    current = family
    changed = True
    while changed:
        changed = False
        for i in range(1, family.n + 1):
            for j in range(i + 1, family.n + 1):
                p = ShiftPair(i, j)
                nxt = shift_family(current, p)
                if nxt != current:
                    applied.append(p)
                    current = nxt
                    changed = True
    return current, applied


def slice_by_size(family: SetFamily, r: int) -> SetFamily:
    if not 0 <= r <= family.n:
        raise ArgumentError(f"size {r} outside 0..{family.n}")
    return SetFamily(family.n, (m for m in family.masks if m.bit_count() == r))


def complement_family(family: SetFamily) -> SetFamily:
    full = (1 << family.n) - 1
    return SetFamily(family.n, (full & ~m for m in family.masks))


def shadow(family: SetFamily, ell: int) -> SetFamily:
    """All ell-subsets of [n] lying inside some member.

    Members smaller than ell contribute nothing, so mixed-size families get
    the union of their members' shadows.
    """
    if not 0 <= ell <= family.n:
        raise ArgumentError(f"shadow level {ell} outside 0..{family.n}")
    out: set[int] = set()
    for m in family.masks:
        if m.bit_count() < ell:
            continue
        if m.bit_count() == ell:
            out.add(m)
            continue
        bits = [1 << b for b in range(family.n) if m >> b & 1]
        for combo in itertools.combinations(bits, ell):
            out.add(sum(combo))
    return SetFamily(family.n, out)


# ---------------------------------------------------------------------------
# relabeling and canonical forms


def relabel(family: SetFamily, perm: Sequence[int]) -> SetFamily:
    """Apply the permutation sending element e to ``perm[e - 1]``."""
    n = family.n
    if sorted(perm) != list(range(1, n + 1)):
        raise ArgumentError(f"{list(perm)} is not a permutation of 1..{n}")
    out = []
    for m in family.masks:
        r = 0
        for b in range(n):
            if m >> b & 1:
                r |= 1 << (perm[b] - 1)
        out.append(r)
    return SetFamily(n, out)


_PERM_CHUNK = 40320


def _perm_chunks(n: int) -> Iterator[np.ndarray]:
    it = itertools.permutations(range(n))
    while True:
        block = list(itertools.islice(it, _PERM_CHUNK))
        if not block:
            return
        yield np.asarray(block, dtype=np.int64)


def canonical_form(family: SetFamily, limit: int = CANONICAL_LIMIT) -> SetFamily:
    """Lexicographically least relabeling of ``family`` over all of Sym([n]).

    Families are compared by their member masks in canonical order.  Two
    families are isomorphic iff their canonical forms are equal.  The search
    is exhaustive, hence the ``limit`` on n.
    """
    n = family.n
    if n > limit:
        raise CapabilityError(
            f"canonical form needs n <= {limit} (got n={n}); use invariant_hash for a partial check"
        )
    if not family.masks:
        return family
    masks = np.asarray(family.masks, dtype=np.uint64)
    sizes = [m.bit_count() for m in family.masks]
    groups = [np.flatnonzero(np.asarray(sizes) == s) for s in sorted(set(sizes))]
    best: tuple[int, ...] | None = None
    for perms in _perm_chunks(n):
        img = np.zeros((len(perms), len(masks)), dtype=np.uint64)
        for b in range(n):
            bit = (masks >> np.uint64(b)) & np.uint64(1)
            img |= bit[None, :] << perms[:, b].astype(np.uint64)[:, None]
        keyed = np.concatenate([np.sort(img[:, g], axis=1) for g in groups], axis=1)
        row = np.lexsort(keyed.T[::-1])[0]
        cand = tuple(int(v) for v in keyed[row])
        if best is None or cand < best:
            best = cand
    return SetFamily(n, best)


def is_isomorphic(f: SetFamily, g: SetFamily, limit: int = CANONICAL_LIMIT) -> bool:
    if f.n != g.n or len(f) != len(g):
        return False
    return canonical_form(f, limit) == canonical_form(g, limit)


def invariant_hash(family: SetFamily) -> int:
    """Relabeling-invariant fingerprint.

    Equal canonical forms imply equal hashes; the converse can fail.
    """
    n = family.n
    degree = sorted(sum(1 for m in family.masks if m >> b & 1) for b in range(n))
    sizes = sorted(m.bit_count() for m in family.masks)
    inter = sorted(
        (a & b).bit_count() for a, b in itertools.combinations(family.masks, 2)
    )
    return hash((n, tuple(sizes), tuple(degree), tuple(inter)))


# ---------------------------------------------------------------------------
# family text format


def format_family(family: SetFamily) -> str:
    lines = [f"n={family.n}"]
    for m in family.masks:
        lines.append(",".join(map(str, elements_of(m))) or "-")
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> SetFamily:
    """Parse the line-oriented family format.

    ``n=<int>`` header, then one member per line as ascending comma
    separated elements, ``-`` for the empty set, ``#`` comment lines.
    """
    n: int | None = None
    masks: list[int] = []
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            if not line.startswith("n="):
                raise FormatError("expected header 'n=<integer>'", lineno)
            try:
                n = int(line[2:])
            except ValueError:
                raise FormatError(f"bad ground set size {line[2:]!r}", lineno) from None
            if not 1 <= n <= MAX_N:
                raise FormatError(f"ground set size {n} outside 1..{MAX_N}", lineno)
            continue
        if line == "-":
            mask = 0
        else:
            elems = []
            for tok in line.split(","):
                tok = tok.strip()
                if not tok.isdigit():
                    raise FormatError(f"bad element {tok!r}", lineno)
                e = int(tok)
                if not 1 <= e <= n:
                    raise FormatError(f"element {e} outside 1..{n}", lineno)
                if elems and e <= elems[-1]:
                    raise FormatError("elements must be strictly ascending", lineno)
                elems.append(e)
            mask = mask_of(elems)
        if mask in seen:
            raise FormatError(f"duplicate member (first on line {seen[mask]})", lineno)
        seen[mask] = lineno
        masks.append(mask)
    if n is None:
        raise FormatError("missing header 'n=<integer>'")
    return SetFamily(n, masks)


def binom(n: int, k: int) -> int:
    """Binomial coefficient that is zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)
