"""Conflict (hyper)graphs whose independent sets are the condition-respecting families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from setlab.errors import ArgumentError, CapabilityError
from setlab.predicates import ConditionParams, violating_mask_tuples
from setlab.setfam import ElementSet, SetFamily, binom

DEFAULT_VERTEX_CAP = 200


@dataclass(frozen=True)
class ConflictStructure:
    """Candidate members plus every d-subset of them that violates the condition.

    ``vertices`` are masks in canonical order; ``conflicts`` are ascending
    vertex index tuples in lexicographic order.  ``symmetric`` records that
    the pool is a union of complete size layers, so the whole structure is
    invariant under relabeling the ground set.
    """

    n: int
    vertices: tuple[int, ...]
    params: ConditionParams
    conflicts: tuple[tuple[int, ...], ...]
    symmetric: bool
    pool: dict = field(compare=False, default_factory=dict)

    @property
    def vertex_sets(self) -> list[ElementSet]:
        return [ElementSet(m, self.n) for m in self.vertices]

    def family(self, indices: Iterable[int]) -> SetFamily:
        return SetFamily(self.n, (self.vertices[i] for i in indices))


def describe_pool(family: SetFamily) -> tuple[bool, dict]:
    sizes: dict[int, int] = {}
    for m in family.masks:
        sizes[m.bit_count()] = sizes.get(m.bit_count(), 0) + 1
    full = all(c == binom(family.n, r) for r, c in sizes.items())
    if not full:
        return False, {"kind": "custom", "size": len(family)}
    layers = sorted(sizes)
    return True, {"kind": "layers", "sizes": layers}


def build_conflicts(
    n: int,
    vertex_pool: SetFamily | Iterable[int],
    params: ConditionParams,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    pool_label: dict | None = None,
) -> ConflictStructure:
    """Enumerate every violating d-subset of the pool, pruning on partial union size."""
    pool = vertex_pool if isinstance(vertex_pool, SetFamily) else SetFamily(n, vertex_pool)
    if pool.n != n:
        raise ArgumentError(f"pool is over [{pool.n}], not [{n}]")
    if len(pool) > vertex_cap:
        raise CapabilityError(
            f"pool has {len(pool)} candidate sets, above the vertex cap {vertex_cap}"
        )
    conflicts = tuple(violating_mask_tuples(pool.masks, n, params))
    symmetric, label = describe_pool(pool)
    return ConflictStructure(n, pool.masks, params, conflicts, symmetric, pool_label or label)
