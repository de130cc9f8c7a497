"""Search reports: exact optimum, extremal families up to isomorphism, verdict."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

from setlab.errors import CapabilityError
from setlab.predicates import is_conditionally_intersecting, is_intersecting
from setlab.search.conflicts import ConflictStructure
from setlab.search.solver import (
    MAX_OPTIMA,
    SearchConstraints,
    read_checkpoint,
    restore,
    solve,
)
from setlab.setfam import CANONICAL_LIMIT, SetFamily, canonical_form, format_family, is_stable


@dataclass(frozen=True)
class SearchReport:
    params: dict
    optimum: int
    extremal: tuple[SetFamily, ...]
    nodes: int
    wall_ms: float
    verdict: dict = field(default_factory=dict)
    # labeled optima as found (symmetry-reduced); not serialized
    labeled: tuple[SetFamily, ...] = field(default=(), compare=False, repr=False)

    @property
    def extremal_truncated(self) -> bool:
        return bool(self.verdict.get("extremal_truncated"))

    def to_json_obj(self, include_wall: bool = True) -> dict:
        obj = {
            "params": self.params,
            "optimum": self.optimum,
            "extremal": [fam.as_lists() for fam in self.extremal],
            "nodes": self.nodes,
            "wall_ms": round(self.wall_ms, 3),
            "verdict": self.verdict,
        }
        if not include_wall:
            del obj["wall_ms"]
        return obj

    def to_json(self, include_wall: bool = True) -> str:
        return dump_fields(self.to_json_obj(include_wall))

    def to_text(self) -> str:
        p = self.params
        head = " ".join(f"{k}={v}" for k, v in p.items() if not isinstance(v, dict))
        lines = [f"instance: {head}"]
        cons = p.get("constraints") or {}
        on = [k for k, v in cons.items() if v not in (None, False)]
        if on:
            lines.append("constraints: " + ", ".join(f"{k}={cons[k]}" for k in on))
        v = self.verdict
        lines.append(f"optimum: {self.optimum}")
        lines.append(
            f"optima found: {v.get('optima_found')}"
            + ("  (extremal list truncated)" if v.get("extremal_truncated") else "")
        )
        lines.append(f"extremal orbits: {len(self.extremal)}")
        for idx, fam in enumerate(self.extremal, 1):
            body = format_family(fam).splitlines()[1:]
            lines.append(f"  [{idx}] " + " ".join("{" + b + "}" for b in body))
        lines.append(f"nodes: {self.nodes}")
        lines.append(f"status: {v.get('status')}")
        if "bound" in v:
            lines.append(f"bound: {v['bound']} ({v.get('bound_source')})")
        if v.get("detail"):
            lines.append(f"detail: {v['detail']}")
        return "\n".join(lines) + "\n"

    def comparable(self) -> str:
        """Serialization with the run-dependent fields removed."""
        obj = self.to_json_obj(include_wall=False)
        del obj["nodes"]
        return json.dumps(obj, sort_keys=True)


def dump_fields(obj: dict, indent: str = "") -> str:
    """JSON object with one top-level field per line and compact values."""
    rows = [f'{indent}  {json.dumps(k)}: {json.dumps(v)}' for k, v in obj.items()]
    return indent + "{\n" + ",\n".join(rows) + "\n" + indent + "}"


def _family_key(fam: SetFamily) -> tuple:
    return (len(fam), fam.masks)


def _recheck(fam: SetFamily, structure: ConflictStructure, constraints: SearchConstraints, labeled: bool) -> None:
    if not is_conditionally_intersecting(fam, structure.params):
        raise RuntimeError(f"search returned a family violating {structure.params}")
    if constraints.require_nonintersecting and len(fam) and is_intersecting(fam):
        raise RuntimeError("search returned an intersecting family under the non-intersecting constraint")
    if constraints.require_nonintersecting and not len(fam):
        raise RuntimeError("search returned the empty family under the non-intersecting constraint")
    u = constraints.max_member_size
    if u is not None and any(m.bit_count() > u for m in fam.masks):
        raise RuntimeError(f"search returned a member larger than {u}")
    # stability is not invariant under relabeling, so only labeled solutions carry it
    if labeled and constraints.require_stable and not is_stable(fam):
        raise RuntimeError("search returned a family that is not stable")


def base_params(structure: ConflictStructure, constraints: SearchConstraints) -> dict:
    p = structure.params
    return {
        "n": structure.n,
        "pool": structure.pool,
        "d": p.d,
        "s": p.s,
        "t": p.t,
        "constraints": constraints.as_dict(),
    }


def build_report(
    structure: ConflictStructure,
    constraints: SearchConstraints,
    tally,
    nodes: int,
    wall_ms: float,
    canonical_limit: int = CANONICAL_LIMIT,
    params: dict | None = None,
) -> SearchReport:
    feasible = tally.count > 0
    labeled = [structure.family(_indices(x)) for x in tally.solutions()] if feasible else []
    canon: dict[tuple, SetFamily] = {}
    for fam in labeled:
        _recheck(fam, structure, constraints, labeled=True)
        c = canonical_form(fam, canonical_limit)
        canon[_family_key(c)] = c
    extremal = tuple(canon[k] for k in sorted(canon))
    for fam in extremal:
        _recheck(fam, structure, constraints, labeled=False)
    verdict = {
        "status": "SOLVED" if feasible else "INFEASIBLE",
        "optima_found": tally.count,
        "extremal_truncated": tally.count > len(labeled),
    }
    return SearchReport(
        params=params if params is not None else base_params(structure, constraints),
        optimum=tally.best if feasible else 0,
        extremal=extremal,
        nodes=nodes,
        wall_ms=wall_ms,
        verdict=verdict,
        labeled=tuple(labeled),
    )


def _indices(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def max_family(
    structure: ConflictStructure,
    constraints: SearchConstraints | None = None,
    *,
    threads: int = 1,
    use_symmetry: bool = True,
    max_optima: int = MAX_OPTIMA,
    canonical_limit: int = CANONICAL_LIMIT,
    checkpoint: str | os.PathLike | None = None,
    checkpoint_every: int | None = None,
    stop_after_nodes: int | None = None,
) -> SearchReport:
    """Largest families in the pool that respect the condition and constraints.

    Every optimal labeled solution is enumerated (up to ``max_optima`` kept,
    the smallest by vertex bitmask) and reduced to canonical forms.  The
    result does not depend on ``threads``.
    """
    constraints = constraints or SearchConstraints()
    if structure.n > canonical_limit:
        raise CapabilityError(
            f"extremal families need canonical forms, limited to n <= {canonical_limit}"
        )
    tally, nodes, ms = solve(
        structure,
        constraints,
        threads=threads,
        use_symmetry=use_symmetry,
        max_optima=max_optima,
        checkpoint=checkpoint,
        checkpoint_every=checkpoint_every,
        stop_after_nodes=stop_after_nodes,
    )
    return build_report(structure, constraints, tally, nodes, ms, canonical_limit)


def resume_search(path: str | os.PathLike, canonical_limit: int = CANONICAL_LIMIT, **kw) -> SearchReport:
    """Continue a checkpointed search to completion."""
    state = read_checkpoint(path)
    structure, constraints, options, *_ = restore(state)
    tally, nodes, ms = solve(
        structure,
        constraints,
        use_symmetry=options["use_symmetry"],
        max_optima=options["max_optima"],
        resume_state=state,
        checkpoint=kw.get("checkpoint"),
        checkpoint_every=kw.get("checkpoint_every"),
        stop_after_nodes=kw.get("stop_after_nodes"),
    )
    return build_report(structure, constraints, tally, nodes, ms, canonical_limit)


def with_verdict(report: SearchReport, params: dict, verdict: dict) -> SearchReport:
    merged = dict(verdict)
    merged["optima_found"] = report.verdict["optima_found"]
    merged["extremal_truncated"] = report.verdict["extremal_truncated"]
    return replace(report, params=params, verdict=merged)
