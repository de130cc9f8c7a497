"""Exact branch-and-bound over the independent sets of a conflict structure.

Nodes carry three pieces of state: the chosen vertex set ``S``, the
candidate set ``C`` (undecided vertices that can still join ``S``) and,
for d >= 3, a residual adjacency ``adj``.  ``adj[v]`` holds every vertex w
such that ``S`` already contains d - 2 members of some conflict together
with v and w, so including v forbids w.  For d = 2 the residual graph is
the conflict graph itself.

Pruning keeps every subtree that can still tie the incumbent, so all
optima are enumerated.  The upper bound is a greedy clique cover of the
residual graph on ``C``.
"""

from __future__ import annotations

import heapq
import itertools
import json
import multiprocessing as mp
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from setlab.errors import ArgumentError, FormatError, SetlabError
from setlab.predicates import ConditionParams
from setlab.search.conflicts import ConflictStructure
from setlab.setfam import MAX_N

MAX_OPTIMA = 10_000
CHECKPOINT_HEADER = "setlab-checkpoint/1"
# subtrees handed out after the breadth-first split, and how many of them
# run against one frozen incumbent; both are independent of the thread
# count so that node counts and results are too
FRONTIER_TASKS = 64
WAVE = 16


@dataclass(frozen=True)
class SearchConstraints:
    require_stable: bool = False
    require_nonintersecting: bool = False
    max_member_size: int | None = None

    def check(self, n: int) -> None:
        u = self.max_member_size
        if u is not None and not 0 <= u <= n:
            raise ArgumentError(f"max member size must lie in 0..{n}, got {u}")

    def as_dict(self) -> dict:
        return {
            "require_stable": self.require_stable,
            "require_nonintersecting": self.require_nonintersecting,
            "max_member_size": self.max_member_size,
        }


class SearchInterrupted(SetlabError):
    """Raised when a node budget runs out; the frontier was saved to ``path``."""

    def __init__(self, path: str, nodes: int):
        super().__init__(f"search stopped after {nodes} nodes; resume from {path}")
        self.path = path
        self.nodes = nodes


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class Problem:
    """Immutable per-instance data shared by every node."""

    def __init__(self, structure: ConflictStructure, constraints: SearchConstraints):
        constraints.check(structure.n)
        self.structure = structure
        self.constraints = constraints
        self.n = structure.n
        self.d = structure.params.d
        self.masks = structure.vertices
        nv = len(self.masks)
        self.nv = nv

        # link[K][v]: vertices w with K + {v, w} a conflict, K a (d-2)-subset
        link: dict[int, dict[int, int]] = {}
        hdeg = [0] * nv
        for tup in structure.conflicts:
            tmask = 0
            for a in tup:
                tmask |= 1 << a
                hdeg[a] += 1
            for v, w in itertools.permutations(tup, 2):
                key = tmask & ~(1 << v) & ~(1 << w)
                row = link.setdefault(key, {})
                row[v] = row.get(v, 0) | (1 << w)
        self.link = link
        self.hdeg = hdeg
        base = link.get(0, {})
        self.adj0 = tuple(base.get(v, 0) for v in range(nv))

        allowed = (1 << nv) - 1
        u = constraints.max_member_size
        if u is not None:
            allowed = sum(1 << v for v, m in enumerate(self.masks) if m.bit_count() <= u)
        self.stable = constraints.require_stable
        self.desc = [0] * nv
        if self.stable:
            allowed = self._stable_setup(allowed)
        self.allowed = allowed
        self.dedupe = False

    def _stable_setup(self, allowed: int) -> int:
        # direct predecessors of each vertex under single shifts toward smaller elements
        index = {m: v for v, m in enumerate(self.masks)}
        preds: list[list[int]] = []
        dead = 0
        for v, m in enumerate(self.masks):
            row = []
            for jb in range(self.n):
                if not m >> jb & 1:
                    continue
                for ib in range(jb):
                    if m >> ib & 1:
                        continue
                    p = (m & ~(1 << jb)) | (1 << ib)
                    if p in index:
                        row.append(index[p])
                    else:
                        dead |= 1 << v
            preds.append(row)
        # canonical order puts predecessors first, so one forward pass closes descendants
        succ = [0] * self.nv
        for v in range(self.nv):
            for p in preds[v]:
                succ[p] |= 1 << v
        desc = [0] * self.nv
        for v in reversed(range(self.nv)):
            acc = succ[v]
            for w in _bits(succ[v]):
                acc |= desc[w]
            desc[v] = acc
        self.desc = desc
        return self.drop(allowed, dead | ((1 << self.nv) - 1 & ~allowed))

    def drop(self, cand: int, removed: int) -> int:
        """Remove ``removed`` from ``cand``, plus descendants in stable mode."""
        cand &= ~removed
        if self.stable:
            r = removed
            acc = 0
            for v in _bits(r):
                acc |= self.desc[v]
            cand &= ~acc
        return cand

    def adj_for(self, chosen: int) -> list[int] | tuple[int, ...]:
        if self.d == 2:
            return self.adj0
        adj = [0] * self.nv
        for combo in itertools.combinations(list(_bits(chosen)), self.d - 2):
            key = 0
            for a in combo:
                key |= 1 << a
            for v, m in self.link.get(key, {}).items():
                adj[v] |= m
        return adj

    def include(self, chosen: int, cand: int, adj, v: int):
        forbidden = adj[v] & cand
        cand2 = self.drop(cand & ~(1 << v), forbidden)
        if self.d > 2:
            adj = list(adj)
            for combo in itertools.combinations(list(_bits(chosen)), self.d - 3):
                key = 1 << v
                for a in combo:
                    key |= 1 << a
                for w, m in self.link.get(key, {}).items():
                    adj[w] |= m
        return chosen | (1 << v), cand2, adj

    def exclude(self, chosen: int, cand: int, adj, v: int):
        return chosen, self.drop(cand, 1 << v), adj

    def bound(self, cand: int, adj) -> int:
        cliques: list[int] = []
        for v in _bits(cand):
            for idx, common in enumerate(cliques):
                if common >> v & 1:
                    cliques[idx] = common & adj[v]
                    break
            else:
                cliques.append(adj[v] & cand)
        return len(cliques)

    def pick(self, cand: int, adj) -> int:
        if self.stable:
            return (cand & -cand).bit_length() - 1
        best_v, best_key = -1, None
        for v in _bits(cand):
            key = ((adj[v] & cand).bit_count(), self.hdeg[v])
            if best_key is None or key > best_key:
                best_v, best_key = v, key
        return best_v

    def accept(self, chosen: int) -> bool:
        if self.constraints.require_nonintersecting:
            ms = [self.masks[v] for v in _bits(chosen)]
            if not any(a & b == 0 for a, b in itertools.combinations(ms, 2)):
                return False
        return True

    def roots(self, use_symmetry: bool) -> list[tuple]:
        """Initial nodes, in the order they should be explored."""
        adj = self.adj_for(0)
        if not (use_symmetry and self.structure.symmetric and not self.stable):
            return [(0, self.allowed, adj)]
        if self.constraints.require_nonintersecting:
            roots = self._pair_roots(adj)
            self.dedupe = len(roots) > 1
            return roots
        # any nonempty solution can be relabeled to contain the first vertex of
        # its smallest layer while avoiding every smaller layer
        out = []
        seen_sizes = set()
        for v in _bits(self.allowed):
            r = self.masks[v].bit_count()
            if r in seen_sizes:
                continue
            seen_sizes.add(r)
            cand = self.allowed & ~((1 << v) - 1)
            out.append(self.include(0, cand, adj, v))
        out.append((0, 0, adj))
        return out

    def _pair_roots(self, adj) -> list[tuple]:
        # every solution has a disjoint pair, and any disjoint pair of sizes
        # (a, b) can be relabeled to {1..a}, {a+1..a+b}
        index = {m: v for v, m in enumerate(self.masks)}
        sizes = sorted({self.masks[v].bit_count() for v in _bits(self.allowed)})
        out = []
        for a, b in itertools.combinations_with_replacement(sizes, 2):
            if a + b > self.n:
                continue
            first = (1 << a) - 1
            second = ((1 << b) - 1) << a
            if first == second:
                continue
            va, vb = index[first], index[second]
            if (self.adj0[va] >> vb) & 1 or not (self.allowed >> va & 1 and self.allowed >> vb & 1):
                continue
            chosen, cand, adj1 = self.include(0, self.allowed, adj, va)
            if not cand >> vb & 1:
                continue
            out.append(self.include(chosen, cand, adj1, vb))
        return out


@dataclass
class Tally:
    """Incumbent size, exact count of optimal solutions, and the smallest kept ones."""

    best: int = 0
    count: int = 0
    kept: list[int] = field(default_factory=list)  # max-heap via negation
    cap: int = MAX_OPTIMA
    # set when several roots can reach the same solution
    seen: set[int] | None = None

    def offer(self, chosen: int) -> None:
        size = chosen.bit_count()
        if size < self.best:
            return
        if size > self.best or self.count == 0:
            self.best, self.count, self.kept = size, 0, []
            if self.seen is not None:
                self.seen = set()
        if self.seen is not None:
            if chosen in self.seen:
                return
            self.seen.add(chosen)
        self.count += 1
        if len(self.kept) < self.cap:
            heapq.heappush(self.kept, -chosen)
        elif chosen < -self.kept[0]:
            heapq.heapreplace(self.kept, -chosen)

    def solutions(self) -> list[int]:
        return sorted(-x for x in self.kept)

    @classmethod
    def merge(cls, parts: list["Tally"], cap: int) -> "Tally":
        top = max((p.best for p in parts if p.count), default=0)
        out = cls(best=top, cap=cap)
        sols: list[int] = []
        winners = [p for p in parts if p.count and p.best == top]
        if any(p.seen is not None for p in parts):
            out.seen = set().union(*(p.seen for p in winners))
            out.count = len(out.seen)
            sols = sorted(out.seen)
        else:
            for p in winners:
                out.count += p.count
                sols.extend(p.solutions())
        sols.sort()
        out.kept = [-x for x in sols[:cap]]
        heapq.heapify(out.kept)
        return out


def _search(
    prob: Problem,
    stack: list,
    tally: Tally,
    nodes: int,
    floor: int = 0,
    budget: int | None = None,
) -> int:
    """Depth-first search from an explicit stack; returns the updated node count.

    Subtrees that cannot reach ``floor`` (a size already achieved elsewhere)
    are cut.  Stops early, leaving the unexplored part on ``stack``, once
    ``nodes`` reaches ``budget``.
    """
    while stack:
        if budget is not None and nodes >= budget:
            break
        chosen, cand, adj = stack.pop()
        nodes += 1
        thr = max(tally.best if tally.count else 0, floor)
        size = chosen.bit_count()
        if not cand:
            if size >= thr and prob.accept(chosen):
                tally.offer(chosen)
            continue
        if size + cand.bit_count() < thr:
            continue
        b = prob.bound(cand, adj)
        if size + b < thr:
            continue
        if prob.d == 2 and b == cand.bit_count():
            # no conflicts left among the candidates: taking them all is the only optimum here
            full = chosen | cand
            if prob.accept(full):
                tally.offer(full)
            continue
        v = prob.pick(cand, adj)
        stack.append(prob.exclude(chosen, cand, adj, v))
        stack.append(prob.include(chosen, cand, adj, v))
    return nodes


def _frontier(prob: Problem, roots: list, target: int, tally: Tally) -> tuple[list, int]:
    """Expand nodes breadth-first (deterministically) until ``target`` subtrees exist."""
    queue = list(roots)
    nodes = 0
    while queue and len(queue) < target:
        nxt = []
        grew = False
        for node in queue:
            chosen, cand, adj = node
            if not cand:
                nodes += 1
                if prob.accept(chosen):
                    tally.offer(chosen)
                continue
            if len(nxt) + 2 > target * 2:
                nxt.append(node)
                continue
            nodes += 1
            v = prob.pick(cand, adj)
            nxt.append(prob.include(chosen, cand, adj, v))
            nxt.append(prob.exclude(chosen, cand, adj, v))
            grew = True
        queue = nxt
        if not grew:
            break
    return queue, nodes


def _incumbent(tally: Tally) -> int:
    return tally.best if tally.count else 0


@dataclass
class Schedule:
    """Progress through the fixed task list.

    Tasks run in waves of ``WAVE``; every task in a wave prunes against the
    incumbent frozen when the wave began (``floor``) plus its own results,
    never against a sibling's.  ``stack`` and ``local`` belong to the task
    in progress, if any.
    """

    tally: Tally
    tasks: list
    floor: int = 0
    wave_left: int = 0
    stack: list = field(default_factory=list)
    local: Tally | None = None
    nodes: int = 0

    @property
    def done(self) -> bool:
        return self.local is None and not self.tasks

    def start_task(self, dedupe: bool) -> None:
        if self.wave_left == 0:
            self.floor = _incumbent(self.tally)
            self.wave_left = min(WAVE, len(self.tasks))
        self.stack = [self.tasks.pop(0)]
        self.wave_left -= 1
        self.local = Tally(cap=self.tally.cap, seen=set() if dedupe else None)

    def finish_task(self) -> None:
        self.tally = Tally.merge([self.tally, self.local], self.tally.cap)
        self.local = None


def _start(prob: Problem, use_symmetry: bool, cap: int) -> Schedule:
    tally = Tally(cap=cap, seen=set() if prob.dedupe else None)
    tasks, nodes = _frontier(prob, prob.roots(use_symmetry), FRONTIER_TASKS, tally)
    return Schedule(tally=tally, tasks=tasks, nodes=nodes)


# ---------------------------------------------------------------------------
# parallel driver

_WORKER_PROBLEM: Problem | None = None


def _work(args):
    node, floor, cap, dedupe = args
    tally = Tally(cap=cap, seen=set() if dedupe else None)
    nodes = _search(_WORKER_PROBLEM, [node], tally, 0, floor)
    return tally, nodes


def run_parallel(prob: Problem, sched: Schedule, threads: int) -> None:
    """Finish ``sched`` with each wave's tasks spread over worker processes."""
    global _WORKER_PROBLEM
    if sched.local is not None:
        sched.nodes = _search(prob, sched.stack, sched.local, sched.nodes, sched.floor)
        sched.finish_task()
    if sched.done:
        return
    _WORKER_PROBLEM = prob
    ctx = mp.get_context("fork")
    cap, dedupe = sched.tally.cap, prob.dedupe
    try:
        with ctx.Pool(threads) as pool:
            while sched.tasks:
                if sched.wave_left == 0:
                    sched.floor = _incumbent(sched.tally)
                    sched.wave_left = min(WAVE, len(sched.tasks))
                wave = sched.tasks[: sched.wave_left]
                del sched.tasks[: sched.wave_left]
                sched.wave_left = 0
                results = pool.map(_work, [(t, sched.floor, cap, dedupe) for t in wave], chunksize=1)
                # merge in task order, exactly as the sequential driver does
                for part, count in results:
                    sched.tally = Tally.merge([sched.tally, part], cap)
                    sched.nodes += count
    finally:
        _WORKER_PROBLEM = None


# ---------------------------------------------------------------------------
# checkpoints


def _hex(x: int) -> str:
    return format(x, "x")


def write_checkpoint(path: str | os.PathLike, state: dict) -> None:
    body = json.dumps(state, sort_keys=True, separators=(",", ":"))
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(f"{CHECKPOINT_HEADER}\n{body}\n")
    os.replace(tmp, path)


def read_checkpoint(path: str | os.PathLike) -> dict:
    text = Path(path).read_text()
    head, _, body = text.partition("\n")
    if head.strip() != CHECKPOINT_HEADER:
        raise FormatError(f"not a checkpoint file (expected {CHECKPOINT_HEADER!r} header)", 1)
    try:
        state = json.loads(body)
    except json.JSONDecodeError as exc:
        raise FormatError(f"checkpoint body is not valid JSON: {exc.msg}", exc.lineno + 1) from None
    n = state.get("n")
    if not isinstance(n, int) or not 1 <= n <= MAX_N:
        raise FormatError("checkpoint has no valid ground set size")
    return state


def _tally_state(tally: Tally) -> dict:
    return {
        "incumbent": tally.best,
        "count": tally.count,
        "kept": [_hex(x) for x in tally.solutions()],
        "seen": None if tally.seen is None else [_hex(x) for x in sorted(tally.seen)],
    }


def _tally_restore(obj: dict, cap: int) -> Tally:
    tally = Tally(best=obj["incumbent"], count=obj["count"], cap=cap)
    if obj.get("seen") is not None:
        tally.seen = {int(x, 16) for x in obj["seen"]}
    tally.kept = [-int(x, 16) for x in obj["kept"]]
    heapq.heapify(tally.kept)
    return tally


def _nodes_state(nodes: list) -> list:
    return [[_hex(c), _hex(k)] for c, k, _ in nodes]


def checkpoint_state(
    structure: ConflictStructure,
    constraints: SearchConstraints,
    options: dict,
    sched: Schedule,
    elapsed_ms: float,
) -> dict:
    p = structure.params
    return {
        "n": structure.n,
        "vertices": [_hex(m) for m in structure.vertices],
        "conflicts": [list(c) for c in structure.conflicts],
        "symmetric": structure.symmetric,
        "pool": structure.pool,
        "params": {"d": p.d, "s": p.s, "t": p.t},
        "constraints": constraints.as_dict(),
        "options": options,
        "tally": _tally_state(sched.tally),
        "tasks": _nodes_state(sched.tasks),
        "floor": sched.floor,
        "wave_left": sched.wave_left,
        "stack": _nodes_state(sched.stack),
        "local": None if sched.local is None else _tally_state(sched.local),
        "nodes": sched.nodes,
        "elapsed_ms": elapsed_ms,
    }


def restore(state: dict) -> tuple[ConflictStructure, SearchConstraints, dict, Schedule, float]:
    try:
        p = state["params"]
        structure = ConflictStructure(
            n=state["n"],
            vertices=tuple(int(m, 16) for m in state["vertices"]),
            params=ConditionParams(p["d"], p["s"], p["t"]),
            conflicts=tuple(tuple(c) for c in state["conflicts"]),
            symmetric=bool(state["symmetric"]),
            pool=state.get("pool", {}),
        )
        constraints = SearchConstraints(**state["constraints"])
        options = dict(state["options"])
        cap = options.get("max_optima", MAX_OPTIMA)
        prob = Problem(structure, constraints)

        def nodes_of(rows):
            out = []
            for c, k in rows:
                chosen = int(c, 16)
                out.append((chosen, int(k, 16), prob.adj_for(chosen)))
            return out

        sched = Schedule(
            tally=_tally_restore(state["tally"], cap),
            tasks=nodes_of(state["tasks"]),
            floor=int(state["floor"]),
            wave_left=int(state["wave_left"]),
            stack=nodes_of(state["stack"]),
            local=None if state["local"] is None else _tally_restore(state["local"], cap),
            nodes=int(state["nodes"]),
        )
        return structure, constraints, options, sched, float(state["elapsed_ms"])
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"malformed checkpoint: {exc}") from None


def solve(
    structure: ConflictStructure,
    constraints: SearchConstraints,
    *,
    threads: int = 1,
    use_symmetry: bool = True,
    max_optima: int = MAX_OPTIMA,
    checkpoint: str | os.PathLike | None = None,
    checkpoint_every: int | None = None,
    stop_after_nodes: int | None = None,
    resume_state: dict | None = None,
) -> tuple[Tally, int, float]:
    """Run the search; returns (tally, nodes, elapsed milliseconds).

    The work split is fixed in advance, so the tally and the node count are
    the same for every thread count.  Checkpointing works only in the
    sequential driver; asking for it with more than one thread is an error.
    """
    if threads < 1:
        raise ArgumentError(f"thread count must be positive, got {threads}")
    wants_ckpt = checkpoint is not None or stop_after_nodes is not None
    if wants_ckpt and threads > 1:
        raise ArgumentError("checkpointing needs a single-threaded search")
    if stop_after_nodes is not None and checkpoint is None:
        raise ArgumentError("a node budget needs a checkpoint path to save the frontier")
    if checkpoint_every is not None and checkpoint_every < 1:
        raise ArgumentError(f"checkpoint interval must be positive, got {checkpoint_every}")
    t0 = time.perf_counter()
    prob = Problem(structure, constraints)
    options = {"use_symmetry": use_symmetry, "max_optima": max_optima}

    if resume_state is not None:
        _, _, _, sched, prior_ms = restore(resume_state)
    else:
        sched = _start(prob, use_symmetry, max_optima)
        prior_ms = 0.0

    def elapsed() -> float:
        return (time.perf_counter() - t0) * 1000 + prior_ms

    if threads > 1:
        run_parallel(prob, sched, threads)
        return sched.tally, sched.nodes, elapsed()

    mark = None if checkpoint_every is None else sched.nodes + checkpoint_every
    while not sched.done:
        if sched.local is None:
            sched.start_task(prob.dedupe)
        budget = min((x for x in (mark, stop_after_nodes) if x is not None), default=None)
        sched.nodes = _search(prob, sched.stack, sched.local, sched.nodes, sched.floor, budget)
        if not sched.stack:
            sched.finish_task()
        if checkpoint is None or sched.done:
            continue
        stopping = stop_after_nodes is not None and sched.nodes >= stop_after_nodes
        if stopping or (mark is not None and sched.nodes >= mark):
            write_checkpoint(
                checkpoint, checkpoint_state(structure, constraints, options, sched, elapsed())
            )
            if mark is not None:
                mark = sched.nodes + checkpoint_every
        if stopping:
            raise SearchInterrupted(str(checkpoint), sched.nodes)
    return sched.tally, sched.nodes, elapsed()
