"""Command-line driver: check, construct, search, verify, duality, stabilize, shadow.

Exit codes: 0 success (condition holds, all verdicts PASS/OPEN), 1 a
negative result (violation, FAIL verdict, no unstable witness), 2 usage
or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from setlab import constructions as C
from setlab.duality import duality_forward, duality_inverse
from setlab.errors import ArgumentError, CapabilityError, FormatError, SetlabError
from setlab.predicates import (
    ConditionParams,
    find_violating_cluster,
    is_conditionally_intersecting,
    is_ij_unstable,
)
from setlab.search import (
    DEFAULT_VERTEX_CAP,
    SearchConstraints,
    SearchInterrupted,
    build_conflicts,
    max_family,
    resume_search,
)
from setlab.search.report import dump_fields
from setlab.search.theorems import THEOREMS, verify_theorem
from setlab.setfam import (
    CANONICAL_LIMIT,
    ElementSet,
    SetFamily,
    ShiftPair,
    bounded_family,
    format_family,
    layered_family,
    parse_family,
    power_family,
    shadow,
    shift_family,
    stabilize,
    uniform_family,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2
CONSTRUCTORS = ("star", "hk", "gr", "fj", "fprime", "twin2star", "conj41", "g4")


@dataclass
class CliConfig:
    command: str
    args: argparse.Namespace
    output: str | None = None
    format: str = "text"
    threads: int = 1
    vertex_cap: int = DEFAULT_VERTEX_CAP
    canonical_limit: int = CANONICAL_LIMIT
    lines: list[str] = field(default_factory=list)

    def emit(self, text: str) -> None:
        self.lines.append(text if text.endswith("\n") else text + "\n")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument helpers


def _int_list(text: str) -> list[int]:
    """``5``, ``5,7,9`` or an inclusive range ``5..8``."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ".." in chunk:
            lo, _, hi = chunk.partition("..")
            a, b = int(lo), int(hi)
            if a > b:
                raise argparse.ArgumentTypeError(f"empty range {chunk!r}")
            out.extend(range(a, b + 1))
        else:
            out.append(int(chunk))
    return out


def _int_list_arg(text: str) -> list[int]:
    try:
        return _int_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers or a range like 5..7, got {text!r}") from None


def _elements(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _pair(text: str) -> ShiftPair:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"pair must look like i,j, got {text!r}")
    try:
        return ShiftPair(int(parts[0]), int(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"pair must look like i,j, got {text!r}") from None
    except ArgumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _assignment(text: str) -> dict[int, int]:
    out = {}
    for item in text.split(","):
        z, sep, c = item.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"assignment items look like z:c, got {item!r}")
        try:
            out[int(z)] = int(c)
        except ValueError:
            raise argparse.ArgumentTypeError(f"assignment items look like z:c, got {item!r}") from None
    return out


def _parts(text: str) -> list[list[int]]:
    return [_elements(p) for p in text.split("/")]


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _condition(p: argparse.ArgumentParser, s_required: bool = True) -> None:
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=int, required=s_required)
    p.add_argument("--t", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="setlab", description="Conditionally intersecting set families.")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--output", "-o", help="write to this file instead of stdout")
    parser.add_argument("--threads", type=_positive, help="worker processes (default: $SETLAB_THREADS or 1)")
    parser.add_argument("--vertex-cap", type=_positive, default=DEFAULT_VERTEX_CAP)
    parser.add_argument("--canonical-limit", type=_positive, default=CANONICAL_LIMIT)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="test the condition on a family file")
    p.add_argument("family")
    _condition(p)
    p.add_argument("--pair", type=_pair, help="also test (i,j)-instability")

    p = sub.add_parser("construct", help="print a named family")
    p.add_argument("name", choices=CONSTRUCTORS)
    for flag in ("n", "k", "t", "j", "center", "x", "y"):
        p.add_argument(f"--{flag}", type=int)
    p.add_argument("--parts", type=_parts, help="parts separated by '/', e.g. 1,2,3/4,5")
    p.add_argument("--sizes", type=_elements, help="contiguous part sizes, e.g. 3,3")
    p.add_argument("--thresholds", type=_elements)
    p.add_argument("--assign", type=_assignment, help="twin 2-star centers, e.g. 3:1,4:1,5:2")
    p.add_argument("--b", type=_elements, help="the set B (conj41)")
    p.add_argument("--b1", type=_elements)
    p.add_argument("--b2", type=_elements)

    p = sub.add_parser("search", help="exact maximum over a pool")
    p.add_argument("--n", type=int)
    pool = p.add_mutually_exclusive_group()
    pool.add_argument("--k", type=_elements, help="member sizes (uniform or layered pool)")
    pool.add_argument("--u", type=int, help="all sets of size <= u")
    pool.add_argument("--pool", help="family file giving the candidate sets")
    p.add_argument("--d", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--stable", action="store_true")
    p.add_argument("--nonintersecting", action="store_true")
    p.add_argument("--max-size", type=int)
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("--checkpoint")
    p.add_argument("--checkpoint-every", type=_positive)
    p.add_argument("--stop-after", type=_positive)
    p.add_argument("--resume", help="continue from a checkpoint file")

    p = sub.add_parser("verify", help="run a named check over parameter ranges")
    p.add_argument("theorem", choices=THEOREMS)
    for flag in ("n", "k", "d", "s", "u"):
        p.add_argument(f"--{flag}", type=_int_list_arg, required=flag == "n")

    p = sub.add_parser("duality", help="trace the involution on the first unstable subfamily")
    p.add_argument("family")
    p.add_argument("--pair", type=_pair, required=True)
    _condition(p)

    p = sub.add_parser("stabilize", help="apply shifts until stable")
    p.add_argument("family")

    p = sub.add_parser("shadow", help="ell-shadow, with the shadow bound when --t is given")
    p.add_argument("family")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--t", type=int)
    return parser


def _threads(ns: argparse.Namespace) -> int:
    if ns.threads is not None:
        return ns.threads
    env = os.environ.get("SETLAB_THREADS")
    if env is None:
        return 1
    try:
        v = int(env)
    except ValueError:
        v = 0
    if v < 1:
        raise UsageError(f"SETLAB_THREADS must be a positive integer, got {env!r}")
    return v


def parse_config(argv: list[str]) -> CliConfig:
    ns = build_parser().parse_args(argv)
    return CliConfig(
        command=ns.command,
        args=ns,
        output=ns.output,
        format=ns.format,
        threads=_threads(ns),
        vertex_cap=ns.vertex_cap,
        canonical_limit=ns.canonical_limit,
    )


def _read_family(path: str) -> SetFamily:
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_family(text)
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _sets_text(sets) -> str:
    return " ".join("{" + (",".join(map(str, a)) if len(a) else "") + "}" for a in sets)


def _sets_json(sets) -> list[list[int]]:
    return [list(a) for a in sets]


# ---------------------------------------------------------------------------
# commands


def cmd_check(cfg: CliConfig) -> int:
    a = cfg.args
    fam = _read_family(a.family)
    params = ConditionParams(a.d, a.s, a.t)
    cluster = find_violating_cluster(fam, params)
    holds = cluster is None
    out: dict = {"members": len(fam), "params": {"d": a.d, "s": a.s, "t": a.t}, "holds": holds}
    if cluster is not None:
        out["cluster"] = {
            "sets": _sets_json(cluster.sets),
            "union_size": cluster.union_size,
            "intersection_size": cluster.intersection_size,
        }
    if a.pair is not None and holds:
        w = is_ij_unstable(fam, a.pair, params)
        image = shift_family(fam, a.pair)
        out["pair"] = [a.pair.i, a.pair.j]
        out["image"] = image.as_lists()
        out["image_holds"] = is_conditionally_intersecting(image, params)
        out["unstable"] = w is not None
        if w is not None:
            out["witness"] = _sets_json(w.subfamily)
    if cfg.format == "json":
        cfg.emit(json.dumps(out, indent=2))
    else:
        cfg.emit(f"condition {params}: {'holds' if holds else 'violated'}")
        if cluster is not None:
            cfg.emit(
                f"cluster: {_sets_text(cluster.sets)} union={cluster.union_size} "
                f"intersection={cluster.intersection_size}"
            )
        if "pair" in out:
            cfg.emit(f"shift {a.pair} image: {_sets_text(out['image'])}")
            cfg.emit(f"image condition: {'holds' if out['image_holds'] else 'violated'}")
            if out["unstable"]:
                cfg.emit(f"{a.pair}-unstable, witness: {_sets_text(out['witness'])}")
            else:
                cfg.emit(f"{a.pair}-stable for this condition")
        elif a.pair is not None:
            cfg.emit("instability not tested: the family itself violates the condition")
    return EXIT_OK if holds else EXIT_NEGATIVE


def _need(a: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(a, n) is None]
    if missing:
        raise UsageError(f"construct {a.name} needs {' '.join(missing)}")


def construct(a: argparse.Namespace) -> SetFamily:
    name = a.name
    if name == "star":
        _need(a, "n", "k", "center")
        return C.star(a.n, a.k, a.center)
    if name == "hk":
        _need(a, "n", "k")
        return C.h_k(a.n, a.k)
    if name == "gr":
        _need(a, "k", "thresholds")
        if (a.parts is None) == (a.sizes is None):
            raise UsageError("construct gr needs exactly one of --parts or --sizes")
        if a.sizes is not None:
            spec = C.PartitionSpec.contiguous(a.sizes, a.thresholds)
        else:
            _need(a, "n")
            spec = C.PartitionSpec.of(a.n, a.parts, a.thresholds)
        if a.n is not None and a.n != spec.n:
            raise UsageError(f"--n {a.n} disagrees with the partition of [{spec.n}]")
        return C.g_r(spec.n, a.k, spec)
    if name == "fj":
        _need(a, "n", "k", "t", "j")
        return C.f_j(a.n, a.k, a.t, a.j)
    if name == "fprime":
        _need(a, "n", "k", "t")
        return C.f_prime(a.n, a.k, a.t)
    if name == "twin2star":
        _need(a, "n", "x", "y", "assign")
        return C.twin_2_star(a.n, a.x, a.y, a.assign)
    if name == "conj41":
        _need(a, "n", "k", "x", "b")
        return C.conjecture41_family(a.n, a.k, a.x, ElementSet.of(a.b, a.n))
    _need(a, "n", "k", "b1", "b2", "x", "y")
    return C.section4_g_family(
        a.n, a.k, ElementSet.of(a.b1, a.n), ElementSet.of(a.b2, a.n), a.x, a.y
    )


def cmd_construct(cfg: CliConfig) -> int:
    fam = construct(cfg.args)
    if cfg.format == "json":
        cfg.emit(json.dumps({"n": fam.n, "members": fam.as_lists()}))
    else:
        cfg.emit(format_family(fam))
    return EXIT_OK


def _search_pool(a: argparse.Namespace) -> SetFamily:
    if a.pool is not None:
        return _read_family(a.pool)
    if a.n is None:
        raise UsageError("search needs --n (or --pool)")
    if a.k is not None:
        return uniform_family(a.n, a.k[0]) if len(a.k) == 1 else layered_family(a.n, a.k)
    if a.u is not None:
        return bounded_family(a.n, a.u)
    return power_family(a.n)


def cmd_search(cfg: CliConfig) -> int:
    a = cfg.args
    if a.resume is not None:
        try:
            report = resume_search(
                a.resume, cfg.canonical_limit,
                checkpoint=a.checkpoint or a.resume,
                checkpoint_every=a.checkpoint_every,
                stop_after_nodes=a.stop_after,
            )
        except OSError as exc:
            raise UsageError(f"cannot read {a.resume}: {exc.strerror}") from None
    else:
        if a.d is None or a.s is None:
            raise UsageError("search needs --d and --s")
        pool = _search_pool(a)
        if a.n is not None and a.n != pool.n:
            raise UsageError(f"--n {a.n} disagrees with the pool over [{pool.n}]")
        structure = build_conflicts(pool.n, pool, ConditionParams(a.d, a.s, a.t), cfg.vertex_cap)
        cons = SearchConstraints(a.stable, a.nonintersecting, a.max_size)
        report = max_family(
            structure, cons,
            threads=cfg.threads,
            use_symmetry=not a.no_symmetry,
            canonical_limit=cfg.canonical_limit,
            checkpoint=a.checkpoint,
            checkpoint_every=a.checkpoint_every,
            stop_after_nodes=a.stop_after,
        )
    if cfg.format == "json":
        cfg.emit(report.to_json())
    else:
        cfg.emit(report.to_text())
    return EXIT_OK


def cmd_verify(cfg: CliConfig) -> int:
    a = cfg.args
    reports = verify_theorem(
        a.theorem, a.n, a.k, a.d, a.s, a.u,
        threads=cfg.threads,
        vertex_cap=cfg.vertex_cap,
        canonical_limit=cfg.canonical_limit,
    )
    if cfg.format == "json":
        cfg.emit("[\n" + ",\n".join(dump_fields(r.to_json_obj(), "  ") for r in reports) + "\n]")
    else:
        cfg.emit("\n".join(r.to_text() for r in reports))
    failed = any(r.verdict["status"] == "FAIL" for r in reports)
    return EXIT_NEGATIVE if failed else EXIT_OK


def cmd_duality(cfg: CliConfig) -> int:
    a = cfg.args
    fam = _read_family(a.family)
    params = ConditionParams(a.d, a.s, a.t)
    a.pair.check(fam.n)
    if not is_conditionally_intersecting(fam, params):
        cfg.emit(f"no unstable witness: the family violates {params} itself")
        return EXIT_NEGATIVE
    w = is_ij_unstable(fam, a.pair, params)
    if w is None:
        cfg.emit(f"no {a.pair}-unstable subfamily for {params}")
        return EXIT_NEGATIVE
    try:
        tr = duality_forward(w.subfamily, fam, a.pair, params)
    except CapabilityError:
        cfg.emit(
            f"the unstable subfamily {_sets_text(w.subfamily)} has no member avoiding both "
            f"{a.pair.i} and {a.pair.j}; the involution is only defined when one exists"
        )
        return EXIT_NEGATIVE
    back = duality_inverse(tr, fam, a.pair, params)
    ok = tuple(back) == tr.input and tr.reverse_fixed == tr.swapped and tr.reverse_swapped == tr.fixed
    part = tr.partition
    rows = [
        ("input", tr.input),
        ("moved", part.moved),
        ("has_i", part.has_i),
        ("has_neither", part.has_neither),
        ("fixed", tr.fixed),
        ("swapped", tr.swapped),
        ("output", tr.output),
        ("reverse_fixed", tr.reverse_fixed),
        ("reverse_swapped", tr.reverse_swapped),
        ("inverse", back),
    ]
    if cfg.format == "json":
        body = {"pair": [a.pair.i, a.pair.j]}
        body.update({k: _sets_json(v) for k, v in rows})
        body["round_trip"] = ok
        cfg.emit(json.dumps(body, indent=2))
    else:
        cfg.emit(f"pair {a.pair}, condition {params}")
        for k, v in rows:
            cfg.emit(f"{k:>16}: {_sets_text(v) or '(none)'}")
        cfg.emit(f"round trip: {'OK' if ok else 'MISMATCH'}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_stabilize(cfg: CliConfig) -> int:
    fam = _read_family(cfg.args.family)
    out, pairs = stabilize(fam)
    if cfg.format == "json":
        cfg.emit(json.dumps({"n": out.n, "members": out.as_lists(), "shifts": [[p.i, p.j] for p in pairs]}))
    else:
        cfg.emit(format_family(out) + "# shifts: " + (" ".join(f"{p.i},{p.j}" for p in pairs) or "none"))
    return EXIT_OK


def cmd_shadow(cfg: CliConfig) -> int:
    a = cfg.args
    fam = _read_family(a.family)
    if not 0 <= a.ell <= fam.n:
        raise UsageError(f"--ell must lie in 0..{fam.n}")
    sh = shadow(fam, a.ell)
    info: dict = {"n": sh.n, "members": sh.as_lists(), "size": len(sh)}
    code = EXIT_OK
    if a.t is not None:
        chk = C.katona_bound_check(fam, a.t, a.ell)
        info["bound"] = {
            "lhs": chk.lhs,
            "rhs": f"{chk.rhs.numerator}/{chk.rhs.denominator}",
            "holds": chk.holds,
            "equality": chk.equality,
            "equality_expected": C.katona_equality_expected(fam, a.t, a.ell),
        }
        code = EXIT_OK if chk.holds else EXIT_NEGATIVE
    if cfg.format == "json":
        cfg.emit(json.dumps(info))
    else:
        text = format_family(sh) + f"# size: {len(sh)}"
        if "bound" in info:
            b = info["bound"]
            text += (
                f"\n# bound: {b['lhs']} >= {b['rhs']} {'holds' if b['holds'] else 'FAILS'}"
                f", equality {b['equality']} (expected {b['equality_expected']})"
            )
        cfg.emit(text)
    return code


COMMANDS = {
    "check": cmd_check,
    "construct": cmd_construct,
    "search": cmd_search,
    "verify": cmd_verify,
    "duality": cmd_duality,
    "stabilize": cmd_stabilize,
    "shadow": cmd_shadow,
}


def _write(cfg: CliConfig, stdout) -> None:
    text = "".join(cfg.lines)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        stdout.write(text)


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        code = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except SearchInterrupted as exc:
        stderr.write(f"{exc}\n")
        return EXIT_OK
    except SetlabError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    _write(cfg, stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
