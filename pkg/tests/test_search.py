import itertools
import math
import random

import pytest

import oracles as o
from setlab.constructions import star, twin_2_star
from setlab.errors import ArgumentError, CapabilityError, FormatError
from setlab.predicates import ConditionParams
from setlab.search import (
    SearchConstraints,
    SearchInterrupted,
    build_conflicts,
    max_family,
    resume_search,
)
from setlab.search.solver import CHECKPOINT_HEADER
from setlab.search.theorems import verify_theorem
from setlab.setfam import SetFamily, canonical_form, is_stable, power_family, uniform_family


def conflicts_of(n, pool, d, s, t=1):
    return build_conflicts(n, pool, ConditionParams(d, s, t))


# --- conflict structures ------------------------------------------------------


def test_disjoint_pairs_example():
    cs = conflicts_of(5, uniform_family(5, 2), 2, 4)
    assert len(cs.conflicts) == 15 == math.comb(5, 2) * math.comb(3, 2) // 2
    for a, b in cs.conflicts:
        assert not cs.vertices[a] & cs.vertices[b]


def test_conflicts_match_brute_force():
    rng = random.Random(41)
    for _ in range(200):
        n = rng.randint(2, 6)
        masks = rng.sample(range(1 << n), rng.randint(0, min(14, 1 << n)))
        d, s, t = rng.randint(2, 4), rng.randint(0, n), rng.randint(1, 2)
        cs = conflicts_of(n, SetFamily(n, masks), d, s, t)
        pool = o.fam(cs.vertices)
        assert sorted(cs.conflicts) == sorted(o.clusters(pool, n, d, s, t))
        assert len(set(cs.conflicts)) == len(cs.conflicts)
        for c in cs.conflicts:
            sets = [pool[i] for i in c]
            assert len(o.join(sets)) <= s and len(o.meet(sets, n)) <= t - 1


def test_vertex_cap():
    with pytest.raises(CapabilityError):
        conflicts_of(8, power_family(8), 2, 8)
    with pytest.raises(CapabilityError):
        build_conflicts(8, uniform_family(8, 4), ConditionParams(3, 8), vertex_cap=69)
    cs = build_conflicts(8, uniform_family(8, 4), ConditionParams(3, 8), vertex_cap=70)
    assert len(cs.vertices) == 70


def test_canonical_limit_for_reports():
    cs = build_conflicts(9, SetFamily.of(9, [[1, 2], [3, 4]]), ConditionParams(2, 4))
    with pytest.raises(CapabilityError):
        max_family(cs)
    assert max_family(cs, canonical_limit=9).optimum == 1


# --- optimum and extremal families ----------------------------------------------


def test_mubayi_example():
    rep = max_family(conflicts_of(6, uniform_family(6, 3), 3, 6))
    assert rep.optimum == 10
    assert list(rep.extremal) == [canonical_form(star(6, 3, 1))]
    assert rep.verdict["status"] == "SOLVED"


def test_nonintersecting_example():
    rep = max_family(conflicts_of(6, uniform_family(6, 2), 3, 4), SearchConstraints(require_nonintersecting=True))
    assert rep.optimum == 4
    twins = {canonical_form(twin_2_star(6, 1, 2, dict(zip(range(3, 7), c)))).masks
             for c in itertools.product((1, 2), repeat=4) if len(set(c)) == 2}
    assert {f.masks for f in rep.extremal} == twins


def test_power_set_example():
    rep = max_family(conflicts_of(5, power_family(5), 2, 4))
    assert rep.optimum == 20 and len(rep.extremal) == 1
    want = list(star(5, 2, 1).masks) + [m for m in range(32) if m.bit_count() > 2]
    assert rep.extremal[0] == canonical_form(SetFamily(5, want))


def test_infeasible_when_nonintersecting_is_impossible():
    rep = max_family(conflicts_of(3, uniform_family(3, 2), 2, 3), SearchConstraints(require_nonintersecting=True))
    assert rep.verdict["status"] == "INFEASIBLE" and rep.optimum == 0 and rep.extremal == ()


def test_constraint_validation():
    with pytest.raises(ArgumentError):
        max_family(conflicts_of(3, uniform_family(3, 2), 2, 3), SearchConstraints(max_member_size=4))
    with pytest.raises(ArgumentError):
        max_family(conflicts_of(3, uniform_family(3, 2), 2, 3), threads=0)


def test_search_matches_naive_oracle():
    rng = random.Random(42)
    for _ in range(120):
        n = rng.randint(3, 5)
        masks = rng.sample(range(1 << n), rng.randint(1, min(1 << n, 14)))
        d, s, t = rng.choice((2, 3, 4)), rng.randint(0, n), rng.choice((1, 2))
        cons = SearchConstraints(rng.random() < 0.3, rng.random() < 0.3, rng.choice((None, rng.randint(0, n))))
        pool = SetFamily(n, masks)
        for sym in (True, False):
            rep = max_family(conflicts_of(n, pool, d, s, t), cons, use_symmetry=sym)
            got = rep.optimum if rep.verdict["status"] == "SOLVED" else -1
            want = o.naive_max_family(o.fam(masks), n, d, s, t, cons.require_stable,
                                      cons.require_nonintersecting, cons.max_member_size)
            assert got == want[0]
            if not sym:
                assert rep.verdict["optima_found"] == want[1]
            for f in rep.labeled:
                assert len(f) == rep.optimum and o.is_ci(o.fam(f.masks), n, d, s, t)
                if cons.require_stable:
                    assert is_stable(f)


def test_extremal_list_is_canonical_sorted_and_complete():
    rng = random.Random(43)
    for _ in range(40):
        n = rng.randint(3, 5)
        masks = rng.sample(range(1 << n), rng.randint(1, min(1 << n, 12)))
        cs = conflicts_of(n, SetFamily(n, masks), 2, rng.randint(1, n))
        rep = max_family(cs, use_symmetry=False)
        want = {canonical_form(f).masks for f in rep.labeled}
        got = [f.masks for f in rep.extremal]
        assert sorted(set(got)) == got and set(got) == want
        assert all(canonical_form(f) == f for f in rep.extremal)


def test_optimum_is_monotone_in_s():
    rng = random.Random(44)
    for _ in range(30):
        n = rng.randint(3, 5)
        pool = SetFamily(n, rng.sample(range(1 << n), rng.randint(1, min(1 << n, 16))))
        d, t = rng.choice((2, 3)), rng.choice((1, 2))
        opts = [max_family(conflicts_of(n, pool, d, s, t)).optimum for s in range(0, n + 1)]
        assert opts == sorted(opts, reverse=True)


def test_truncation_flag():
    # the empty condition admits every subset; with one optimum kept the list is truncated
    cs = conflicts_of(4, uniform_family(4, 2), 2, 0)
    rep = max_family(cs, use_symmetry=False, max_optima=1)
    assert rep.optimum == 6 and rep.verdict["optima_found"] == 1
    cs = conflicts_of(4, uniform_family(4, 1), 2, 2)
    rep = max_family(cs, use_symmetry=False, max_optima=2)
    assert rep.optimum == 1 and rep.verdict["optima_found"] == 4 and rep.extremal_truncated
    assert len(rep.labeled) == 2


# --- determinism and checkpoints -------------------------------------------------


def _instance():
    return conflicts_of(7, uniform_family(7, 3), 3, 6)


def test_thread_count_does_not_change_the_report():
    cs = _instance()
    one = max_family(cs)
    two = max_family(cs, threads=2)
    assert one.to_json(include_wall=False) == two.to_json(include_wall=False)
    assert one.nodes == two.nodes


def test_checkpoint_resume_reproduces_the_report(tmp_path):
    cs = _instance()
    full = max_family(cs)
    path = tmp_path / "run.ckpt"
    with pytest.raises(SearchInterrupted) as err:
        max_family(cs, checkpoint=path, stop_after_nodes=full.nodes // 3)
    assert err.value.nodes >= full.nodes // 3
    assert path.read_text().splitlines()[0] == CHECKPOINT_HEADER
    # resume in two more legs
    with pytest.raises(SearchInterrupted):
        resume_search(path, checkpoint=path, stop_after_nodes=2 * full.nodes // 3)
    done = resume_search(path)
    assert done.to_json(include_wall=False) == full.to_json(include_wall=False)


def test_periodic_checkpoints_do_not_change_the_result(tmp_path):
    cs = _instance()
    full = max_family(cs)
    path = tmp_path / "run.ckpt"
    rep = max_family(cs, checkpoint=path, checkpoint_every=max(1, full.nodes // 5))
    assert path.exists()
    assert rep.to_json(include_wall=False) == full.to_json(include_wall=False)
    # the last periodic snapshot also resumes to the same report
    assert resume_search(path).to_json(include_wall=False) == full.to_json(include_wall=False)


def test_checkpoint_argument_errors(tmp_path):
    cs = _instance()
    with pytest.raises(ArgumentError):
        max_family(cs, threads=2, checkpoint=tmp_path / "x")
    with pytest.raises(ArgumentError):
        max_family(cs, stop_after_nodes=5)
    with pytest.raises(ArgumentError):
        max_family(cs, checkpoint=tmp_path / "x", checkpoint_every=0)


@pytest.mark.parametrize(
    "text",
    ["", "setlab-checkpoint/2\n{}\n", "setlab-checkpoint/1\n{not json\n", "setlab-checkpoint/1\n{\"n\": 0}\n",
     "setlab-checkpoint/1\n{\"n\": 5}\n"],
)
def test_bad_checkpoints(tmp_path, text):
    path = tmp_path / "bad.ckpt"
    path.write_text(text)
    with pytest.raises(FormatError):
        resume_search(path)


# --- named checks ----------------------------------------------------------------


def _status(reps):
    return [r.verdict["status"] for r in reps]


def test_verify_statuses():
    assert _status(verify_theorem("stable-mubayi", 6, 3, 3)) == ["PASS"]
    assert _status(verify_theorem("frankl", [5, 6], 3, 3)) == ["PASS", "PASS"]
    assert _status(verify_theorem("prop42", [5, 6])) == ["PASS", "PASS"]
    assert _status(verify_theorem("thm62", 5, s=[3, 4, 5])) == ["PASS"] * 3
    assert _status(verify_theorem("thm71", 6, s=4, u=[2, 3])) == ["PASS", "PASS"]
    rep = verify_theorem("conj41", 7, 3, 3)[0]
    assert rep.verdict["status"] == "OPEN" and rep.verdict["bound"] == 4
    rep = verify_theorem("thm74", 6, s=6, u=4)[0]
    assert rep.verdict["status"] == "OPEN" and (rep.optimum, rep.verdict["bound"]) == (26, 25)


def test_verify_stable_mubayi_extremal_is_the_star():
    rep = verify_theorem("stable-mubayi", 6, 3, 3)[0]
    assert rep.optimum == 10 and [f.masks for f in rep.labeled] == [star(6, 3, 1).masks]


@pytest.mark.parametrize(
    "args",
    [
        ("mubayi", 4, 3, 3),
        ("nope", 5, 2),
        ("prop42", 6, 3),
        ("conj41", 5, 3, 3),
        ("thm62", 5, None, None, 6),
        ("thm71", 6, None, None, 5, 3),
        ("thm74", 6, None, None, 6, 3),
    ],
)
def test_verify_rejects_out_of_regime(args):
    with pytest.raises(ArgumentError):
        verify_theorem(*args)


def test_verify_validates_every_instance_first():
    with pytest.raises(ArgumentError):
        verify_theorem("mubayi", [9, 4], 3, 3)
