"""Hypothesis property tests for the invariants of each module."""

import itertools

from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracles as o
from setlab.constructions import katona_bound_check, star
from setlab.duality import duality_forward, duality_inverse
from setlab.errors import CapabilityError
from setlab.predicates import (
    ConditionParams,
    find_violating_cluster,
    is_conditionally_intersecting,
    is_d_wise_t_intersecting,
    iter_unstable_subfamilies,
)
from setlab.search import SearchConstraints, build_conflicts, max_family
from setlab.setfam import (
    SetFamily,
    ShiftPair,
    canonical_form,
    complement_family,
    format_family,
    is_stable,
    parse_family,
    relabel,
    shadow,
    shift_family,
    stabilize,
)


@st.composite
def families(draw, max_n=6, max_size=12):
    n = draw(st.integers(1, max_n))
    masks = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=max_size))
    return SetFamily(n, masks)


@st.composite
def uniform_families(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, n))
    layer = [m for m in range(1 << n) if m.bit_count() == k]
    chosen = draw(st.lists(st.sampled_from(layer), max_size=10))
    return SetFamily(n, chosen), k


@st.composite
def family_and_pair(draw, max_n=6):
    f = draw(families(max_n))
    assume(f.n >= 2)
    i, j = draw(st.permutations(range(1, f.n + 1)))[:2]
    return f, ShiftPair(i, j)


@st.composite
def params(draw, n):
    return ConditionParams(draw(st.integers(2, 4)), draw(st.integers(0, n)), draw(st.integers(1, 2)))


# --- family representation -------------------------------------------------------


@given(families())
def test_members_are_distinct_and_ordered(f):
    key = [(m.bit_count(), m) for m in f.masks]
    assert key == sorted(set(key))
    assert all(0 <= m < 1 << f.n for m in f.masks)


@given(families())
def test_text_format_round_trips(f):
    assert parse_family(format_family(f)) == f


@given(families(), st.randoms(use_true_random=False))
def test_canonical_form_is_a_relabeling_invariant(f, rng):
    assume(f.n <= 6)
    perm = list(range(1, f.n + 1))
    rng.shuffle(perm)
    g = relabel(f, perm)
    assert canonical_form(g) == canonical_form(f)
    assert o.isomorphic(o.fam(canonical_form(f).masks), o.fam(f.masks), f.n)


# --- shifting --------------------------------------------------------------------------


@given(family_and_pair())
def test_shift_preserves_count_and_sizes(fp):
    f, p = fp
    g = shift_family(f, p)
    assert len(g) == len(f)
    assert sorted(m.bit_count() for m in g.masks) == sorted(m.bit_count() for m in f.masks)
    assert set(o.fam(g.masks)) == set(o.shift_all(o.fam(f.masks), p.i, p.j))


@given(family_and_pair())
def test_shift_is_idempotent(fp):
    f, p = fp
    g = shift_family(f, p)
    assert shift_family(g, p) == g


@given(family_and_pair())
def test_shift_moves_weight_from_j_to_i(fp):
    f, p = fp
    g = shift_family(f, p)
    ib, jb = 1 << (p.i - 1), 1 << (p.j - 1)
    gained = sum(1 for m in g.masks if m & ib) - sum(1 for m in f.masks if m & ib)
    lost = sum(1 for m in f.masks if m & jb) - sum(1 for m in g.masks if m & jb)
    assert gained == lost >= 0
    # only sets that contain j and avoid i ever change
    assert {m for m in f.masks if not (m & jb and not m & ib)} <= set(g.masks)


@given(families())
def test_stabilize_reaches_a_stable_family_of_equal_profile(f):
    out, pairs = stabilize(f)
    assert is_stable(out)
    assert sorted(m.bit_count() for m in out.masks) == sorted(m.bit_count() for m in f.masks)
    if is_stable(f):
        assert out == f and pairs == []


# --- complements and shadows ------------------------------------------------------------


@given(families())
def test_complement_is_an_involution(f):
    c = complement_family(f)
    assert complement_family(c) == f and len(c) == len(f)


@given(families(), st.data())
def test_shadow_is_monotone_and_covers(f, data):
    ell = data.draw(st.integers(0, f.n))
    sub = SetFamily(f.n, f.masks[: len(f) // 2])
    sh = set(shadow(f, ell).masks)
    assert set(shadow(sub, ell).masks) <= sh
    assert all(any(m & a == m for a in f.masks) for m in sh)
    assert all(m.bit_count() == ell for m in sh)


@given(uniform_families(), st.data())
def test_shadow_bound_holds_for_t_intersecting_uniform_families(fk, data):
    f, k = fk
    assume(len(f) >= 1)
    t = data.draw(st.integers(1, k))
    members = o.fam(f.masks)
    assume(all(len(a & b) >= t for a, b in itertools.combinations(members, 2)))
    ell = data.draw(st.integers(k - t, k))
    assert katona_bound_check(f, t, ell).holds


# --- conditions -------------------------------------------------------------------------


@given(families(max_size=9), st.data())
def test_cluster_detection_matches_oracle(f, data):
    p = data.draw(params(f.n))
    w = find_violating_cluster(f, p)
    assert (w is None) == o.fast_is_ci(list(f.masks), p.d, p.s, p.t)
    if w is not None:
        assert w.union_size <= p.s and w.intersection_size <= p.t - 1


@given(families(max_size=9), st.data())
def test_condition_is_monotone_in_s_and_t(f, data):
    p = data.draw(params(f.n))
    if is_conditionally_intersecting(f, p):
        if p.s > 0:
            assert is_conditionally_intersecting(f, ConditionParams(p.d, p.s - 1, p.t))
        if p.t > 1:
            assert is_conditionally_intersecting(f, ConditionParams(p.d, p.s, p.t - 1))


@given(families(max_size=9), st.data())
def test_d_wise_intersecting_means_every_condition_holds(f, data):
    d, t = data.draw(st.integers(2, 4)), data.draw(st.integers(1, 2))
    if is_d_wise_t_intersecting(f, d, t):
        for s in range(f.n + 1):
            assert is_conditionally_intersecting(f, ConditionParams(d, s, t))


@given(st.integers(2, 7), st.data())
def test_stars_are_stable_and_intersecting(n, data):
    k = data.draw(st.integers(1, n - 1))
    f = star(n, k, 1)
    assert is_stable(f) and is_d_wise_t_intersecting(f, 3)


# --- duality ---------------------------------------------------------------------------


@settings(max_examples=100)
@given(families(max_n=5, max_size=10), st.data())
def test_duality_round_trips(f, data):
    p = data.draw(params(f.n))
    assume(f.n >= 2 and o.fast_is_ci(list(f.masks), p.d, p.s, p.t))
    for i, j in itertools.permutations(range(1, f.n + 1), 2):
        pair = ShiftPair(i, j)
        for combo in itertools.islice(iter_unstable_subfamilies(f, pair, p), 3):
            sub = [s for s in f if s.bits in combo]
            try:
                tr = duality_forward(sub, f, pair, p)
            except CapabilityError:
                assert all(i in a or j in a for a in sub)
                continue
            assert set(tr.output) <= set(f) and len(tr.output) == p.d
            assert tr.reverse_fixed == tr.swapped and tr.reverse_swapped == tr.fixed
            assert duality_inverse(tr, f, pair, p) == tr.input


# --- search ----------------------------------------------------------------------------


@settings(max_examples=60)
@given(families(max_n=5, max_size=12), st.data())
def test_search_matches_brute_force(pool, data):
    assume(len(pool) >= 1)
    p = data.draw(params(pool.n))
    stable = data.draw(st.booleans())
    rep = max_family(build_conflicts(pool.n, pool, p), SearchConstraints(require_stable=stable))
    want, _ = o.naive_max_family(o.fam(pool.masks), pool.n, p.d, p.s, p.t, stable)
    assert rep.optimum == want
    for fam in rep.extremal:
        assert len(fam) == want and is_conditionally_intersecting(fam, p)
