import itertools
import random

import pytest

import oracles as o
from setlab.errors import ArgumentError, CapabilityError, FormatError
from setlab.setfam import (
    ElementSet,
    SetFamily,
    ShiftPair,
    canonical_form,
    complement_family,
    elements_of,
    format_family,
    intersection_size,
    invariant_hash,
    is_isomorphic,
    is_stable,
    layered_family,
    mask_of,
    parse_family,
    power_family,
    relabel,
    shadow,
    shift_family,
    shift_set,
    slice_by_size,
    stabilize,
    uniform_family,
    union_size,
)

EXAMPLE = [[1, 3], [2, 4], [3, 5]]


def es(elems, n=5):
    return ElementSet.of(elems, n)


def fam(sets, n=5):
    return SetFamily.of(n, sets)


def lists(f):
    return f.as_lists()


# --- value types ----------------------------------------------------------


def test_element_set_bits_and_order():
    a = es([1, 3])
    assert a.bits == 0b101 and len(a) == 2 and list(a) == [1, 3]
    assert 3 in a and 2 not in a
    assert str(a) == "1,3"
    assert a.complement() == es([2, 4, 5])


@pytest.mark.parametrize("elems, n", [([0], 3), ([4], 3), ([1], 0), ([1], 65)])
def test_element_set_rejects_out_of_range(elems, n):
    with pytest.raises(ArgumentError):
        ElementSet.of(elems, n)


def test_family_dedupes_and_orders_by_size_then_mask():
    f = fam([[3, 5], [1], [2, 4], [1], [1, 3]])
    assert lists(f) == [[1], [1, 3], [2, 4], [3, 5]]
    assert len(f) == 4 and es([2, 4]) in f and es([2, 3]) not in f


def test_family_rejects_foreign_masks():
    with pytest.raises(ArgumentError):
        SetFamily(3, [0b1000])
    with pytest.raises(ArgumentError):
        SetFamily.from_sets(4, [es([1])])


def test_shift_pair_rules():
    with pytest.raises(ArgumentError):
        ShiftPair(2, 2)
    with pytest.raises(ArgumentError):
        ShiftPair(1, 6).check(5)
    assert ShiftPair(1, 2).reversed() == ShiftPair(2, 1)


def test_mask_helpers_round_trip():
    for m in range(64):
        assert mask_of(elements_of(m)) == m


# --- set algebra ------------------------------------------------------------


def test_union_size_examples():
    assert union_size([es([1, 3]), es([2, 4])]) == 4
    assert union_size([es([1, 2, 3])]) == 3
    assert union_size([es(a) for a in EXAMPLE]) == 5


def test_intersection_size_examples():
    assert intersection_size([es(a) for a in EXAMPLE]) == 0
    assert intersection_size([es([1, 2]), es([1, 3])]) == 1
    assert intersection_size([es([2, 4])]) == 2


@pytest.mark.parametrize("fn", [union_size, intersection_size])
def test_set_algebra_errors(fn):
    with pytest.raises(ArgumentError):
        fn([])
    with pytest.raises(ArgumentError):
        fn([es([1], 3), es([1], 4)])


# --- shifting ---------------------------------------------------------------


def test_shift_set_examples():
    f = fam(EXAMPLE)
    assert shift_set(es([2, 4]), f, ShiftPair(1, 2)) == es([1, 4])
    assert shift_set(es([1, 3]), f, ShiftPair(1, 2)) == es([1, 3])
    g = fam([[1, 2], [1, 3]])
    assert shift_set(es([1, 2]), g, ShiftPair(1, 2)) == es([1, 2])


def test_shift_set_requires_membership():
    with pytest.raises(ArgumentError):
        shift_set(es([1, 2]), fam(EXAMPLE), ShiftPair(1, 2))


def test_shift_family_examples():
    assert lists(shift_family(fam(EXAMPLE), ShiftPair(1, 2))) == [[1, 3], [1, 4], [3, 5]]
    g = fam([[1, 2], [1, 3]])
    assert shift_family(g, ShiftPair(1, 3)) == g
    h = fam([[2], [1]])
    assert shift_family(h, ShiftPair(1, 2)) == h


def test_shift_family_matches_oracle_exhaustively_small():
    n = 3
    for bits in range(1 << (1 << n)):
        f = SetFamily(n, [m for m in range(1 << n) if bits >> m & 1])
        for i, j in itertools.permutations(range(1, n + 1), 2):
            got = o.fam(shift_family(f, ShiftPair(i, j)).masks)
            assert set(got) == set(o.shift_all(o.fam(f.masks), i, j))


def test_is_stable_examples():
    assert is_stable(fam([[1, 2], [1, 3]]))
    assert not is_stable(fam(EXAMPLE))
    assert is_stable(SetFamily(5))


def test_is_stable_matches_oracle():
    rng = random.Random(3)
    for _ in range(500):
        n = rng.randint(1, 5)
        f = SetFamily(n, rng.sample(range(1 << n), rng.randint(0, 1 << n)))
        assert is_stable(f) == o.is_stable(o.fam(f.masks), n)


def test_stabilize_examples():
    g = fam([[1, 2], [1, 3]])
    assert stabilize(g) == (g, [])
    out, pairs = stabilize(SetFamily.of(3, [[2, 3]]))
    assert lists(out) == [[1, 2]] and pairs
    assert all(p.i < p.j for p in pairs)
    assert stabilize(SetFamily(4)) == (SetFamily(4), [])


def test_stabilize_replays_and_lands_on_stable():
    rng = random.Random(4)
    for _ in range(300):
        n = rng.randint(2, 6)
        f = SetFamily(n, rng.sample(range(1 << n), rng.randint(0, min(12, 1 << n))))
        out, pairs = stabilize(f)
        assert len(out) == len(f) and o.is_stable(o.fam(out.masks), n)
        # replaying the recorded shifts reproduces the result
        cur = o.fam(f.masks)
        for p in pairs:
            nxt = o.shift_all(cur, p.i, p.j)
            assert set(nxt) != set(cur)
            cur = nxt
        assert set(cur) == set(o.fam(out.masks))


# --- slices, complements, shadows -------------------------------------------


def test_slice_by_size_examples():
    assert lists(slice_by_size(SetFamily.of(3, [[1], [1, 2], [2, 3]]), 2)) == [[1, 2], [2, 3]]
    assert lists(slice_by_size(SetFamily.of(3, [[1], [1, 2]]), 3)) == []
    assert lists(slice_by_size(power_family(3), 2)) == [[1, 2], [1, 3], [2, 3]]
    with pytest.raises(ArgumentError):
        slice_by_size(power_family(3), 4)


def test_complement_family_examples():
    assert lists(complement_family(SetFamily.of(3, [[1, 2]]))) == [[3]]
    assert complement_family(SetFamily(3)) == SetFamily(3)
    f = fam(EXAMPLE)
    assert complement_family(complement_family(f)) == f


def test_shadow_examples():
    assert lists(shadow(SetFamily.of(3, [[1, 2], [2, 3]]), 1)) == [[1], [2], [3]]
    assert lists(shadow(uniform_family(3, 2), 1)) == [[1], [2], [3]]
    assert lists(shadow(SetFamily.of(3, [[1, 2, 3]]), 3)) == [[1, 2, 3]]
    for ell in (-1, 4):
        with pytest.raises(ArgumentError):
            shadow(uniform_family(3, 2), ell)


def test_shadow_matches_subset_enumeration():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(1, 6)
        f = SetFamily(n, rng.sample(range(1 << n), rng.randint(0, min(10, 1 << n))))
        ell = rng.randint(0, n)
        want = {frozenset(c) for a in o.fam(f.masks) if len(a) >= ell for c in itertools.combinations(sorted(a), ell)}
        assert set(o.fam(shadow(f, ell).masks)) == want
        # the shadow of the complements, as used by the power-set bounds
        cf = complement_family(f)
        want_c = {frozenset(c) for a in o.fam(cf.masks) if len(a) >= ell for c in itertools.combinations(sorted(a), ell)}
        assert set(o.fam(shadow(cf, ell).masks)) == want_c


def test_shadow_identity_and_monotone():
    f = uniform_family(5, 3)
    assert shadow(f, 3) == f
    sub = SetFamily(5, f.masks[:4])
    assert set(shadow(sub, 2).masks) <= set(shadow(f, 2).masks)


def test_layered_pools():
    assert len(power_family(4)) == 16
    assert len(layered_family(5, [1, 3])) == 5 + 10
    with pytest.raises(ArgumentError):
        uniform_family(3, 4)


# --- canonical forms --------------------------------------------------------


def test_canonical_form_examples():
    assert lists(canonical_form(SetFamily.of(3, [[2, 3]]))) == [[1, 2]]
    star1 = SetFamily.of(5, [[1, z] for z in range(2, 6)])
    star5 = SetFamily.of(5, [[z, 5] for z in range(1, 5)])
    assert canonical_form(star1) == canonical_form(star5)


def test_canonical_form_constant_on_all_relabelings_of_the_example():
    f = fam(EXAMPLE)
    c = canonical_form(f)
    images = set()
    for perm in itertools.permutations(range(1, 6)):
        g = relabel(f, perm)
        images.add(g.masks)
        assert canonical_form(g) == c
    # it is the least image under the member order
    key = lambda masks: [(m.bit_count(), m) for m in masks]
    assert key(c.masks) == min(key(m) for m in images)


def test_canonical_form_decides_isomorphism():
    rng = random.Random(6)
    for _ in range(150):
        n = rng.randint(1, 5)
        f = SetFamily(n, rng.sample(range(1 << n), rng.randint(0, min(6, 1 << n))))
        g = SetFamily(n, rng.sample(range(1 << n), len(f)))
        assert is_isomorphic(f, g) == o.isomorphic(o.fam(f.masks), o.fam(g.masks), n)
        c = canonical_form(f)
        assert canonical_form(c) == c
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        h = relabel(f, perm)
        assert canonical_form(h) == c
        assert invariant_hash(h) == invariant_hash(f)


def test_canonical_form_limit():
    f = SetFamily.of(9, [[1, 2]])
    with pytest.raises(CapabilityError):
        canonical_form(f)
    assert canonical_form(f, limit=9).as_lists() == [[1, 2]]


# --- text format --------------------------------------------------------------


def test_format_round_trip():
    f = SetFamily.of(4, [[], [2], [1, 3, 4]])
    text = format_family(f)
    assert text == "n=4\n-\n2\n1,3,4\n"
    assert parse_family(text) == f
    assert parse_family("# note\nn=4\n\n1,3,4\n# x\n2\n-\n") == f


@pytest.mark.parametrize(
    "text, line",
    [
        ("1,2\n", 1),
        ("n=x\n", 1),
        ("n=0\n", 1),
        ("n=3\n1,4\n", 2),
        ("n=3\n2,1\n", 2),
        ("n=3\n1,a\n", 2),
        ("n=3\n1\n2\n1\n", 4),
    ],
)
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(FormatError) as err:
        parse_family(text)
    assert err.value.line == line


def test_parse_missing_header():
    with pytest.raises(FormatError):
        parse_family("# nothing\n")
