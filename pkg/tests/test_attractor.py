import random
from fractions import Fraction

import pytest

from heckecf.attractor import (
    HINT_COUNTABLE,
    HINT_FINITE,
    HINT_FRACTAL,
    IntervalUnion,
    attractor_cover,
    component_census,
    components_disjointness,
    cover_at_level,
    dual_alphabet,
    dual_map,
    dual_matrices,
    hutchinson_step,
    overlap_measure,
)
from heckecf.errors import DomainError
from heckecf.field import make_field
from heckecf.hecke import identity, interval_image, letter_matrix, unit_interval
from heckecf.symbolic import full_tree, jump_tree, parse_tree, tree_power

SIX_LEAF = "111,112,12,21,221,222"


def test_interval_union_normalization():
    f = make_field(3)
    q = f.from_rational
    u = IntervalUnion.build(f, [(q(Fraction(1, 2)), q(Fraction(2, 3))),
                                (q(Fraction(2, 3)), q(1)),
                                (q(0), q(Fraction(1, 4)))])
    assert u.components == 2
    assert u.length() == Fraction(3, 4)
    assert u.contains(q(Fraction(3, 4)))
    assert not u.contains(q(Fraction(3, 8)))


def test_hutchinson_step_examples():
    f3 = make_field(3)
    b2 = letter_matrix(f3, 2, "B")
    b2f = b2 * letter_matrix(f3, "f", "B")
    base = IntervalUnion.from_boundary(unit_interval(f3))
    step1 = hutchinson_step([b2, b2f], base)
    assert step1.float_pairs() == [(0.5, 1.0)]
    assert hutchinson_step([identity(f3)], base) == base
    assert hutchinson_step([b2, b2f], step1) == step1


def test_attractor_farey():
    res = attractor_cover(parse_tree(3, "1,2f"))
    assert res.status == "ExactFixedPoint"
    assert res.level <= 3
    assert res.cover.float_pairs() == [(0.5, 1.0)]
    # one further step reproduces the cover exactly
    assert hutchinson_step(dual_matrices(res.tree), res.cover) == res.cover


def test_attractor_golden():
    f5 = make_field(5)
    lam = f5.lam()
    res = attractor_cover(parse_tree(5, "1,2f,3,4f"))
    assert res.status == "ExactFixedPoint"
    expected = IntervalUnion.build(
        f5, [((2 * lam - 1) / 5, f5.inv_lambda()), ((lam - 1) / 2, 2 - lam)])
    assert res.cover == expected


def test_attractor_jump3_components():
    res = attractor_cover(jump_tree(3), 8)
    assert res.status == "CoverOnly"
    f3 = make_field(3)
    comps = set(res.cover.intervals)
    for k in range(5):
        lo = f3.from_rational(Fraction(3 * k + 1, 3 * k + 2))
        hi = f3.from_rational(Fraction(3 * k + 2, 3 * k + 3))
        assert (lo, hi) in comps
    # the extra mass past the true components shrinks with the level
    true_len = sum(Fraction(1, (3 * k + 2) * (3 * k + 3)) for k in range(2000))
    lens = [cover_at_level(jump_tree(3), lvl).length().as_fraction()
            for lvl in (4, 6, 8)]
    assert lens[0] > lens[1] > lens[2] > true_len


def test_covers_nested_and_full_tree_fixed():
    for text, m in (("1,2f", 3), (SIX_LEAF, 3), ("1,2f,3,4f", 5)):
        tree = parse_tree(m, text)
        covers = [cover_at_level(tree, lvl) for lvl in range(5)]
        for big, small in zip(covers, covers[1:]):
            assert small.issubset(big)
    res = attractor_cover(full_tree(3))
    assert res.status == "ExactFixedPoint"
    assert res.cover == IntervalUnion.from_boundary(unit_interval(make_field(3)))
    assert res.component_history[0] == (0, 1)


def test_component_census():
    assert component_census(attractor_cover(parse_tree(3, "1,2f"))).hint == HINT_FINITE
    rep5 = component_census(attractor_cover(parse_tree(5, "1,2f,3,4f"), 6))
    assert rep5.stabilized and rep5.counts[-1] == 2
    six = component_census(attractor_cover(parse_tree(3, SIX_LEAF), 6))
    assert six.hint == HINT_FRACTAL
    counts = six.counts
    assert all(a < b for a, b in zip(counts[1:], counts[2:]))
    jump = component_census(attractor_cover(jump_tree(3), 10))
    assert jump.hint == HINT_COUNTABLE
    assert "not a proof" in jump.note


def test_dual_map_farey():
    tree = parse_tree(3, "1,2f")
    res = attractor_cover(tree)
    dual = dual_map(tree, res)
    assert [str(b.word) for b in dual.branches] == ["2", "2f"]
    assert dual.branches[0].domain.float_pairs() == [(2 / 3, 1.0)]
    assert dual.branches[1].domain.float_pairs() == [(0.5, 2 / 3)]
    i, y = dual.apply(make_field(3).from_rational(Fraction(3, 5)))
    assert i == 1
    with pytest.raises(DomainError):
        dual_map(parse_tree(3, "1,2"), res)


def test_dual_map_golden_branch_order():
    tree = parse_tree(5, "1,2f,3,4f")
    res = attractor_cover(tree)
    dual = dual_map(tree, res)
    assert [str(b.word) for b in dual.branches] == ["4", "2f", "2", "4f"]
    for br in dual.branches:
        assert br.domain.issubset(res.cover)


def test_dual_branch_inverse_roundtrip():
    rng = random.Random(99)
    tree = parse_tree(5, "1,2f,3,4f")
    res = attractor_cover(tree)
    dual = dual_map(tree, res)
    f5 = make_field(5)
    for _ in range(25):
        y = f5.inv_lambda() * Fraction(rng.randint(1, 999), 1000)
        for i, br in enumerate(dual.branches):
            img = br.matrix.apply(y)
            j, back = dual.apply(img)
            if j == i:
                assert back == y


def test_dual_map_gap_error():
    tree = jump_tree(3)
    res = attractor_cover(tree, 6)
    dual = dual_map(tree, res)
    with pytest.raises(DomainError):
        dual.apply(make_field(3).from_rational(Fraction(7, 10)))  # in the gap


def test_overlap_measure():
    assert overlap_measure(parse_tree(3, "1,2f"), 3).is_zero()
    assert overlap_measure(parse_tree(5, "1,2f,3,4f"), 1).is_zero()
    six = parse_tree(3, SIX_LEAF)
    o1 = overlap_measure(six, 1)
    o2 = overlap_measure(six, 2)
    o3 = overlap_measure(six, 3)
    assert o1.sign() > 0
    assert (o1 - o2).sign() >= 0 and (o2 - o3).sign() >= 0


def test_components_disjointness():
    six = parse_tree(3, SIX_LEAF)
    assert components_disjointness(six, "1")
    assert components_disjointness(six, "16")
    assert not components_disjointness(six, "33")
    with pytest.raises(DomainError):
        components_disjointness(six, "17")
    with pytest.raises(DomainError):
        components_disjointness(six, "16", level=3)


def test_components_disjointness_oracle_level2():
    # oracle: exact pairwise intersection of all 36 level-2 cylinders
    six = parse_tree(3, SIX_LEAF)
    f3 = make_field(3)
    base = unit_interval(f3)
    alphabet = dual_alphabet(six)
    cyls = {}
    for i, g in enumerate(alphabet, start=1):
        for j, h in enumerate(alphabet, start=1):
            img = interval_image(g * h, base)
            cyls[(i, j)] = (img.lo.num, img.hi.num)
    for wv, (lo, hi) in cyls.items():
        expected = all(
            (whi - lo).sign() < 0 or (hi - wlo).sign() < 0
            for ww, (wlo, whi) in cyls.items() if ww != wv)
        got = components_disjointness(six, "".join(map(str, wv)))
        assert got == expected


def test_power_duality():
    tree = parse_tree(3, "1,2f")
    p2 = tree_power(tree, 2)
    res1 = attractor_cover(tree)
    res2 = attractor_cover(p2)
    assert res1.cover == res2.cover
    assert res2.status == "ExactFixedPoint"
    # composed dual branches agree as a set of matrices
    single = dual_matrices(tree)
    composed = {g * h for g in single for h in single}
    assert set(dual_matrices(p2)) == composed
    # covers of the power tree at level L equal covers of the tree at 2L
    six = parse_tree(3, SIX_LEAF)
    assert cover_at_level(tree_power(six, 2), 1) == cover_at_level(six, 2)
