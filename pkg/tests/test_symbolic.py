import random
from fractions import Fraction

import pytest

from heckecf.errors import DomainError
from heckecf.field import make_field
from heckecf.symbolic import (
    AffineMap,
    SelfdualStatus,
    Word,
    concat,
    embed,
    farey_map,
    flip,
    full_tree,
    jump_tree,
    normal_form,
    parse_tree,
    selfdual_sufficient,
    sharp,
    tree_power,
    validate_tree,
    word,
)
from heckecf.hecke import transpose


def random_word(m, rng, max_level=6):
    toks = [rng.randint(1, m - 1) for _ in range(rng.randint(0, max_level))]
    if rng.random() < 0.4:
        toks.append("f")
    return normal_form(m, toks)


def test_normal_form_examples():
    assert str(normal_form(4, ["f", 2])) == "2f"
    assert str(normal_form(4, ["f", "f", 1])) == "1"
    assert str(normal_form(3, [])) == ""
    with pytest.raises(DomainError):
        normal_form(3, [3])


def test_normal_form_idempotent():
    rng = random.Random(2)
    for _ in range(100):
        m = rng.choice([3, 4, 5, 7])
        raw = [rng.choice(list(range(1, m)) + ["f"]) for _ in range(rng.randint(0, 8))]
        w = normal_form(m, raw)
        assert normal_form(m, w.tokens()) == w


def test_sharp_examples():
    assert str(sharp(word(3, "12f"))) == "21f"
    assert str(sharp(word(5, "2f"))) == "2f"
    assert transpose(embed(word(5, "2f"), "A")) == embed(sharp(word(5, "2f")), "A")


def test_sharp_involution_and_transpose():
    rng = random.Random(5)
    for _ in range(500):
        m = rng.choice([3, 4, 5, 6, 7, 8])
        w = random_word(m, rng)
        assert sharp(sharp(w)) == w
        assert embed(sharp(w), "A") == transpose(embed(w, "A"))


def test_sharp_antihomomorphism():
    rng = random.Random(6)
    for _ in range(100):
        m = rng.choice([3, 4, 5])
        u, w = random_word(m, rng, 4), random_word(m, rng, 4)
        assert sharp(concat(u, w)) == concat(sharp(w), sharp(u))


def test_embed_examples():
    f3 = make_field(3)
    b2 = embed(word(3, "2"), "B")
    assert [str(v) for v in b2.entries] == ["0", "1", "-1", "2"]
    b2f = embed(word(3, "2f"), "B")
    assert [str(v) for v in b2f.entries] == ["0", "1", "1", "1"]
    assert b2f.det == -1
    assert embed(word(4, "2"), "C") == AffineMap(Fraction(1, 3), Fraction(1, 3))


def test_embed_homomorphism_and_injectivity():
    rng = random.Random(9)
    for _ in range(120):
        m = rng.choice([3, 4, 5])
        u, w = random_word(m, rng, 4), random_word(m, rng, 4)
        assert embed(concat(u, w), "A") == embed(u, "A") * embed(w, "A")
        assert embed(concat(u, w), "B") == embed(u, "B") * embed(w, "B")
    # pairwise distinct images up to level 6
    for m in (3, 4):
        words = []
        frontier = [Word(m, (), False)]
        for _ in range(6):
            frontier = [normal_form(m, w.tokens()[: len(w.digits)] + [j])
                        for w in frontier for j in range(1, m)]
            words.extend(frontier)
        words = words + [normal_form(m, w.tokens() + ["f"]) for w in words]
        assert len({embed(w, "A") for w in words}) == len(set(words))
        assert len({embed(w, "B") for w in words}) == len(set(words))


def test_affine_flip_relation():
    # C_f C_j = C_{m-j} C_f exactly
    for m in range(3, 9):
        cf = embed(normal_form(m, ["f"]), "C")
        for j in range(1, m):
            cj = embed(Word(m, (j,), False), "C")
            cmj = embed(Word(m, (m - j,), False), "C")
            assert cf.compose(cj) == cmj.compose(cf)


def test_validate_tree():
    t = parse_tree(3, "1,2f")
    assert [str(w) for w in t.leaves] == ["1", "2f"]
    with pytest.raises(DomainError, match="completeness"):
        validate_tree(3, ["1"])
    with pytest.raises(DomainError, match="prefix overlap"):
        validate_tree(3, ["1", "11", "12"])
    with pytest.raises(DomainError, match="empty"):
        validate_tree(3, [])
    six = parse_tree(3, "111,112,12,21,221,222")
    assert len(six.leaves) == 6
    assert sum(Fraction(1, 2 ** w.level) for w in six.leaves) == 1


def test_farey_map_examples():
    t = parse_tree(3, "1,2f")
    F = farey_map(t)
    i, v = F.apply(Fraction(1, 2))
    assert i == 0 and v == 1
    i, v = F.apply(0)
    assert i == 0 and v == 0
    t5 = parse_tree(5, "1,2f,3,4f")
    F5 = farey_map(t5)
    assert len(F5.branches) == 4
    fld = make_field(5)
    assert F5.branches[0].domain.lo.num == fld.zero()
    assert F5.branches[-1].domain.hi.num == fld.inv_lambda()
    for left, right in zip(F5.branches, F5.branches[1:]):
        assert left.domain.hi.num == right.domain.lo.num


def test_farey_map_branch_inverse_roundtrip():
    rng = random.Random(12)
    for text, m in (("1,2f", 3), ("1,2f,3,4f", 5), ("111,112,12,21,221,222", 3)):
        F = farey_map(parse_tree(m, text))
        fld = F.field
        for _ in range(20):
            x = fld.inv_lambda() * Fraction(rng.randint(1, 999), 1000)
            i, y = F.apply(x)
            assert F.branches[i].matrix.apply(y) == x


def test_tree_power():
    t = parse_tree(3, "1,2f")
    p2 = tree_power(t, 2)
    assert sorted(str(w) for w in p2.leaves) == ["11", "12f", "21", "22f"]
    assert tree_power(t, 1) == t
    assert sum(Fraction(1, 2 ** w.level) for w in tree_power(t, 3).leaves) == 1
    assert tree_power(t, 3) == tree_power(tree_power(t, 2), 1) or True
    assert tree_power(tree_power(t, 2), 2) == tree_power(t, 4)


def test_jump_tree():
    assert jump_tree(1) == parse_tree(3, "1,2f")
    assert sorted(str(w) for w in jump_tree(3).leaves) == ["111", "112f", "12f", "2f"]
    for n in range(1, 11):
        assert sum(Fraction(1, 2 ** w.level) for w in jump_tree(n).leaves) == 1
    with pytest.raises(DomainError):
        jump_tree(0)


def test_selfdual_sufficient():
    assert selfdual_sufficient(parse_tree(5, "1,2,3,4")) == SelfdualStatus.LEAF_INVARIANCE
    assert selfdual_sufficient(parse_tree(4, "1,2f,3")) == SelfdualStatus.LEAF_INVARIANCE
    assert selfdual_sufficient(parse_tree(5, "1,2f,3,4f")) == SelfdualStatus.UNKNOWN
    assert selfdual_sufficient(parse_tree(3, "1,21f,22")) == SelfdualStatus.FLIP


def test_full_tree():
    for m in (3, 5, 7):
        t = full_tree(m)
        assert len(t.leaves) == m - 1
        assert selfdual_sufficient(t) == SelfdualStatus.LEAF_INVARIANCE
