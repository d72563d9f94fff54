"""Words over the digit-and-flip alphabet, decorated trees, Farey-type maps.

A word is a finite sequence over {1..m-1, f} kept in normal form: digits
followed by at most one trailing f.  The rewrite moving f leftward past a
digit complements the digit (f j -> (m-j) f), and two f's cancel.  The three
embeddings send words to matrices acting on [0, oo] (target 'A'), matrices
acting on [0, 1/lam] (target 'B'), and affine maps of [0, 1] with
coefficients in Z[1/(m-1)] (target 'C').
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError
from .field import make_field
from .hecke import (
    BoundaryInterval,
    interval_image,
    letter_matrix,
    unit_interval,
)


class SelfdualStatus(str, Enum):
    LEAF_INVARIANCE = "SelfdualByLeafInvariance"
    FLIP = "SelfdualByFlip"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Word:
    """Normal-form monoid element: digits then an optional trailing f."""

    m: int
    digits: tuple
    fflag: bool

    @property
    def level(self):
        return len(self.digits)

    def tokens(self):
        return list(self.digits) + (["f"] if self.fflag else [])

    def __str__(self):
        return "".join(str(d) for d in self.digits) + ("f" if self.fflag else "")

    def __repr__(self):
        return f"Word({self.m}, {self!s})"


def normal_form(m, raw):
    """Rewrite a raw token sequence into the canonical digits-then-f form."""
    if m < 3:
        raise DomainError("m must be >= 3")
    digits = []
    flag = False
    for tok in raw:
        if tok == "f":
            flag = not flag
            continue
        j = int(tok)
        if not 1 <= j <= m - 1:
            raise DomainError(f"digit {j} out of range 1..{m - 1}")
        digits.append(m - j if flag else j)
    return Word(m, tuple(digits), flag)


def word(m, text):
    """Parse a juxtaposed-digit literal with optional trailing f, e.g. '21f'."""
    return normal_form(m, list(text.strip()))


def concat(u, w):
    """Monoid product of two normal-form words."""
    if u.m != w.m:
        raise DomainError("words over different alphabets")
    return normal_form(u.m, u.tokens() + w.tokens())


def sharp(w):
    """Order-reversing involution: digits complemented and reversed, f fixed."""
    toks = list(reversed([("f" if t == "f" else w.m - t) for t in w.tokens()]))
    return normal_form(w.m, toks)


def flip(w):
    """Conjugation by the interval flip: complements digits, keeps the flag."""
    return Word(w.m, tuple(w.m - d for d in w.digits), w.fflag)


@dataclass(frozen=True)
class AffineMap:
    """x -> a*x + b with exact rational coefficients."""

    a: Fraction
    b: Fraction

    def __call__(self, x):
        return self.a * x + self.b

    def compose(self, other):
        return AffineMap(self.a * other.a, self.a * other.b + self.b)

    def __repr__(self):
        return f"x -> {self.a}*x + {self.b}"


def _affine_letter(m, letter):
    if letter == "f":
        return AffineMap(Fraction(-1), Fraction(1))
    return AffineMap(Fraction(1, m - 1), Fraction(letter - 1, m - 1))


def embed(w, target):
    """Homomorphic image of a word: 'A' / 'B' give matrices, 'C' an affine map."""
    if target == "C":
        out = AffineMap(Fraction(1), Fraction(0))
        for tok in w.tokens():
            out = out.compose(_affine_letter(w.m, tok))
        return out
    if target not in ("A", "B"):
        raise DomainError(f"unknown embedding target {target!r}")
    spec = make_field(w.m)
    out = None
    for tok in w.tokens():
        mat = letter_matrix(spec, tok, target)
        out = mat if out is None else out * mat
    if out is None:
        from .hecke import identity
        out = identity(spec)
    return out


# ---------------------------------------------------------------------------
# decorated trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecoratedTree:
    """Leaf set of a complete finite (m-1)-ary subtree, some leaves f-decorated."""

    m: int
    leaves: tuple

    def __str__(self):
        return ",".join(str(w) for w in self.leaves)

    def leaf_strings(self):
        return [str(w) for w in self.leaves]


def validate_tree(m, leaves):
    """Check the leaf set and return the tree, or reject with the violated condition."""
    ws = []
    for leaf in leaves:
        if isinstance(leaf, Word):
            if leaf.m != m:
                raise DomainError("leaf alphabet does not match m")
            ws.append(normal_form(m, leaf.tokens()))
        else:
            ws.append(word(m, leaf))
    if not ws:
        raise DomainError("empty tree")
    stems = [w.digits for w in ws]
    if any(len(s) == 0 for s in stems):
        raise DomainError("tree reduced to the root")
    if len(set(stems)) != len(stems):
        raise DomainError("duplicate leaf")
    ordered = sorted(range(len(ws)), key=lambda i: stems[i])
    for a, b in zip(ordered, ordered[1:]):
        if stems[b][: len(stems[a])] == stems[a]:
            raise DomainError(f"prefix overlap between leaves {ws[a]} and {ws[b]}")
    total = sum(Fraction(1, (m - 1) ** len(s)) for s in stems)
    if total != 1:
        raise DomainError(f"completeness sum {total} != 1")
    return DecoratedTree(m, tuple(ws[i] for i in ordered))


def parse_tree(m, text):
    """Comma-separated leaf literals, e.g. '1,2f' or '111,112,12,21,221,222'."""
    return validate_tree(m, [t for t in text.split(",") if t.strip()])


def tree_power(tree, n):
    """Tree whose leaves are all n-fold monoid products of the given leaves."""
    if n < 1:
        raise DomainError("power must be >= 1")
    prods = list(tree.leaves)
    for _ in range(n - 1):
        prods = [concat(u, w) for u in prods for w in tree.leaves]
    return validate_tree(tree.m, prods)


def jump_tree(n):
    """m = 3 map accelerated by the (n-1)-truncated entrance time to [1/2, 1]."""
    if n < 1:
        raise DomainError("n must be >= 1")
    leaves = [Word(3, (1,) * n, False)]
    leaves += [Word(3, (1,) * q + (2,), True) for q in range(n)]
    return validate_tree(3, leaves)


def selfdual_sufficient(tree):
    """Certify selfduality when the leaf set is sharp-invariant or flips onto
    its sharp image; Unknown is not a proof of non-selfduality."""
    leaf_set = set(tree.leaves)
    sharp_set = {sharp(w) for w in tree.leaves}
    if sharp_set == leaf_set:
        return SelfdualStatus.LEAF_INVARIANCE
    if sharp_set == {flip(w) for w in tree.leaves}:
        return SelfdualStatus.FLIP
    return SelfdualStatus.UNKNOWN


# ---------------------------------------------------------------------------
# Farey-type maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FareyBranch:
    word: Word
    matrix: object  # GroupElement B_s
    domain: BoundaryInterval


class FareyMap:
    """Piecewise-Moebius expanding map on [0, 1/lam] from a decorated tree.

    Branch i is the inverse of B_{s_i} on its domain B_{s_i}[0, 1/lam];
    at shared endpoints the lower-indexed branch wins.
    """

    def __init__(self, tree):
        self.tree = tree
        self.field = make_field(tree.m)
        base = unit_interval(self.field)
        branches = []
        for w in tree.leaves:
            mat = embed(w, "B")
            branches.append(FareyBranch(w, mat, interval_image(mat, base)))
        branches.sort(key=lambda br: br.domain.lo.num)
        if branches[0].domain.lo.num != self.field.zero():
            raise DomainError("branch domains do not start at 0")
        if branches[-1].domain.hi.num != self.field.inv_lambda():
            raise DomainError("branch domains do not end at 1/lam")
        for left, right in zip(branches, branches[1:]):
            if left.domain.hi.num != right.domain.lo.num:
                raise DomainError("branch domains do not tile [0, 1/lam]")
        self.branches = tuple(branches)

    def branch_index(self, x):
        """Index of the branch whose closed domain contains x (lower wins)."""
        for i, br in enumerate(self.branches):
            if (br.domain.hi.num - x).sign() >= 0:
                if (x - br.domain.lo.num).sign() >= 0:
                    return i
                break
        raise DomainError("point outside [0, 1/lam]")

    def apply(self, x):
        """Evaluate the map: returns (branch index, image)."""
        x = self.field.from_rational(x) if not hasattr(x, "coeffs") else x
        i = self.branch_index(x)
        return i, self.branches[i].matrix.inverse().apply(x)

    def __repr__(self):
        return f"FareyMap(m={self.tree.m}, leaves={self.tree})"


@lru_cache(maxsize=None)
def _farey_map_cached(tree):
    return FareyMap(tree)


def farey_map(tree):
    return _farey_map_cached(tree)


@lru_cache(maxsize=None)
def full_tree(m):
    """The undecorated full-branch tree {1, ..., m-1}."""
    return validate_tree(m, [Word(m, (j,), False) for j in range(1, m)])
