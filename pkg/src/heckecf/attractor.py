"""Dual IFS attractors by exact Hutchinson iteration from above.

Covers start at [0, 1/lam] and shrink monotonically: every branch of the
dual family maps the base interval into itself, so the iterates are nested
and each level is a certified superset of the attractor.  Iteration stops
early when two consecutive covers agree exactly; the classification offered
by the census is finite-level evidence, never a proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError
from .field import make_field
from .hecke import BoundaryInterval, interval_image, unit_interval
from .symbolic import embed, farey_map, sharp

DEFAULT_MAX_LEVEL = 8

HINT_FINITE = "FinitelyManyIntervals"
HINT_COUNTABLE = "CountableMix"
HINT_FRACTAL = "Fractal"

# census growth-factor threshold separating parabolic interval budding from
# multiplicative component splitting (finite-level heuristic)
_FRACTAL_RATIO = 1.4


class IntervalUnion:
    """Finite ordered union of closed intervals with exact endpoints.

    Intervals are sorted, pairwise disjoint, and touching intervals are
    merged; degenerate (single point) members are permitted.
    """

    __slots__ = ("spec", "intervals")

    def __init__(self, spec, intervals):
        self.spec = spec
        self.intervals = intervals

    @classmethod
    def build(cls, spec, pairs):
        items = sorted(((lo, hi) for lo, hi in pairs), key=lambda p: (p[0], p[1]))
        merged = []
        for lo, hi in items:
            if hi < lo:
                raise DomainError("interval endpoints out of order")
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        return cls(spec, tuple(merged))

    @classmethod
    def from_boundary(cls, iv):
        return cls.build(iv.spec, [(iv.lo.num, iv.hi.num)])

    @property
    def components(self):
        return len(self.intervals)

    def is_empty(self):
        return not self.intervals

    def length(self):
        total = self.spec.zero()
        for lo, hi in self.intervals:
            total = total + (hi - lo)
        return total

    def hull(self):
        if not self.intervals:
            raise DomainError("empty union has no hull")
        return BoundaryInterval.from_values(
            self.spec, self.intervals[0][0], self.intervals[-1][1])

    def contains(self, x):
        for lo, hi in self.intervals:
            if lo <= x <= hi:
                return True
        return False

    def intersection(self, other):
        out = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = a[i][0] if a[i][0] >= b[j][0] else b[j][0]
            hi = a[i][1] if a[i][1] <= b[j][1] else b[j][1]
            if hi >= lo:
                out.append((lo, hi))
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion.build(self.spec, out)

    def issubset(self, other):
        # components are separated by real gaps, so each interval of self
        # must sit inside a single component of other
        b = other.intervals
        j = 0
        for lo, hi in self.intervals:
            while j < len(b) and b[j][1] < lo:
                j += 1
            if j == len(b) or lo < b[j][0] or b[j][1] < hi:
                return False
        return True

    def image(self, g):
        """Image under a group element with all finite data.

        The denominator c*x + d is linear, so a consistent nonzero sign at
        both endpoints certifies that the pole misses the interval and the
        image is the honest interval between the endpoint images.
        """
        spec = self.spec
        if spec.degree == 1:
            a, b = g.a.coeffs[0], g.b.coeffs[0]
            c, d = g.c.coeffs[0], g.d.coeffs[0]
            pairs = []
            for lo, hi in self.intervals:
                lof, hif = lo.coeffs[0], hi.coeffs[0]
                den_lo, den_hi = c * lof + d, c * hif + d
                if den_lo == 0 or den_hi == 0 or (den_lo > 0) != (den_hi > 0):
                    raise DomainError("pole meets the interval")
                v1 = (a * lof + b) / den_lo
                v2 = (a * hif + b) / den_hi
                if v2 < v1:
                    v1, v2 = v2, v1
                pairs.append((spec.from_rational(v1), spec.from_rational(v2)))
            return IntervalUnion.build(spec, pairs)
        pairs = []
        for lo, hi in self.intervals:
            den_lo = g.c * lo + g.d
            den_hi = g.c * hi + g.d
            s1, s2 = den_lo.sign(), den_hi.sign()
            if s1 == 0 or s2 == 0 or s1 != s2:
                raise DomainError("pole meets the interval")
            v1 = (g.a * lo + g.b) / den_lo
            v2 = (g.a * hi + g.b) / den_hi
            if (v2 - v1).sign() < 0:
                v1, v2 = v2, v1
            pairs.append((v1, v2))
        return IntervalUnion.build(self.spec, pairs)

    def float_pairs(self):
        return [(float(lo), float(hi)) for lo, hi in self.intervals]

    def __eq__(self, other):
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self.spec == other.spec and self.intervals == other.intervals

    def __hash__(self):
        return hash(("iu", self.spec.m, self.intervals))

    def __repr__(self):
        return " u ".join(f"[{lo}, {hi}]" for lo, hi in self.intervals) or "empty"


@dataclass(frozen=True)
class AttractorResult:
    tree: object
    status: str  # "ExactFixedPoint" | "CoverOnly"
    cover: IntervalUnion
    level: int
    component_history: tuple  # of (level, component count)


@dataclass(frozen=True)
class DualBranch:
    word: object  # sharp image of the tree leaf
    matrix: object  # B_{sharp s}
    domain: IntervalUnion
    hull: BoundaryInterval


@dataclass(frozen=True)
class CensusReport:
    counts: tuple
    stabilized: bool
    hint: str
    note: str = "finite-level evidence only, not a proof"


def dual_matrices(tree):
    """The dual IFS: unit-picture matrices of the sharp images of the leaves."""
    return tuple(embed(sharp(w), "B") for w in tree.leaves)


def hutchinson_step(maps, u):
    """Union of the images of u under every map, merged and normalized."""
    pairs = []
    for g in maps:
        pairs.extend(u.image(g).intervals)
    return IntervalUnion.build(u.spec, pairs)


@lru_cache(maxsize=None)
def _cover_run(tree, max_level):
    """Covers from level 0 up to equality or max_level; shared by the ops."""
    spec = make_field(tree.m)
    base = IntervalUnion.from_boundary(unit_interval(spec))
    maps = dual_matrices(tree)
    for g in maps:
        if not base.image(g).issubset(base):
            raise DomainError("dual branch does not map [0, 1/lam] into itself")
    covers = [base]
    status = "CoverOnly"
    for _ in range(max_level):
        nxt = hutchinson_step(maps, covers[-1])
        if not nxt.issubset(covers[-1]):
            raise AssertionError("covers failed to nest")
        covers.append(nxt)
        if nxt == covers[-2]:
            status = "ExactFixedPoint"
            break
    return tuple(covers), status


def attractor_cover(tree, max_level=DEFAULT_MAX_LEVEL):
    """Iterate the dual Hutchinson operator from [0, 1/lam].

    Stops early with ExactFixedPoint when two consecutive covers coincide
    exactly; otherwise returns the level-max_level cover as CoverOnly.
    Levels past the default are opt-in: coefficient heights grow with depth.
    """
    if max_level < 1:
        raise DomainError("max_level must be >= 1")
    covers, status = _cover_run(tree, max_level)
    history = tuple((lvl, cov.components) for lvl, cov in enumerate(covers))
    return AttractorResult(tree=tree, status=status, cover=covers[-1],
                           level=len(covers) - 1, component_history=history)


def cover_at_level(tree, level):
    """The exact level-`level` cover (constant once the fixed point is hit)."""
    covers, _ = _cover_run(tree, max(level, 1))
    return covers[min(level, len(covers) - 1)]


def component_census(result):
    """Per-level component counts plus a labeled finite-level classification hint."""
    counts = tuple(c for _, c in result.component_history)
    stabilized = result.status == "ExactFixedPoint" or (
        len(counts) >= 3 and counts[-1] == counts[-2] == counts[-3])
    if stabilized:
        hint = HINT_FINITE
    else:
        ratio = counts[-1] / counts[-2] if counts[-2] else float("inf")
        hint = HINT_FRACTAL if ratio >= _FRACTAL_RATIO else HINT_COUNTABLE
    return CensusReport(counts=counts, stabilized=stabilized, hint=hint)


def dual_map(tree, result):
    """The dual map: branch i is the inverse of B_{sharp s_i} on its image of
    the cover; evaluation picks the minimum index whose closed domain contains
    the point."""
    if result.tree != tree:
        raise DomainError("attractor result belongs to a different tree")
    branches = []
    for w, mat in zip(tree.leaves, dual_matrices(tree)):
        dom = result.cover.image(mat)
        branches.append(DualBranch(word=sharp(w), matrix=mat, domain=dom,
                                   hull=dom.hull()))
    return DualMap(tree=tree, cover=result.cover, branches=tuple(branches))


@dataclass(frozen=True)
class DualMap:
    tree: object
    cover: IntervalUnion
    branches: tuple

    def branch_index(self, y):
        for i, br in enumerate(self.branches):
            if br.domain.contains(y):
                return i
        raise DomainError("point outside the dual branch domains")

    def apply(self, y):
        i = self.branch_index(y)
        return i, self.branches[i].matrix.inverse().apply(y)


def overlap_measure(tree, level):
    """Total length of pairwise intersections of the dual branch images of the
    level-`level` cover; tends to 0 when the strong open set condition holds."""
    cov = cover_at_level(tree, level)
    images = [cov.image(g) for g in dual_matrices(tree)]
    spec = cov.spec
    total = spec.zero()
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            total = total + images[i].intersection(images[j]).length()
    return total


# ---------------------------------------------------------------------------
# cylinder disjointness over the renamed dual alphabet
# ---------------------------------------------------------------------------

def dual_alphabet(tree):
    """Dual branches sorted by the image of the midpoint of [0, 1/lam].

    This is the renaming used for cylinder bookkeeping: index k (1-based)
    is the branch with the k-th smallest midpoint image; ties fall back to
    leaf order.
    """
    spec = make_field(tree.m)
    mid = spec.inv_lambda() / 2
    decorated = sorted(
        ((g.apply(mid), i, g) for i, g in enumerate(dual_matrices(tree))),
        key=lambda t: (t[0], t[1]))
    return tuple(g for _, _, g in decorated)


@lru_cache(maxsize=None)
def _cylinder_table(tree, level):
    """All level-`level` cylinders over the renamed alphabet, with word labels."""
    spec = make_field(tree.m)
    base = unit_interval(spec)
    alphabet = dual_alphabet(tree)
    out = {}

    def walk(prefix, mat):
        if len(prefix) == level:
            img = interval_image(mat, base) if mat is not None else base
            out[prefix] = (img.lo.num, img.hi.num)
            return
        for k, g in enumerate(alphabet, start=1):
            walk(prefix + (k,), g if mat is None else mat * g)

    walk((), None)
    return out


def components_disjointness(tree, v, level=None):
    """True iff the cylinder of the word v (over the renamed dual alphabet,
    digits 1..q) is disjoint from every other cylinder of the same level."""
    digits = tuple(int(ch) for ch in v)
    q = len(tree.leaves)
    if not digits:
        raise DomainError("empty cylinder word")
    if any(not 1 <= d <= q for d in digits):
        raise DomainError(f"cylinder digits must lie in 1..{q}")
    if level is None:
        level = len(digits)
    if level != len(digits):
        raise DomainError("level does not match the word length")
    table = _cylinder_table(tree, level)
    lo, hi = table[digits]
    for w, (wlo, whi) in table.items():
        if w == digits:
            continue
        if (whi - lo).sign() >= 0 and (hi - wlo).sign() >= 0:
            return False
    return True
