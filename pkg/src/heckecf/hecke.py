"""Extended Hecke group elements and their boundary action.

Group elements are sign-normalized 2x2 matrices over Z[lam] with determinant
+-1; the canonical representative has its first nonzero row-major entry
positive, so projective classes have unique representations and hash/compare
exactly.  Boundary points are projective pairs over Q(lam), intervals are
ordered pairs of such points inside [0, 1/lam] or [0, oo].
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .errors import DomainError
from .field import AlgebraicNumber, FieldSpec, make_field

GENERATOR_NAMES = ("L", "S", "F", "R")


def _as_element(spec, v):
    if isinstance(v, AlgebraicNumber):
        if v.spec != spec:
            raise DomainError("mixed-field operands")
        return v
    return spec.from_rational(Fraction(v))


# ---------------------------------------------------------------------------
# projective points and boundary intervals
# ---------------------------------------------------------------------------

class ProjectivePoint:
    """Point of the projective line over Q(lam): a value or infinity."""

    __slots__ = ("spec", "num", "den")

    def __init__(self, spec, num, den):
        num = _as_element(spec, num)
        den = _as_element(spec, den)
        if num.is_zero() and den.is_zero():
            raise DomainError("projective point needs a nonzero coordinate")
        if den.is_zero():
            num, den = spec.one(), spec.zero()
        else:
            num, den = num / den, spec.one()
        self.spec = spec
        self.num = num
        self.den = den

    @classmethod
    def infinity(cls, spec):
        return cls(spec, 1, 0)

    @property
    def is_infinite(self):
        return self.den.is_zero()

    def value(self):
        if self.is_infinite:
            raise DomainError("point at infinity has no finite value")
        return self.num

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if self.is_infinite or other.is_infinite:
            return self.is_infinite and other.is_infinite
        return self.num == other.num

    def __hash__(self):
        return hash(("pp", self.spec.m, self.is_infinite or self.num))

    def _cmp(self, other):
        # total order on [0, oo]: finite points by value, infinity greatest
        if self.is_infinite:
            return 0 if other.is_infinite else 1
        if other.is_infinite:
            return -1
        return (self.num - other.num).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float("inf") if self.is_infinite else float(self.num)

    def __repr__(self):
        return "oo" if self.is_infinite else f"{self.num}"


class BoundaryInterval:
    """Closed interval [lo, hi] on the boundary, lo <= hi, hi possibly infinite."""

    __slots__ = ("spec", "lo", "hi")

    def __init__(self, lo, hi):
        if lo.spec != hi.spec:
            raise DomainError("mixed-field endpoints")
        if lo > hi:
            raise DomainError("interval endpoints out of order")
        if lo.is_infinite:
            raise DomainError("left endpoint must be finite")
        self.spec = lo.spec
        self.lo = lo
        self.hi = hi

    @classmethod
    def from_values(cls, spec, lo, hi):
        return cls(ProjectivePoint(spec, lo, 1), ProjectivePoint(spec, hi, 1))

    def length(self):
        if self.hi.is_infinite:
            raise DomainError("infinite interval has no length")
        return self.hi.num - self.lo.num

    def contains(self, p):
        if isinstance(p, ProjectivePoint):
            return self.lo <= p <= self.hi
        x = _as_element(self.spec, p)
        if self.hi.is_infinite:
            return (x - self.lo.num).sign() >= 0
        return (x - self.lo.num).sign() >= 0 and (self.hi.num - x).sign() >= 0

    @property
    def is_degenerate(self):
        return (not self.hi.is_infinite) and self.lo.num == self.hi.num

    def __eq__(self, other):
        if not isinstance(other, BoundaryInterval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash(("bi", self.lo, self.hi))

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


def unit_interval(spec):
    """[0, 1/lam], the domain of the unit-picture maps."""
    return BoundaryInterval.from_values(spec, 0, spec.inv_lambda())


def ray_interval(spec):
    """[0, oo], the domain of the base-picture maps."""
    return BoundaryInterval(ProjectivePoint(spec, 0, 1), ProjectivePoint.infinity(spec))


# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------

class GroupElement:
    """Sign-normalized matrix (a b; c d) over Z[lam] with det = +-1."""

    __slots__ = ("spec", "a", "b", "c", "d", "det")

    def __init__(self, spec, a, b, c, d):
        a, b, c, d = (_as_element(spec, v) for v in (a, b, c, d))
        det = a * d - b * c
        if det == 1:
            idet = 1
        elif det == -1:
            idet = -1
        else:
            raise DomainError(f"determinant must be +-1, got {det}")
        for v in (a, b, c, d):
            if any(co.denominator != 1 for co in v.coeffs):
                raise DomainError("entries must lie in Z[lam]")
        for v in (a, b, c, d):
            s = v.sign()
            if s:
                if s < 0:
                    a, b, c, d = -a, -b, -c, -d
                break
        self.spec = spec
        self.a, self.b, self.c, self.d = a, b, c, d
        self.det = idet

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def compose(self, other):
        if other.spec != self.spec:
            raise DomainError("mixed-field operands")
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return GroupElement(self.spec, a * e + b * g, a * f + b * h,
                            c * e + d * g, c * f + d * h)

    __mul__ = compose

    def inverse(self):
        # the adjugate is the projective inverse for either determinant
        return GroupElement(self.spec, self.d, -self.b, -self.c, self.a)

    def transpose(self):
        return GroupElement(self.spec, self.a, self.c, self.b, self.d)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = identity(self.spec)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def apply(self, x):
        """Boundary action on a finite value; raises if the image is infinite."""
        x = _as_element(self.spec, x)
        den = self.c * x + self.d
        if den.is_zero():
            raise DomainError("image is the point at infinity")
        return (self.a * x + self.b) / den

    def apply_point(self, p):
        if not isinstance(p, ProjectivePoint):
            return ProjectivePoint(self.spec, self.apply(p), 1)
        return ProjectivePoint(self.spec,
                               self.a * p.num + self.b * p.den,
                               self.c * p.num + self.d * p.den)

    def derivative_at(self, x):
        """Signed derivative det/(cx+d)^2 of the boundary action at a finite x."""
        x = _as_element(self.spec, x)
        den = self.c * x + self.d
        if den.is_zero():
            raise DomainError("derivative undefined at the pole")
        return self.spec.from_rational(self.det) / (den * den)

    def is_identity(self):
        return (self.b.is_zero() and self.c.is_zero()
                and self.a == self.d and self.a == self.spec.one())

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return (self.spec == other.spec and self.det == other.det
                and self.entries == other.entries)

    def __hash__(self):
        return hash(("ge", self.spec.m, self.det, self.entries))

    def __repr__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]] (det {self.det:+d})"


def identity(spec):
    return GroupElement(spec, 1, 0, 0, 1)


@lru_cache(maxsize=None)
def _generator_cached(m, name):
    spec = make_field(m)
    lam = spec.lam()
    if name == "L":
        return GroupElement(spec, 1, 0, lam, 1)
    if name == "S":
        return GroupElement(spec, 0, -1, 1, 0)
    if name == "F":
        return GroupElement(spec, 0, 1, 1, 0)
    if name == "R":
        # R = L^-1 S
        return GroupElement(spec, 0, -1, 1, lam)
    raise DomainError(f"unknown generator {name!r}; expected one of {GENERATOR_NAMES}")


def generator(spec, name):
    """The matrices L, S, F of the group presentation, and R = L^-1 S."""
    return _generator_cached(spec.m, name)


@lru_cache(maxsize=None)
def _letter_matrix_a(m, letter):
    """A_j = S R^-j for digits, A_f = F."""
    spec = make_field(m)
    if letter == "f":
        return generator(spec, "F")
    j = letter
    if not 1 <= j <= m - 1:
        raise DomainError(f"digit {j} out of range 1..{m - 1}")
    r_inv = generator(spec, "R").inverse()
    return generator(spec, "S") * r_inv ** j


@lru_cache(maxsize=None)
def _letter_matrix_b(m, letter):
    """B_s = L A_s L^-1, acting on [0, 1/lam]."""
    spec = make_field(m)
    ell = generator(spec, "L")
    return ell * _letter_matrix_a(m, letter) * ell.inverse()


def letter_matrix(spec, letter, picture):
    """Matrix of a single alphabet letter (digit or 'f') in picture 'A' or 'B'."""
    if picture == "A":
        return _letter_matrix_a(spec.m, letter)
    if picture == "B":
        return _letter_matrix_b(spec.m, letter)
    raise DomainError(f"unknown picture {picture!r}")


# spec-level operation aliases ------------------------------------------------

def compose(g, h):
    return g.compose(h)


def inverse(g):
    return g.inverse()


def transpose(g):
    return g.transpose()


def moebius_apply(g, p):
    """Action on the ideal boundary; identical for det +1 and det -1."""
    return g.apply_point(p)


def interval_image(g, iv):
    """Image interval of iv under g, endpoints swapped when g reverses order.

    Requires the pole of g to stay out of the interior of iv, and the image
    to be an honest interval of the [0, oo] picture (no wrap through oo).
    """
    if g.spec != iv.spec:
        raise DomainError("mixed-field operands")
    if not g.c.is_zero():
        pole = -g.d / g.c
        above_lo = (pole - iv.lo.num).sign() > 0
        below_hi = iv.hi.is_infinite or (iv.hi.num - pole).sign() > 0
        if above_lo and below_hi:
            raise DomainError("pole inside interval")
    p1 = g.apply_point(iv.lo)
    p2 = g.apply_point(iv.hi)
    out = BoundaryInterval(p1, p2) if p1 <= p2 else BoundaryInterval(p2, p1)
    if not iv.is_degenerate:
        mid = iv.lo.num + 1 if iv.hi.is_infinite else (iv.lo.num + iv.hi.num) / 2
        if not out.contains(g.apply_point(mid)):
            raise DomainError("image wraps through infinity")
    return out


def spectral_norm_sq(g):
    """Frobenius square t = a^2+b^2+c^2+d^2; then |g|_2^2 = (t + sqrt(t^2-4))/2."""
    a, b, c, d = g.entries
    return a * a + b * b + c * c + d * d


def spectral_norm_value(g):
    """|g|_2 as a float, from the exact Frobenius square."""
    t = float(spectral_norm_sq(g))
    s_sq = (t + (t * t - 4.0) ** 0.5) / 2.0
    return s_sq ** 0.5


def spectral_radius_2x2(g):
    """Spectral radius of the matrix as a float (eigenvalues via trace/det)."""
    tr = abs(float(g.a + g.d))
    disc = tr * tr - 4.0 * g.det
    if disc < 0:
        return 1.0
    return (tr + disc ** 0.5) / 2.0


def to_mpf(x, extra_bits=32):
    """Midpoint of a tight enclosure of x at the current mpmath precision."""
    if isinstance(x, AlgebraicNumber):
        bits = mpmath.mp.prec + extra_bits
        lo, hi = x.enclosure(bits)
        mid = (lo + hi) / 2
    else:
        mid = Fraction(x)
    return mpmath.mpf(mid.numerator) / mid.denominator


def hyperbolic_displacement(g, digits=20):
    """Distance d(i, g(i)) in the upper half-plane, as a float.

    Uses arcosh(1 + |z - i|^2 / (2 Im z)) with z = g(i); with det -1 the
    action is antiholomorphic, and both cases give z = (ac + bd + i)/(c^2+d^2).
    The rational data under the arcosh is assembled exactly before rounding.
    """
    a, b, c, d = g.entries
    u = a * c + b * d
    w = c * c + d * d
    dist_sq = u * u + (1 - w) * (1 - w)  # |z - i|^2 scaled by w^2
    with mpmath.workdps(max(digits, 20)):
        cosh_d = 1 + to_mpf(dist_sq) / (2 * to_mpf(w))
        return float(mpmath.acosh(cosh_d))


def so21_embed(g):
    """Explicit 3x3 embedding of a determinant +1 element into SO(2,1).

    Entries are exact field elements (halved integer combinations).
    """
    if g.det != 1:
        raise DomainError("embedding requires determinant +1")
    a, b, c, d = g.entries
    half = Fraction(1, 2)
    return (
        (a * d + b * c, a * c - b * d, a * c + b * d),
        (a * b - c * d, (a * a - b * b - c * c + d * d) * half,
         (a * a + b * b - c * c - d * d) * half),
        (a * b + c * d, (a * a - b * b + c * c - d * d) * half,
         (a * a + b * b + c * c + d * d) * half),
    )


def so21_inf_norm(mat):
    """Max row sum of absolute values, exact."""
    best = None
    for row in mat:
        s = abs(row[0]) + abs(row[1]) + abs(row[2])
        if best is None or s > best:
            best = s
    return best


def spectral_radius_3x3(mat):
    arr = np.array([[float(v) for v in row] for row in mat], dtype=float)
    return float(np.abs(np.linalg.eigvals(arr)).max())


def cylinder(spec, digits_word):
    """Cylinder interval J_w = B_w[0, 1/lam] for a digit word, with exact length.

    The endpoints come from the columns of L * A_w: with A_w = (a b; c d) the
    cylinder is [b/(lam b + d), a/(lam a + c)] and its length is
    1/((lam a + c)(lam b + d)).
    """
    word = tuple(digits_word)
    if not word:
        raise DomainError("cylinder needs a nonempty word")
    prod = identity(spec)
    for j in word:
        prod = prod * _letter_matrix_a(spec.m, int(j))
    a, b, c, d = prod.entries
    lam = spec.lam()
    lo = b / (lam * b + d)
    hi = a / (lam * a + c)
    length = 1 / ((lam * a + c) * (lam * b + d))
    return BoundaryInterval.from_values(spec, lo, hi), length
