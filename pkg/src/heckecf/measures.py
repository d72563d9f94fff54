"""Invariant densities, natural-extension dynamics, orbits, Poincare sums.

Two coordinate pictures are supported.  In the unit picture the map acts on
[0, 1/lam] through the B matrices and the plane density is
(1 - lam x - lam y + (lam^2+1) x y)^-2; in the infinite picture the map acts
on [0, oo] through the A matrices and the density is (1 + x y)^-2, the
pullback of the geodesic-endpoint measure under (x, y) -> (x, S(y)).
Densities are reported unnormalized (the invariant measures are infinite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .attractor import attractor_cover, cover_at_level, dual_map, dual_matrices
from .errors import BudgetError, DomainError, PrecisionExhausted
from .field import AlgebraicNumber, make_field
from .hecke import identity, letter_matrix, spectral_norm_sq, to_mpf
from .symbolic import embed, farey_map, sharp, word

_POINCARE_MAX_LEN = 10
_POINCARE_WORD_BUDGET = 2_000_000


@dataclass(frozen=True)
class DensityContext:
    tree: object
    field: object
    picture: str  # "unit" | "infinite"
    farey: object
    result: object  # AttractorResult
    dual: object


@dataclass(frozen=True)
class ExtensionPoint:
    x: object
    y: object


@dataclass(frozen=True)
class OrbitResult:
    points: tuple  # of (float, float)
    itinerary: tuple  # branch indices chosen at each step
    mode: str  # "interval-verified float" | "exact"
    precision_bits: int


def density_context(tree, level=8, picture="unit"):
    if picture not in ("unit", "infinite"):
        raise DomainError(f"unknown picture {picture!r}")
    result = attractor_cover(tree, level)
    return DensityContext(tree=tree, field=make_field(tree.m), picture=picture,
                          farey=farey_map(tree), result=result,
                          dual=dual_map(tree, result))


def _as_float(v):
    if isinstance(v, AlgebraicNumber):
        return float(v)
    return float(v)


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

def eta_density(ctx, x, y):
    """Plane density of the natural extension at (x, y), unnormalized."""
    xf, yf = _as_float(x), _as_float(y)
    lam = float(ctx.field.lam())
    if ctx.picture == "unit":
        den = 1.0 - lam * xf - lam * yf + (lam * lam + 1.0) * xf * yf
    else:
        den = 1.0 + xf * yf
    if abs(den) < 1e-14:
        raise DomainError("degenerate density denominator at the boundary")
    return den ** -2


def nu_density(ctx, y):
    """Density of the dual-invariant measure at y."""
    yf = _as_float(y)
    if ctx.picture == "unit":
        lam = float(ctx.field.lam())
        den = (1.0 - lam * yf) * yf
    else:
        den = yf
    if abs(den) < 1e-14:
        raise DomainError("degenerate density denominator at the boundary")
    return 1.0 / den


def _eta_linear_coeffs(ctx, x):
    """A, B with the y-section of the plane density equal to (A - B y)^-2."""
    fld = ctx.field
    x = x if isinstance(x, AlgebraicNumber) else fld.from_rational(Fraction(x))
    lam = fld.lam()
    if ctx.picture == "unit":
        return 1 - lam * x, lam - (lam * lam + 1) * x
    return fld.one(), -x  # (1 + x y)^-2 = (A - B y)^-2 with B = -x


def _section_integral(spec, a_coef, b_coef, lo, hi):
    """Exact integral of (A - B y)^-2 over [lo, hi]."""
    if b_coef.is_zero():
        return (hi - lo) / (a_coef * a_coef)
    return (1 / (a_coef - b_coef * hi) - 1 / (a_coef - b_coef * lo)) / b_coef


def mu_density(ctx, x, level=None):
    """Marginal density at x: the plane density integrated in y over the
    level cover, in closed form per component.

    Returns (value, error_bound); the bound is the length of the mass shed
    between this level and the next one times the sup of the integrand, so
    the value is an upper estimate with a shrinking, explicitly reported
    defect.
    """
    if ctx.picture != "unit":
        raise DomainError("marginal integration is set up in the unit picture")
    level = ctx.result.level if level is None else level
    cover = cover_at_level(ctx.tree, level)
    nxt = cover_at_level(ctx.tree, level + 1)
    a_coef, b_coef = _eta_linear_coeffs(ctx, x)
    total = ctx.field.zero()
    sup = 0.0
    for lo, hi in cover.intervals:
        total = total + _section_integral(ctx.field, a_coef, b_coef, lo, hi)
        for endpoint in (lo, hi):
            den = float(a_coef - b_coef * endpoint)
            if abs(den) < 1e-12:
                raise DomainError("integrand pole on the cover boundary")
            sup = max(sup, den ** -2)
    shed = float(cover.length() - nxt.length())
    return float(total), shed * sup


def transfer_residual(ctx, side, point):
    """|sum_i h(branch_i(point)) |branch_i'(point)| - h(point)|.

    side "forward" uses the tree branches with h(x) = 1/(x(1 - lam x)) in the
    unit picture and 1/x in the infinite one (the exact invariant density of
    full trees); side "dual" uses the dual branches with the universally
    invariant density of the dual map, which has the same formula.
    """
    fld = ctx.field
    p = point if isinstance(point, AlgebraicNumber) else fld.from_rational(Fraction(point))
    lam = fld.lam()
    if side == "forward":
        words = [br.word for br in ctx.farey.branches]
    elif side == "dual":
        words = [sharp(w) for w in ctx.tree.leaves]
    else:
        raise DomainError(f"unknown side {side!r}")
    mats = [_picture_matrix(ctx, w) for w in words]
    with mpmath.workdps(50):
        if ctx.picture == "unit":
            def h(v):
                return 1 / (to_mpf(v) * to_mpf(1 - lam * v))
        else:
            def h(v):
                return 1 / to_mpf(v)

        acc = mpmath.mpf(0)
        for g in mats:
            img = g.apply(p)
            deriv = abs(to_mpf(g.derivative_at(p)))
            acc += h(img) * deriv
        return float(abs(acc - h(p)))


# ---------------------------------------------------------------------------
# natural extension
# ---------------------------------------------------------------------------

def _picture_matrix(ctx, leaf_word):
    return embed(leaf_word, "B" if ctx.picture == "unit" else "A")


def natural_extension_step(ctx, p, direction):
    """One step of the skew product: forward (F(x), dual-branch(y)),
    backward (branch(x), dual map(y)); exact inverses of each other."""
    if ctx.picture != "unit":
        raise DomainError("natural extension steps are set up in the unit picture")
    fld = ctx.field
    x = p.x if isinstance(p.x, AlgebraicNumber) else fld.from_rational(Fraction(p.x))
    y = p.y if isinstance(p.y, AlgebraicNumber) else fld.from_rational(Fraction(p.y))
    if direction == "forward":
        i, x_next = ctx.farey.apply(x)
        y_next = ctx.dual.branches[i].matrix.apply(y)
        return ExtensionPoint(x=x_next, y=y_next)
    if direction == "backward":
        i, y_prev = ctx.dual.apply(y)
        x_prev = ctx.farey.branches[i].matrix.apply(x)
        return ExtensionPoint(x=x_prev, y=y_prev)
    raise DomainError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# orbit simulation
# ---------------------------------------------------------------------------

def seed_preset(name):
    """Named exact seeds; 'cubic' is lam_7 - 1 paired with y = 1/2."""
    if name == "cubic":
        f7 = make_field(7)
        return ExtensionPoint(x=f7.lam() - 1, y=Fraction(1, 2))
    raise DomainError(f"unknown seed preset {name!r}")


def _orbit_exact(ctx, seed, count):
    """Exact orbit: map matrices must be rational (m = 3), the x seed may live
    in any exact field; branch decisions are exact sign evaluations."""
    fld = ctx.field
    if fld.degree != 1:
        raise DomainError("exact orbit needs rational map matrices (m = 3)")

    def rat_entries(g):
        return tuple(v.as_fraction() for v in g.entries)

    breakpoints = [br.domain.hi.num.as_fraction() for br in ctx.farey.branches[:-1]]
    fwd = [rat_entries(br.matrix.inverse()) for br in ctx.farey.branches]
    dual = [rat_entries(br.matrix) for br in ctx.dual.branches]

    x = seed.x
    y = Fraction(seed.y) if not isinstance(seed.y, Fraction) else seed.y
    if isinstance(x, (int, Fraction)):
        x = fld.from_rational(Fraction(x))
    points = []
    itinerary = []
    for _ in range(count):
        points.append((float(x), float(y)))
        i = 0
        for bp in breakpoints:
            if (x - bp).sign() > 0:
                i += 1
            else:
                break
        itinerary.append(i)
        a, b, c, d = fwd[i]
        x = (x * a + b) / (x * c + d)
        a, b, c, d = dual[i]
        y = (y * a + b) / (y * c + d)
    return OrbitResult(points=tuple(points), itinerary=tuple(itinerary),
                       mode="exact", precision_bits=0)


def _orbit_float(ctx, seed, count, precision_bits):
    """Fixed-precision orbit with a tracked error bound; every branch
    comparison must clear the bound by a margin or the run aborts."""
    fld = ctx.field
    with mpmath.workprec(precision_bits):
        eps = mpmath.mpf(2) ** (-precision_bits + 3)
        breakpoints = [to_mpf(br.domain.hi.num) for br in ctx.farey.branches[:-1]]

        def mat_mpf(g):
            return tuple(to_mpf(v) for v in g.entries)

        fwd = [mat_mpf(br.matrix.inverse()) for br in ctx.farey.branches]
        dual = [mat_mpf(br.matrix) for br in ctx.dual.branches]
        x = to_mpf(seed.x) if isinstance(seed.x, AlgebraicNumber) else \
            mpmath.mpf(Fraction(seed.x).numerator) / Fraction(seed.x).denominator
        y = to_mpf(seed.y) if isinstance(seed.y, AlgebraicNumber) else \
            mpmath.mpf(Fraction(seed.y).numerator) / Fraction(seed.y).denominator
        err = eps
        points = []
        itinerary = []
        for step in range(count):
            points.append((float(x), float(y)))
            i = 0
            for bp in breakpoints:
                if x > bp:
                    i += 1
                elif x < bp:
                    break
                else:
                    raise PrecisionExhausted(step)
            # margin check: the decision must survive the accumulated error
            for bp in breakpoints:
                if abs(x - bp) <= 2 * err:
                    raise PrecisionExhausted(step)
            itinerary.append(i)
            a, b, c, d = fwd[i]
            den = c * x + d
            x = (a * x + b) / den
            # first-order propagation of the error bound through the branch
            err = err * abs((a * d - b * c) / (den * den)) * (1 + 4 * eps) + 4 * eps
            a, b, c, d = dual[i]
            y = (a * y + b) / (c * y + d)
    return OrbitResult(points=tuple(points), itinerary=tuple(itinerary),
                       mode="interval-verified float", precision_bits=precision_bits)


def orbit(ctx, seed, count, precision_bits=256, mode="auto"):
    """Forward orbit of the natural extension, emitting (x, y) floats.

    mode 'exact' runs in exact arithmetic (rational map matrices only);
    'float' runs at fixed precision with verified branch decisions and
    raises PrecisionExhausted (with the step index) when a comparison
    cannot be certified; 'auto' picks exact when available.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    if ctx.picture != "unit":
        raise DomainError("orbits are set up in the unit picture")
    if mode == "auto":
        mode = "exact" if ctx.field.degree == 1 else "float"
    if mode == "exact":
        return _orbit_exact(ctx, seed, count)
    if mode == "float":
        return _orbit_float(ctx, seed, count, precision_bits)
    raise DomainError(f"unknown orbit mode {mode!r}")


# ---------------------------------------------------------------------------
# Poincare partial sums
# ---------------------------------------------------------------------------

def poincare_partial_sum(ctx, n):
    """S_k = sum of exp(-d(i, A_v(i))) over words v of length <= k in the
    leaf monoid, for k = 0..n; each term is 2/(t + sqrt(t^2-4)) with t the
    exact Frobenius square of the product."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if n > _POINCARE_MAX_LEN:
        raise BudgetError(f"word length capped at {_POINCARE_MAX_LEN}")
    q = len(ctx.tree.leaves)
    if sum(q ** k for k in range(n + 1)) > _POINCARE_WORD_BUDGET:
        raise BudgetError("word budget exceeded")
    gens = [embed(w, "A") for w in ctx.tree.leaves]

    def term(g):
        t = float(spectral_norm_sq(g))
        return 2.0 / (t + math.sqrt(t * t - 4.0)) if t > 2 else 1.0

    sums = [1.0]  # empty word contributes exp(0)
    frontier = [identity(ctx.field)]
    for _ in range(n):
        frontier = [g * h for g in frontier for h in gens]
        sums.append(sums[-1] + sum(term(g) for g in frontier))
    return sums
