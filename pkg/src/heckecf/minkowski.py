"""Minkowski conjugacy functions, their digit algorithms, and Hoelder data.

The conjugacy function of the field Q(lam_m) sends [0, 1/lam] to [0, 1],
carrying the full-branch itinerary of a point to the base-(m-1) radix value
of the shifted digit stream.  Its exact regularity is governed by the joint
spectral radius of the digit matrices, which a transposed-pair argument
pins to the largest single-letter spectral norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import BudgetError, DomainError
from .field import AlgebraicNumber
from .hecke import identity, letter_matrix, spectral_norm_sq, to_mpf
from .symbolic import embed, farey_map, full_tree

_JSR_MAX_N = 10
_JSR_PRODUCT_BUDGET = 26_000_000
_JSR_CHUNK = 2_500_000


@dataclass(frozen=True)
class DigitStream:
    digits: tuple
    exact_tail: bool  # point hit an interval endpoint: expansion ends constant


@dataclass(frozen=True)
class HoelderData:
    m: int
    t: AlgebraicNumber  # Frobenius square of the extremal digit matrix
    rho: float
    alpha: float
    rho_bounds: tuple
    alpha_bounds: tuple


@dataclass(frozen=True)
class JsrBounds:
    lower: float
    upper: float


def _coerce_point(spec, x):
    if isinstance(x, AlgebraicNumber):
        if x.spec != spec:
            raise DomainError("point from a different field")
        return x
    return spec.from_rational(Fraction(x))


def digits(spec, x, n):
    """First n digits of the full-branch itinerary of x in [0, 1/lam].

    At each step the branch whose closed domain contains the point is chosen
    (lower branch at shared endpoints) and the point is pulled back through
    the branch inverse.
    """
    x = _coerce_point(spec, x)
    fmap = farey_map(full_tree(spec.m))
    if x.sign() < 0 or (spec.inv_lambda() - x).sign() < 0:
        raise DomainError("point outside [0, 1/lam]")
    out = []
    hit_end = False
    for _ in range(n):
        i, x = fmap.apply(x)
        out.append(i + 1)
        if x.is_zero() or x == spec.inv_lambda():
            hit_end = True
    return DigitStream(digits=tuple(out), exact_tail=hit_end)


def evaluate(spec, x, n):
    """Rational q with |M(x) - q| <= (m-1)^-n: the shifted base-(m-1) radix
    value of the first n full-branch digits."""
    ds = digits(spec, x, n)
    base = spec.m - 1
    q = Fraction(0)
    scale = Fraction(1, base)
    for d in ds.digits:
        q += (d - 1) * scale
        scale /= base
    return q


def radix_digits(m, y, n):
    """Base-(m-1) digits of y in [0, 1] (values 1..m-1): terminating rationals
    take the representation that does not end in repeated (m-1), except y = 1
    which is all-(m-1)."""
    y = Fraction(y)
    if y < 0 or y > 1:
        raise DomainError("value outside [0, 1]")
    base = m - 1
    if y == 1:
        return (base,) * n
    out = []
    for _ in range(n):
        scaled = y * base
        d = int(scaled)  # floor; y < 1 keeps d <= base - 1
        out.append(d + 1)
        y = scaled - d
    return tuple(out)


def invert(spec, y, n):
    """Exact bracket around the preimage of y: the depth-n cylinder driven by
    the base-(m-1) digits of y."""
    from .hecke import BoundaryInterval, interval_image, unit_interval

    ds = radix_digits(spec.m, y, n)
    iv = unit_interval(spec)
    for d in reversed(ds):
        iv = interval_image(letter_matrix(spec, d, "B"), iv)
    return iv


def conjugacy_residual(spec, w, x, n):
    """|M(B_w x) - C_w(M x)| at working depth n; the contract is 2(m-1)^-n."""
    x = _coerce_point(spec, x)
    bw = embed(w, "B")
    cw = embed(w, "C")
    left = evaluate(spec, bw.apply(x), n)
    right = cw(evaluate(spec, x, n + w.level))
    return abs(left - right)


# ---------------------------------------------------------------------------
# Hoelder exponent data
# ---------------------------------------------------------------------------

def hoelder(spec, width=Fraction(1, 10 ** 12)):
    """Exact Frobenius square of the extremal digit matrix, with enclosures of
    the induced growth rate rho and exponent log(m-1)/(2 log rho)."""
    m = spec.m
    t = spectral_norm_sq(letter_matrix(spec, m // 2, "A"))
    bits = 128
    while True:
        lo, hi = t.enclosure(bits)
        with mpmath.workprec(bits):
            vals = []
            for v in (lo, hi):
                tv = mpmath.mpf(v.numerator) / v.denominator
                s_sq = (tv + mpmath.sqrt(tv * tv - 4)) / 2
                vals.append(mpmath.sqrt(s_sq))
            rho_lo, rho_hi = min(vals), max(vals)
            alpha_pair = sorted(
                mpmath.log(m - 1) / (2 * mpmath.log(r)) for r in (rho_lo, rho_hi))
            if rho_hi - rho_lo < mpmath.mpf(width.numerator) / width.denominator and \
                    alpha_pair[1] - alpha_pair[0] < mpmath.mpf(width.numerator) / width.denominator:
                rho_mid = float((rho_lo + rho_hi) / 2)
                alpha_mid = float((alpha_pair[0] + alpha_pair[1]) / 2)
                return HoelderData(
                    m=m, t=t, rho=rho_mid, alpha=alpha_mid,
                    rho_bounds=(float(rho_lo), float(rho_hi)),
                    alpha_bounds=(float(alpha_pair[0]), float(alpha_pair[1])))
        bits *= 2


# ---------------------------------------------------------------------------
# joint spectral radius at desk scale
# ---------------------------------------------------------------------------

def _batch_stats(mats):
    """(max Frobenius square, max spectral radius) over a (N,2,2) float array
    of determinant +1 matrices."""
    t = (mats * mats).sum(axis=(1, 2))
    tr = np.abs(mats[:, 0, 0] + mats[:, 1, 1])
    disc = tr * tr - 4.0
    rho = np.where(disc >= 0, (tr + np.sqrt(np.maximum(disc, 0.0))) / 2.0, 1.0)
    return float(t.max()), float(rho.max())


def jsr_bruteforce(spec, n_max=8):
    """Sandwich the joint spectral radius of the digit matrices.

    lower: max over enumerated products P of length n of rho(P)^(1/n);
    upper: min over n of (max |P|_2)^(1/n).  Products are enumerated level
    by level with memoized prefix arrays; the final level streams in chunks
    when it would not fit the working set.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if n_max > _JSR_MAX_N:
        raise BudgetError(f"n_max capped at {_JSR_MAX_N}")
    g = spec.m - 1
    if g ** n_max > _JSR_PRODUCT_BUDGET:
        raise BudgetError("combinatorial budget exceeded")
    gens = np.array(
        [[[float(v) for v in letter_matrix(spec, j, "A").entries[:2]],
          [float(v) for v in letter_matrix(spec, j, "A").entries[2:]]]
         for j in range(1, spec.m)])
    lower = 0.0
    upper = float("inf")
    level = np.eye(2)[None, :, :]
    for n in range(1, n_max + 1):
        if level.shape[0] * g <= _JSR_CHUNK:
            level = np.einsum("nij,gjk->ngik", level, gens).reshape(-1, 2, 2)
            t_max, rho_max = _batch_stats(level)
        else:
            # stream the last level without materializing it
            assert level.shape[0] <= _JSR_CHUNK
            t_max, rho_max = 0.0, 0.0
            for k in range(g):
                chunk = level @ gens[k]
                t, r = _batch_stats(chunk)
                t_max, rho_max = max(t_max, t), max(rho_max, r)
            if n < n_max:
                raise AssertionError("streamed level must be the last")
        s_max = np.sqrt((t_max + np.sqrt(t_max * t_max - 4.0)) / 2.0)
        lower = max(lower, rho_max ** (1.0 / n))
        upper = min(upper, float(s_max) ** (1.0 / n))
    return JsrBounds(lower=lower, upper=upper)


# ---------------------------------------------------------------------------
# optimality witness for the Hoelder exponent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessRow:
    k: int
    x_lo: AlgebraicNumber
    x_hi: AlgebraicNumber
    length: AlgebraicNumber
    value_increment: Fraction
    ratio_at_alpha: float
    ratio_above_alpha: float


def optimality_witness(spec, n):
    """Cylinder data along powers of the extremal transposed pair.

    For H = A_{m-floor(m/2)} A_{floor(m/2)}, row k holds the endpoints of the
    level-2k cylinder of H^k, its exact length, the exact conjugacy-value
    increment (m-1)^-2k, and the ratios increment/length^beta at beta = alpha
    and beta = alpha + 0.05.
    """
    from .hecke import cylinder

    if n < 1:
        raise DomainError("n must be >= 1")
    m = spec.m
    data = hoelder(spec)
    pair = (m - m // 2, m // 2)
    rows = []
    with mpmath.workdps(60):
        for k in range(1, n + 1):
            iv, length = cylinder(spec, pair * k)
            inc = Fraction(1, (m - 1) ** (2 * k))
            ln = to_mpf(length)
            inc_m = mpmath.mpf(inc.numerator) / inc.denominator
            r_alpha = inc_m / ln ** mpmath.mpf(data.alpha)
            r_above = inc_m / ln ** (mpmath.mpf(data.alpha) + mpmath.mpf("0.05"))
            rows.append(WitnessRow(
                k=k, x_lo=iv.lo.num, x_hi=iv.hi.num, length=length,
                value_increment=inc,
                ratio_at_alpha=float(r_alpha), ratio_above_alpha=float(r_above)))
    return rows
