"""Exact arithmetic in Q(lam), lam = lam_m = 2*cos(pi/m).

Elements are coefficient vectors over the power basis 1, lam, ..., lam^(d-1),
reduced modulo the minimal polynomial of lam.  Every comparison is decided
exactly: zero by the canonical coefficient vector, nonzero signs by refining
a dyadic enclosure of lam until the evaluated interval excludes zero.

The minimal polynomial is built without any factorization machinery.  The
monic degree-(m-1) polynomial with roots 2*cos(k*pi/m), k = 1..m-1, comes
from the rescaled Chebyshev recurrence; the irreducible factor vanishing at
2*cos(pi/m) is peeled off by exact division against the analogous
polynomials attached to the proper divisors, and the result is verified
numerically against a high-precision enclosure of the root.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath.libmp import to_rational

from .errors import DomainError

_ZERO = Fraction(0)
_ONE = Fraction(1)

# Refinement past this many bits means a "nonzero" element was actually zero;
# the canonical zero test makes that impossible for well-formed values.
_MAX_SIGN_BITS = 1 << 22


# ---------------------------------------------------------------------------
# integer polynomial helpers (little-endian coefficient lists)
# ---------------------------------------------------------------------------

def _poly_trim(p):
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _poly_trim(out)


def _poly_divexact(p, q):
    """Divide p by monic q over Z, requiring a zero remainder."""
    p = list(p)
    dq = len(q) - 1
    assert q[-1] == 1, "divisor must be monic"
    out = [0] * (len(p) - dq)
    for k in range(len(p) - 1, dq - 1, -1):
        c = p[k]
        out[k - dq] = c
        if c:
            for j in range(dq + 1):
                p[k - dq + j] -= c * q[j]
    assert all(c == 0 for c in p[:dq]), "division not exact"
    return _poly_trim(out)


def _pair_power_poly(j):
    """v_j with v_j(x + 1/x) = x^j + x^(-j): v_0=2, v_1=y, v_{j+1}=y*v_j - v_{j-1}."""
    a, b = [2], [0, 1]
    if j == 0:
        return a
    for _ in range(j - 1):
        a, b = b, _poly_trim([x - y for x, y in
                              zip([0] + b, list(a) + [0] * (len(b) + 1 - len(a)))])
    return b


def _cosine_product_poly(n):
    """Monic polynomial of degree floor((n-1)/2) with roots 2*cos(2*k*pi/n).

    Obtained by expressing (x^n - 1)/((x - 1)(x + 1 if n even)) in the
    variable y = x + 1/x via the pair-power recurrence.
    """
    if n % 2:
        terms = [[1]] + [_pair_power_poly(j) for j in range(1, (n - 1) // 2 + 1)]
    else:
        h = n // 2 - 1
        if h % 2 == 0:
            terms = [[1]] + [_pair_power_poly(j) for j in range(2, h + 1, 2)]
        else:
            terms = [_pair_power_poly(j) for j in range(1, h + 1, 2)]
    out = [0] * (max(len(t) for t in terms))
    for t in terms:
        for i, c in enumerate(t):
            out[i] += c
    return _poly_trim(out)


@lru_cache(maxsize=None)
def _real_cyclotomic(n):
    """Minimal polynomial of 2*cos(2*pi/n) over Q, for n >= 3 (monic, integer)."""
    poly = _cosine_product_poly(n)
    for d in range(3, n):
        if n % d == 0:
            poly = _poly_divexact(poly, _real_cyclotomic(d))
    return tuple(poly)


def minimal_polynomial(m):
    """Monic integer minimal polynomial of lam_m = 2*cos(pi/m), little-endian."""
    return _real_cyclotomic(2 * m)


def _totient(n):
    out, k = n, 2
    while k * k <= n:
        if n % k == 0:
            while n % k == 0:
                n //= k
            out -= out // k
        k += 1
    if n > 1:
        out -= out // n
    return out


def _mpf_raw_to_fraction(raw):
    p, q = to_rational(raw)
    return Fraction(int(p), int(q))


def _horner_interval(coeffs, lo, hi):
    """Enclose sum(coeffs[k] * t^k) over t in [lo, hi].  coeffs exact rationals/ints."""
    acc_lo = acc_hi = Fraction(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        p1, p2, p3, p4 = acc_lo * lo, acc_lo * hi, acc_hi * lo, acc_hi * hi
        acc_lo = min(p1, p2, p3, p4) + c
        acc_hi = max(p1, p2, p3, p4) + c
    return acc_lo, acc_hi


def _format_decimal(q, digits):
    sign = "-" if q < 0 else ""
    scaled = abs(q) * 10 ** digits + Fraction(1, 2)
    n = scaled.numerator // scaled.denominator
    s = str(n).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}" if digits else sign + s


# ---------------------------------------------------------------------------
# field specification
# ---------------------------------------------------------------------------

class FieldSpec:
    """The real field Q(lam_m) with a refinable enclosure of lam_m.

    Values of this class are shared and immutable apart from the enclosure
    cache, which is guarded by a lock so concurrent refinement is safe.
    """

    __slots__ = ("m", "minpoly", "degree", "_enclosures", "_lock")

    def __init__(self, m):
        if not isinstance(m, int) or m < 3:
            raise DomainError(f"m must be an integer >= 3, got {m!r}")
        self.m = m
        self.minpoly = minimal_polynomial(m)
        self.degree = len(self.minpoly) - 1
        self._enclosures = {}
        self._lock = threading.Lock()
        assert self.degree == _totient(2 * m) // 2
        lo, hi = self.lambda_enclosure(64)
        vlo, vhi = _horner_interval(self.minpoly, lo, hi)
        assert vlo <= 0 <= vhi, "minimal polynomial does not vanish at 2cos(pi/m)"

    def lambda_enclosure(self, bits):
        """Dyadic enclosure [lo, hi] of lam_m, width < 2^-bits."""
        bits = max(64, 1 << max(6, (bits - 1).bit_length()))
        with self._lock:
            cached = self._enclosures.get(bits)
            if cached is not None:
                return cached
            ctx = mpmath.ctx_iv.MPIntervalContext()
            ctx.prec = bits + 16
            x = 2 * ctx.cos(ctx.pi / self.m)
            raw_lo, raw_hi = x._mpi_
            enc = (_mpf_raw_to_fraction(raw_lo), _mpf_raw_to_fraction(raw_hi))
            assert enc[0] <= enc[1]
            self._enclosures[bits] = enc
            return enc

    # element constructors --------------------------------------------------

    def from_coeffs(self, coeffs):
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.degree:
            cs = _reduce_mod(cs, self.minpoly)
        cs += [_ZERO] * (self.degree - len(cs))
        return AlgebraicNumber(self, tuple(cs))

    def from_rational(self, q):
        return self.from_coeffs([Fraction(q)])

    def zero(self):
        return self.from_rational(0)

    def one(self):
        return self.from_rational(1)

    def lam(self):
        """The generator lam_m = 2*cos(pi/m) as a field element."""
        return self.from_coeffs([0, 1] if self.degree > 1 else [1])

    def inv_lambda(self):
        """1/lam_m, the right endpoint of the unit interval picture."""
        return self.one() / self.lam()

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.m == self.m

    def __hash__(self):
        return hash(("FieldSpec", self.m))

    def __repr__(self):
        return f"FieldSpec(m={self.m}, degree={self.degree})"


@lru_cache(maxsize=None)
def make_field(m):
    """Field of lam_m = 2*cos(pi/m); rejects m < 3."""
    return FieldSpec(m)


def _reduce_mod(coeffs, minpoly):
    cs = list(coeffs)
    d = len(minpoly) - 1
    for k in range(len(cs) - 1, d - 1, -1):
        c = cs[k]
        if c:
            for j in range(d + 1):
                cs[k - d + j] -= c * minpoly[j]
        cs.pop()
    return cs


def _fpoly_trim(p):
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _fpoly_divmod(p, q):
    """Quotient and remainder of rational-coefficient polynomials."""
    p = list(p)
    dq = len(q) - 1
    lead = q[-1]
    if len(p) - 1 < dq:
        return [_ZERO], p
    quo = [_ZERO] * (len(p) - dq)
    for k in range(len(p) - 1, dq - 1, -1):
        c = p[k] / lead
        quo[k - dq] = c
        if c:
            for j in range(dq + 1):
                p[k - dq + j] -= c * q[j]
    return _fpoly_trim(quo), _fpoly_trim(p[:dq] or [_ZERO])


def _fpoly_sub_mul(a, q, b):
    """a - q*b for rational-coefficient polynomials."""
    prod = [_ZERO] * (len(q) + len(b) - 1)
    for i, x in enumerate(q):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    out = [_ZERO] * max(len(a), len(prod))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(prod):
        out[i] -= x
    return _fpoly_trim(out)


def _poly_inverse(coeffs, minpoly):
    """u with u * a == 1 modulo the (irreducible) minimal polynomial."""
    r0 = [Fraction(c) for c in minpoly]
    r1 = _fpoly_trim([Fraction(c) for c in coeffs])
    s0, s1 = [_ZERO], [_ONE]
    while len(r1) > 1:
        q, r = _fpoly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _fpoly_sub_mul(s0, q, s1)
    # minpoly irreducible and a != 0, so the last remainder is a nonzero constant
    g = r1[0]
    assert g != 0, "inverse of zero divisor"
    return [c / g for c in s1]


# ---------------------------------------------------------------------------
# algebraic numbers
# ---------------------------------------------------------------------------

class AlgebraicNumber:
    """Exact element of Q(lam_m), immutable after construction."""

    __slots__ = ("spec", "coeffs", "_flt")

    def __init__(self, spec, coeffs):
        self.spec = spec
        self.coeffs = coeffs
        self._flt = None

    # coercion --------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, AlgebraicNumber):
            if other.spec != self.spec:
                raise DomainError("mixed-field operands")
            return other
        if isinstance(other, (int, Fraction)):
            return self.spec.from_rational(other)
        return None

    # arithmetic ------------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return AlgebraicNumber(self.spec,
                               tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return AlgebraicNumber(self.spec,
                               tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.spec.degree
        if n == 1:
            return AlgebraicNumber(self.spec, (self.coeffs[0] * o.coeffs[0],))
        prod = [_ZERO] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        cs = _reduce_mod(prod, self.spec.minpoly)
        cs += [_ZERO] * (n - len(cs))
        return AlgebraicNumber(self.spec, tuple(cs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DomainError("division by zero")
        if self.spec.degree == 1:
            return AlgebraicNumber(self.spec, (self.coeffs[0] / o.coeffs[0],))
        if o.is_rational():
            q = o.coeffs[0]
            return AlgebraicNumber(self.spec, tuple(c / q for c in self.coeffs))
        inv = _poly_inverse(o.coeffs, self.spec.minpoly)
        return self * self.spec.from_coeffs(inv)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return AlgebraicNumber(self.spec, tuple(-c for c in self.coeffs))

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (self.spec.one() / self) ** (-k)
        out = self.spec.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # predicates and comparisons --------------------------------------------

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self):
        if not self.is_rational():
            raise DomainError("not a rational element")
        return self.coeffs[0]

    def __bool__(self):
        return not self.is_zero()

    def sign(self):
        """Exact sign in {-1, 0, +1}."""
        cs = self.coeffs
        if all(c == 0 for c in cs):
            return 0
        if self.spec.degree == 1:
            return 1 if cs[0] > 0 else -1
        den = math.lcm(*(c.denominator for c in cs))
        ics = [int(c * den) for c in cs]
        bits = 64
        while bits <= _MAX_SIGN_BITS:
            lo, hi = self.spec.lambda_enclosure(bits)
            vlo, vhi = _horner_interval(ics, lo, hi)
            if vlo > 0:
                return 1
            if vhi < 0:
                return -1
            bits <<= 1
        raise AssertionError("sign refinement exceeded the safety cap")

    def _cmp(self, other):
        o = self._coerce(other)
        if o is None:
            return None
        if self.spec.degree == 1:
            a, b = self.coeffs[0], o.coeffs[0]
            return 0 if a == b else (1 if a > b else -1)
        return (self - o).sign()

    def __eq__(self, other):
        if isinstance(other, AlgebraicNumber):
            return other.spec == self.spec and other.coeffs == self.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.spec.m, self.coeffs))

    def __lt__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c < 0

    def __le__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c >= 0

    # numeric views ----------------------------------------------------------

    def enclosure(self, bits=64):
        """Exact rational interval [lo, hi] containing the value."""
        if self.spec.degree == 1 or self.is_rational():
            v = self.coeffs[0]
            return v, v
        lo, hi = self.spec.lambda_enclosure(bits)
        return _horner_interval(self.coeffs, lo, hi)

    def __float__(self):
        if self._flt is None:
            bits = 64
            while True:
                lo, hi = self.enclosure(bits)
                mid = (lo + hi) / 2
                if hi - lo <= abs(mid) * Fraction(1, 1 << 60) or hi - lo < Fraction(1, 1 << 300):
                    self._flt = float(mid)
                    break
                bits <<= 1
        return self._flt

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "1" if k == 0 else ("lam" if k == 1 else f"lam^{k}")
            if k == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def __repr__(self):
        return f"<{self} in Q(lam_{self.spec.m})>"


# ---------------------------------------------------------------------------
# module-level operation surface
# ---------------------------------------------------------------------------

def arith(a, b, op):
    """Field arithmetic dispatch: op in {'add','sub','mul','div'}."""
    try:
        fn = {"add": a.__add__, "sub": a.__sub__,
              "mul": a.__mul__, "div": a.__truediv__}[op]
    except KeyError:
        raise DomainError(f"unknown operation {op!r}") from None
    out = fn(b)
    if out is NotImplemented:
        raise DomainError("operands not coercible into the field")
    return out


def sign(a):
    return a.sign()


def to_float(a, digits):
    """Decimal string of a, with the exact enclosure width as error bound.

    The enclosure is refined until its width is below 10^-digits.
    """
    if digits < 1:
        raise DomainError("digits must be >= 1")
    target = Fraction(1, 10 ** digits)
    bits = 64
    while True:
        lo, hi = a.enclosure(bits)
        if hi - lo < target:
            break
        bits <<= 1
    mid = (lo + hi) / 2
    return _format_decimal(mid, digits), hi - lo
