import math
import random
from fractions import Fraction

import numpy as np
import pytest

from heckecf.errors import BudgetError, DomainError
from heckecf.field import make_field
from heckecf.hecke import letter_matrix
from heckecf.minkowski import (
    conjugacy_residual,
    digits,
    evaluate,
    hoelder,
    invert,
    jsr_bruteforce,
    optimality_witness,
    radix_digits,
    spectral_norm_sq,
)
from heckecf.symbolic import normal_form


def question_mark(x):
    """Classical question-mark function of a rational in [0, 1], via the
    alternating continued-fraction formula.  Independent of the digit path."""
    x = Fraction(x)
    assert 0 <= x <= 1
    if x == 0:
        return Fraction(0)
    cf = []
    p, q = x.numerator, x.denominator
    # continued fraction of x = [0; a1, a2, ...]
    a, rem = divmod(q, p)
    cf.append(a)
    p, q = rem, p
    while p:
        a, rem = divmod(q, p)
        cf.append(a)
        p, q = rem, p
    out = Fraction(0)
    total = 0
    s = 1
    for a in cf:
        total += a
        out += s * Fraction(2, 2 ** total)
        s = -s
    return out


def random_word(m, rng, max_level=5):
    toks = [rng.randint(1, m - 1) for _ in range(rng.randint(0, max_level))]
    if rng.random() < 0.3:
        toks.append("f")
    return normal_form(m, toks)


def test_question_mark_oracle_sanity():
    assert question_mark(Fraction(1, 3)) == Fraction(1, 4)
    assert question_mark(Fraction(1, 2)) == Fraction(1, 2)
    assert question_mark(Fraction(2, 5)) == Fraction(3, 8)
    assert question_mark(1) == 1


def test_digits_examples():
    f3 = make_field(3)
    assert digits(f3, 0, 5).digits == (1,) * 5
    assert digits(f3, Fraction(1, 3), 6).digits == (1, 1, 2, 2, 2, 2)
    f5 = make_field(5)
    assert digits(f5, f5.inv_lambda(), 4).digits == (4,) * 4
    with pytest.raises(DomainError):
        digits(f3, Fraction(3, 2), 3)


def test_evaluate_endpoints_and_onethird():
    f3 = make_field(3)
    for n in (5, 10, 20):
        assert evaluate(f3, 0, n) == 0
        assert abs(evaluate(f3, 1, n) - 1) <= Fraction(1, 2 ** n)
        assert abs(evaluate(f3, Fraction(1, 3), n) - Fraction(1, 4)) <= Fraction(1, 2 ** n)
    f7 = make_field(7)
    assert evaluate(f7, 0, 8) == 0
    assert abs(evaluate(f7, f7.inv_lambda(), 8) - 1) <= Fraction(1, 6 ** 8)


def test_evaluate_against_question_mark_oracle():
    f3 = make_field(3)
    rng = random.Random(41)
    for _ in range(40):
        x = Fraction(rng.randint(1, 99), 100)
        n = 30
        assert abs(evaluate(f3, x, n) - question_mark(x)) <= Fraction(1, 2 ** n)


def test_evaluate_symmetry_m3():
    # M(1 - x) = 1 - M(x): the flip conjugacy at m = 3
    f3 = make_field(3)
    rng = random.Random(43)
    for _ in range(50):
        x = Fraction(rng.randint(1, 999), 1000)
        n = 25
        lhs = evaluate(f3, 1 - x, n)
        rhs = 1 - evaluate(f3, x, n)
        assert abs(lhs - rhs) <= 2 * Fraction(1, 2 ** n)


def test_evaluate_monotone():
    f5 = make_field(5)
    rng = random.Random(47)
    xs = sorted(Fraction(rng.randint(0, 1000), 1000) for _ in range(200))
    n = 20
    tol = 2 * Fraction(1, 4 ** n)
    vals = [evaluate(f5, x * Fraction(61803, 100000), n) for x in xs]
    for a, b in zip(vals, vals[1:]):
        assert b >= a - tol


def test_digit_affine_consistency():
    # evaluate equals the affine-picture value of the digit stream padded with 1s
    f4 = make_field(4)
    rng = random.Random(53)
    for _ in range(25):
        x = Fraction(rng.randint(0, 100), 100) * Fraction(7071, 10000)
        n = 12
        ds = digits(f4, x, n)
        val = Fraction(0)
        for d in reversed(ds.digits):
            val = (val + d - 1) / 3
        assert evaluate(f4, x, n) == val


def test_radix_digits_convention():
    assert radix_digits(3, 1, 4) == (2, 2, 2, 2)
    assert radix_digits(3, Fraction(1, 4), 5) == (1, 2, 1, 1, 1)
    assert radix_digits(5, Fraction(1, 4), 3) == (2, 1, 1)


def test_invert_examples():
    f3 = make_field(3)
    for n in (3, 8, 14):
        br = invert(f3, 0, n)
        assert br.lo.num.is_zero()
    widths = []
    for n in (4, 8, 12, 16):
        br = invert(f3, Fraction(1, 4), n)
        assert br.contains(Fraction(1, 3))
        widths.append(br.length().as_fraction())
    assert all(a > b for a, b in zip(widths, widths[1:]))


def test_invert_roundtrip():
    rng = random.Random(59)
    for m in (3, 4, 5):
        f = make_field(m)
        for _ in range(34):
            y = Fraction(rng.randint(0, 1000), 1000)
            n = 10
            br = invert(f, y, n)
            tol = Fraction(1, (m - 1) ** n)
            assert abs(evaluate(f, br.lo.num, n) - y) <= 2 * tol


def test_conjugacy_examples():
    f3 = make_field(3)
    w_empty = normal_form(3, [])
    assert conjugacy_residual(f3, w_empty, Fraction(1, 2), 10) == 0
    # M(B_1(1/2)) = M(1/3) = 1/4 = C_1(M(1/2))
    w1 = normal_form(3, [1])
    assert conjugacy_residual(f3, w1, Fraction(1, 2), 25) <= 2 * Fraction(1, 2 ** 25)


def test_conjugacy_random_contract():
    rng = random.Random(61)
    for m in (3, 4, 5, 7):
        f = make_field(m)
        for _ in range(40):
            w = random_word(m, rng)
            x = f.inv_lambda() * Fraction(rng.randint(0, 128), 128)
            n = 18
            assert conjugacy_residual(f, w, x, n) <= 2 * Fraction(1, (m - 1) ** n)


def test_hoelder_values():
    h3 = hoelder(make_field(3))
    tau = (1 + 5 ** 0.5) / 2
    assert h3.rho == pytest.approx(tau, abs=1e-12)
    assert h3.alpha == pytest.approx(math.log(2) / (2 * math.log(tau)), abs=1e-12)
    assert h3.rho_bounds[0] <= tau <= h3.rho_bounds[1]
    assert h3.rho_bounds[1] - h3.rho_bounds[0] < 1e-12
    h4 = hoelder(make_field(4))
    assert h4.t == 6
    assert h4.rho == pytest.approx(1 + 2 ** 0.5, abs=1e-12)
    # numeric SVD oracle for the m=4 extremal matrix
    arr = np.array([[2 ** 0.5, 1.0], [1.0, 2 ** 0.5]])
    assert h4.rho == pytest.approx(np.linalg.svd(arr, compute_uv=False)[0], abs=1e-9)
    assert h4.alpha == pytest.approx(math.log(3) / (2 * math.log(1 + 2 ** 0.5)), abs=1e-12)


def test_alpha_decreasing_along_parity_classes():
    # direct evaluation: alpha is NOT monotone in m (alpha_4 < alpha_5), but it
    # does decrease strictly along each parity class on 3..12
    alphas = {m: hoelder(make_field(m)).alpha for m in range(3, 13)}
    assert alphas[4] < alphas[5]
    odd = [alphas[m] for m in (3, 5, 7, 9, 11)]
    even = [alphas[m] for m in (4, 6, 8, 10, 12)]
    assert all(a > b for a, b in zip(odd, odd[1:]))
    assert all(a > b for a, b in zip(even, even[1:]))


def test_extremal_digit_norm_maximality():
    for m in range(3, 13):
        f = make_field(m)
        t_star = spectral_norm_sq(letter_matrix(f, m // 2, "A"))
        for j in range(1, m):
            assert (t_star - spectral_norm_sq(letter_matrix(f, j, "A"))).sign() >= 0


def test_jsr_examples():
    f3 = make_field(3)
    tau = (1 + 5 ** 0.5) / 2
    b2 = jsr_bruteforce(f3, 2)
    assert b2.lower == pytest.approx(tau, abs=1e-12)
    assert b2.lower <= b2.upper + 1e-15
    for m in (4, 5, 6):
        f = make_field(m)
        h = hoelder(f)
        bounds = jsr_bruteforce(f, 8)
        assert bounds.lower == pytest.approx(h.rho, abs=1e-9)
        assert bounds.upper - h.rho < 0.05
        assert bounds.lower <= bounds.upper + 1e-12


def test_jsr_budget():
    with pytest.raises(BudgetError):
        jsr_bruteforce(make_field(3), 11)
    with pytest.raises(BudgetError):
        jsr_bruteforce(make_field(12), 10)
    with pytest.raises(DomainError):
        jsr_bruteforce(make_field(3), 0)


def test_optimality_witness():
    f3 = make_field(3)
    rows = optimality_witness(f3, 8)
    # exact conjugacy-value increment over the level-2k cylinder
    for row in rows:
        assert row.value_increment == Fraction(1, 4 ** row.k)
        assert row.length == row.x_hi - row.x_lo
    # ratios above the exponent eventually increase
    above = [r.ratio_above_alpha for r in rows]
    assert all(a < b for a, b in zip(above[1:], above[2:]))
    # ratios at the exponent stay bounded
    at = [r.ratio_at_alpha for r in rows]
    assert max(at) < 2.0
    # successive cylinder lengths converge to rho^-4
    h = hoelder(f3)
    r1 = float(rows[-1].length) / float(rows[-2].length)
    assert r1 == pytest.approx(h.rho ** -4, abs=1e-6)
