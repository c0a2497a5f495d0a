import math
import random
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from ibeta.numberfield import (
    FieldElement,
    SignRefinementError,
    as_rational,
    get_field,
    isolate_root,
)

# high-precision roots, frozen from an independent bisection oracle
PHI = 1.6180339887498948482
BETA_1_3 = 1.8392867552141611326
BETA_2_4 = 2.9744492445524616171


def poly(q, m, x):
    return x**m - sum(q * x**i for i in range(m))


class TestIsolateRoot:
    @pytest.mark.parametrize(
        "q,m,root",
        [(1, 2, PHI), (1, 3, BETA_1_3), (2, 4, BETA_2_4)],
    )
    def test_known_roots(self, q, m, root):
        enc = isolate_root(q, m, Fraction(1, 10**9))
        assert enc.lo <= as_rational(Fraction(root).limit_denominator(10**15))
        assert float(enc.lo) == pytest.approx(root, abs=1e-8)
        assert float(enc.width()) <= 1e-9

    def test_bracket_sign_change(self):
        enc = isolate_root(3, 2, Fraction(1, 10**6))
        assert 3 < enc.lo < enc.hi < 4
        assert poly(3, 2, enc.lo) < 0 < poly(3, 2, enc.hi)

    def test_refine_shrinks_and_keeps_root(self):
        enc = isolate_root(1, 2, Fraction(1, 100))
        for _ in range(5):
            finer = enc.refine(4)
            assert finer.width() == enc.width() / 16
            assert poly(1, 2, finer.lo) < 0 < poly(1, 2, finer.hi)
            assert enc.lo <= finer.lo < finer.hi <= enc.hi
            enc = finer

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            isolate_root(0, 2, Fraction(1, 10))
        with pytest.raises(ValueError):
            isolate_root(1, 1, Fraction(1, 10))
        with pytest.raises(ValueError):
            isolate_root(1, 2, 0)


class TestArithmetic:
    def test_reduction_rule_squares(self):
        b = get_field(1, 2).beta()
        assert (b * b).coeffs == (mpq(1), mpq(1))

    def test_reduction_rule_cubic(self):
        b = get_field(1, 3).beta()
        assert (b * b * b).coeffs == (mpq(1), mpq(1), mpq(1))

    def test_difference_of_squares(self):
        b = get_field(1, 2).beta()
        assert (b - 1) * (b + 1) == b

    def test_field_mismatch_rejected(self):
        with pytest.raises(ValueError):
            get_field(1, 2).beta() + get_field(1, 3).beta()

    def test_float_operand_rejected(self):
        b = get_field(1, 2).beta()
        with pytest.raises(TypeError):
            b + 0.5

    def test_rational_mixing(self):
        b = get_field(1, 2).beta()
        x = (2 * b + Fraction(1, 3)) / 2 - mpq(1, 6)
        assert x == b

    def test_inverse_round_trip(self):
        rng = random.Random(7)
        for q, m in [(1, 2), (1, 3), (2, 3), (3, 5)]:
            field = get_field(q, m)
            for _ in range(5):
                a = field.element(
                    [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(m)]
                )
                if a.is_zero:
                    continue
                assert a * a.inverse() == field.one()

    def test_inverse_of_zero(self):
        with pytest.raises(ZeroDivisionError):
            get_field(1, 2).zero().inverse()

    def test_negative_powers(self):
        b = get_field(1, 2).beta()
        assert b ** (-2) == 2 - b
        assert b ** (-1) == b - 1


class TestSign:
    def test_zero_element(self):
        assert get_field(1, 2).zero().sign() == 0

    def test_beta_minus_one_positive(self):
        b = get_field(1, 2).beta()
        assert (b - 1).sign() == 1

    def test_minimal_polynomial_vanishes(self):
        b = get_field(1, 2).beta()
        assert (b * b - b - 1).sign() == 0

    def test_zero_test_on_minimal_polynomial_multiples(self):
        # random multiples of P(beta) must vanish identically
        rng = random.Random(3)
        for q, m in [(1, 2), (2, 3), (1, 4)]:
            field = get_field(q, m)
            b = field.beta()
            pb = b**m - sum(q * b**i for i in range(m))
            assert pb.is_zero
            for _ in range(10):
                r = field.element(
                    [Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(m)]
                )
                assert (pb * r).is_zero
                assert (pb * r).sign() == 0

    def test_budget_kwarg_accepted(self):
        b = get_field(1, 2).beta()
        assert (b - 1).sign(budget=512) == 1
        assert issubclass(SignRefinementError, ArithmeticError)

    def test_pisot_smallness_resolves(self):
        # beta^(-k) is tiny but its sign must still resolve exactly
        b = get_field(1, 2).beta()
        tiny = b ** (-80)
        assert tiny.sign() == 1
        assert (-tiny).sign() == -1


class TestFloorAndOrder:
    def test_floor_examples(self):
        f = get_field(1, 2)
        b = f.beta()
        assert b.floor() == 1
        assert (b + mpq(1, 2)).floor() == 2
        assert f.from_rational(mpq(7, 2)).floor() == 3

    def test_floor_of_exact_integer_value(self):
        # beta^2 - beta = 1 exactly: floor must see the integer, not 0.999...
        b = get_field(1, 2).beta()
        assert (b * b - b).floor() == 1
        assert (b * b - b).ceil() == 1

    def test_floor_negative(self):
        b = get_field(1, 2).beta()
        assert (-b).floor() == -2
        assert (mpq(1) - b).floor() == -1

    @given(
        st.integers(-40, 40),
        st.integers(1, 12),
        st.integers(-6, 6),
    )
    @settings(max_examples=60, deadline=None)
    def test_floor_consistency_with_float(self, num, den, k):
        b = get_field(1, 3).beta()
        a = b * k + mpq(num, den)
        n = a.floor()
        lo, hi = a.interval(256)
        assert lo >= n
        assert hi < n + 1

    def test_ordering_matches_float(self):
        rng = random.Random(11)
        field = get_field(2, 3)
        for _ in range(25):
            a = field.element([Fraction(rng.randint(-8, 8), rng.randint(1, 5)) for _ in range(3)])
            c = field.element([Fraction(rng.randint(-8, 8), rng.randint(1, 5)) for _ in range(3)])
            fa, fc = float(a), float(c)
            if abs(fa - fc) < 1e-9:
                continue
            assert (a < c) == (fa < fc)
            assert (a > c) == (fa > fc)


class TestFloatAgreement:
    @given(
        st.tuples(*[st.fractions(min_value=-5, max_value=5, max_denominator=12)] * 3),
        st.tuples(*[st.fractions(min_value=-5, max_value=5, max_denominator=12)] * 3),
    )
    @settings(max_examples=50, deadline=None)
    def test_product_matches_float_product(self, ca, cb):
        field = get_field(2, 3)
        a = field.element(list(ca))
        c = field.element(list(cb))
        lhs = float(a * c)
        rhs = float(a) * float(c)
        assert lhs == pytest.approx(rhs, abs=1e-7, rel=1e-9)

    def test_decimal_digits(self):
        b = get_field(1, 2).beta()
        s = b.decimal(30)
        assert s.startswith("1.6180339887498948482045868343")

    def test_interval_brackets_truth(self):
        b = get_field(1, 3).beta()
        x = (b - 1) ** 5 / 3
        lo, hi = x.interval(160)
        assert lo <= x.interval(320)[0] <= x.interval(320)[1] <= hi


class TestRationalCoercion:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("3/4", mpq(3, 4)),
            ("0.37", mpq(37, 100)),
            (Fraction(2, 6), mpq(1, 3)),
            (5, mpq(5)),
        ],
    )
    def test_accepts(self, raw, expected):
        assert as_rational(raw) == expected

    def test_rejects_float(self):
        with pytest.raises(TypeError):
            as_rational(0.1)

    def test_always_reduced(self):
        r = as_rational("6/8")
        assert r.numerator == 3 and r.denominator == 4


def test_field_interning():
    assert get_field(1, 2) is get_field(1, 2)
    assert get_field(1, 2) is not get_field(1, 3)


def test_minimal_polynomial_coeffs():
    assert get_field(2, 3).minimal_polynomial() == (-2, -2, -2, 1)


def test_element_hashable_and_usable_in_sets():
    b = get_field(1, 2).beta()
    seen = {b, b + 1, b}
    assert len(seen) == 2
