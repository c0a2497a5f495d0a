"""Tests for matching detection, delta words, scans, and interval lines."""

import random

import pytest
from gmpy2 import mpq

from ibeta.dynamics import BetaSpec, TransformParams, delta_sequence, step_T
from ibeta.matching import (
    MonotonicityConflict,
    WordDecompositionError,
    classify_monotonicity,
    coefficient_sum,
    delta_word_track,
    detect_matching,
    fixed_point_P,
    interval_line,
    scan_intervals,
)

PHI = BetaSpec.multinacci(1, 2)
F = PHI.field


def exact(q, m, alpha):
    return TransformParams.make(BetaSpec.multinacci(q, m), alpha)


def high_alphas(q, m, count, seed):
    """Random rational alphas in the upper regime [1 - <beta>, 1)."""
    rng = random.Random(seed)
    beta = BetaSpec.multinacci(q, m)
    boundary = float(q + 1) - beta.as_float()
    out = []
    while len(out) < count:
        a = mpq(rng.randrange(1, 10**6), 10**6)
        if float(a) > boundary + 1e-9:
            out.append(a)
    return out


class TestDetectMatching:
    def test_golden_half(self):
        r = detect_matching(exact(1, 2, mpq(1, 2)), 10)
        assert r.matched
        assert r.time == 4
        assert r.prefix_a == (0, 1, 1, 0)
        assert r.prefix_b == (2, 0, 1, 1)
        assert r.delta_k_sign == "+"
        assert r.mode == "exact"
        assert r.certificate is None

    def test_prefix_reconstruction_identity(self):
        # matching at time k forces sum (b_i - a_i)/beta^i = 1 exactly
        for q, m, a in ((1, 2, mpq(1, 2)), (2, 3, mpq(7, 10)), (1, 3, mpq(4, 9))):
            p = exact(q, m, a)
            r = detect_matching(p, 500)
            assert r.matched
            f = p.beta.field
            binv = f.beta().inverse()
            acc = f.zero()
            pw = f.one()
            for ai, bi in zip(r.prefix_a, r.prefix_b):
                pw = pw * binv
                acc = acc + (bi - ai) * pw
            assert acc == 1

    def test_lower_regime_matches_at_time_m(self):
        cases = [
            (1, 2, mpq(1, 10)),
            (1, 2, mpq(3, 10)),
            (2, 3, mpq(1, 20)),
            (3, 4, mpq(1, 100)),
            (2, 2, mpq(1, 8)),
        ]
        for q, m, a in cases:
            p = exact(q, m, a)
            assert p.regime == "low"
            r = detect_matching(p, 50)
            assert r.matched and r.time == m

    def test_no_premature_matching_in_upper_regime(self):
        for q, m in ((1, 2), (1, 3), (2, 2), (2, 3)):
            for a in high_alphas(q, m, 25, seed=q * 10 + m):
                r = detect_matching(exact(q, m, a), 3000)
                if r.matched:
                    assert r.time >= m + 1

    def test_matching_persists(self):
        p = exact(1, 2, mpq(1, 2))
        ds = delta_sequence(p, 20)
        assert ds.first_zero == 4
        # iterating past the match keeps the orbits glued
        from ibeta.dynamics import orbit

        top = orbit(p, 1, 10)
        bot = orbit(p, 0, 10)
        for s1, s0 in zip(top[4:], bot[4:]):
            assert s1.value == s0.value

    def test_float_mode_flags_approximate(self):
        r = detect_matching(
            TransformParams.make(BetaSpec.from_value(2.0), 0.0), 10
        )
        assert r.matched and r.time == 1 and r.mode == "approximate"
        assert r.eps > 0

    def test_float_nonmatching(self):
        r = detect_matching(
            TransformParams.make(BetaSpec.from_value(1.9), 0.2), 1000
        )
        assert not r.matched
        assert r.certificate is None

    def test_boundary_alpha_certified_never_matching(self):
        # alpha = 1 - <beta> puts the fixed point at 1; the orbit pair is
        # eventually 2-periodic and a state repeat certifies no matching.
        alpha = 2 - F.beta()
        r = detect_matching(TransformParams.make(PHI, alpha), 5000)
        assert not r.matched
        assert r.certificate is not None
        assert r.certificate.period == 2
        assert r.iterations <= 10

    def test_rejects_bad_max_iter(self):
        with pytest.raises(ValueError):
            detect_matching(exact(1, 2, 0), 0)


class TestDeltaWords:
    def test_golden_half_word_sequence(self):
        ws = delta_word_track(exact(1, 2, mpq(1, 2)), 4)
        assert [w.label() for w in ws] == ["-(0,1)", "+(0,1)", "+(1,0)", "zero"]

    def test_words_match_exact_deltas(self):
        p = exact(1, 2, mpq(1, 2))
        ws = delta_word_track(p, 4)
        ds = delta_sequence(p, 4)
        for w, d in zip(ws, ds.entries):
            assert w.value(F) == d

    def test_seed_word_is_minus_q_at_the_end(self):
        for q, m in ((1, 2), (1, 3), (2, 2), (2, 3)):
            a = high_alphas(q, m, 1, seed=17 * q + m)[0]
            ws = delta_word_track(exact(q, m, a), 1)
            assert ws[0].sign == -1
            assert ws[0].e == (0,) * (m - 1) + (q,)

    def test_cardinality_bound(self):
        for q, m in ((1, 2), (1, 3), (2, 2), (2, 3)):
            seen = set()
            for a in high_alphas(q, m, 40, seed=100 * q + m):
                for w in delta_word_track(exact(q, m, a), 400):
                    if w.sign != 0:
                        seen.add((w.sign, w.e))
            assert len(seen) <= 2 ** (m + 1) - 3

    def test_stops_at_zero_word(self):
        ws = delta_word_track(exact(1, 2, mpq(1, 2)), 100)
        assert len(ws) == 4
        assert ws[-1].sign == 0

    def test_refuses_lower_regime(self):
        with pytest.raises(ValueError):
            delta_word_track(exact(1, 2, mpq(1, 10)), 5)

    def test_refuses_float_mode(self):
        p = TransformParams.make(BetaSpec.from_value(1.9), 0.7)
        with pytest.raises(ValueError):
            delta_word_track(p, 5)

    def test_nonmatching_alpha_runs_full_horizon(self):
        alpha = 2 - F.beta()
        ws = delta_word_track(TransformParams.make(PHI, alpha), 50)
        assert len(ws) == 50
        assert all(w.sign != 0 for w in ws)


class TestFixedPoint:
    def test_golden_half_value(self):
        p = exact(1, 2, mpq(1, 2))
        P = fixed_point_P(p)
        assert P == (1 - mpq(1, 2)) / (F.beta() - 1)
        assert float(P) == pytest.approx(0.80901699437494742410, abs=1e-15)

    def test_is_fixed_under_step(self):
        for q, m, a in ((1, 2, mpq(1, 2)), (2, 2, mpq(9, 10)), (2, 3, mpq(1, 2))):
            p = exact(q, m, a)
            P = fixed_point_P(p)
            assert step_T(p, P).value == P

    def test_boundary_alpha_puts_P_at_one(self):
        p = TransformParams.make(PHI, 2 - F.beta())
        assert fixed_point_P(p) == 1

    def test_refuses_float_beta(self):
        with pytest.raises(ValueError):
            fixed_point_P(TransformParams.make(BetaSpec.from_value(1.9), 0.5))


class TestIntervalLine:
    def test_golden_lower_interval_exact(self):
        r = detect_matching(exact(1, 2, mpq(1, 10)), 10)
        slope, intercept = interval_line(r, PHI)
        b = F.beta()
        binv = b.inverse()
        lam1 = 1 - binv
        S = 2 - binv
        assert slope == lam1 / S
        assert intercept == (mpq(1, 2) + lam1 * (b - 1) / 2) / S
        assert float(slope) == pytest.approx(0.27639320225002103036, abs=1e-15)
        assert float(intercept) == pytest.approx(0.44721359549995793928, abs=1e-15)

    def test_onethree_lower_interval(self):
        r = detect_matching(exact(1, 3, mpq(1, 10)), 10)
        assert r.time == 3
        slope, intercept = interval_line(r, BetaSpec.multinacci(1, 3))
        assert float(intercept) == pytest.approx(0.454648039314333645, abs=1e-12)
        assert float(slope) == pytest.approx(0.564383610648902913, abs=1e-12)

    def test_integer_beta_degenerate_line(self):
        r = detect_matching(
            TransformParams.make(BetaSpec.from_value(2.0), 0.0), 5
        )
        slope, intercept = interval_line(r, BetaSpec.from_value(2.0))
        assert slope == pytest.approx(0.0, abs=1e-15)
        assert intercept == pytest.approx(0.5, abs=1e-15)

    def test_rejects_unmatched_record(self):
        r = detect_matching(
            TransformParams.make(BetaSpec.from_value(1.9), 0.2), 100
        )
        with pytest.raises(ValueError):
            interval_line(r, BetaSpec.from_value(1.9))


class TestCoefficientSum:
    def test_single_term_lower_interval(self):
        r = detect_matching(exact(1, 2, mpq(1, 10)), 10)
        c = coefficient_sum(r, PHI)
        b = F.beta()
        assert c == (b - 1) / b
        assert c.sign() == 1

    def test_golden_half_three_terms(self):
        p = exact(1, 2, mpq(1, 2))
        r = detect_matching(p, 10)
        c = coefficient_sum(r, PHI)
        b = F.beta()
        ds = delta_sequence(p, 4)
        expected = (
            ds.entries[0] / b
            + (b + 1) * ds.entries[1] / b**2
            + (b**2 + b + 1) * ds.entries[2] / b**3
        )
        assert c == expected
        assert c.sign() == 1

    def test_sign_matches_slope_sign(self):
        res = scan_intervals(1, 2, (2 - F.beta(), 1), 128, 500)
        for iv in res:
            assert iv.csum_sign == iv.slope.sign()


class TestScan:
    def test_lower_range_single_interval(self):
        res = scan_intervals(1, 2, (0, 2 - F.beta()), 64, 10)
        assert len(res) == 1
        assert len(res.unmatched) == 0
        iv = res[0]
        assert iv.record.time == 2
        assert iv.record.prefix_a == (0, 0)
        assert iv.record.prefix_b == (1, 1)
        assert float(iv.slope) == pytest.approx(0.276393202250021, abs=1e-12)
        assert float(iv.intercept) == pytest.approx(0.447213595499958, abs=1e-12)

    def test_lower_range_other_field(self):
        f23 = BetaSpec.multinacci(2, 3).field
        res = scan_intervals(2, 3, (0, 3 - f23.beta()), 32, 10)
        assert len(res) == 1
        assert res[0].record.time == 3

    def test_upper_range_structure(self):
        res = scan_intervals(1, 2, (2 - F.beta(), 1), 512, 1000)
        assert res.residual_fraction < 0.01
        step_w = res.span / 512
        prev_hi = None
        for iv in res:
            assert iv.record.matched
            assert iv.record.time >= 3  # never before m+1 in this regime
            assert iv.lo < iv.hi
            # brackets ordered and tight
            assert iv.lo_bracket[0] <= iv.lo_bracket[1]
            assert iv.hi_bracket[0] <= iv.hi_bracket[1]
            if prev_hi is not None:
                assert prev_hi <= iv.lo
            prev_hi = iv.hi
            inner_cut = iv.lo_bracket[1] - iv.lo_bracket[0]
            assert inner_cut <= step_w / 1024 or iv.lo_bracket[0] == iv.lo_bracket[1]

    def test_interval_records_constant_inside(self):
        res = scan_intervals(1, 2, (2 - F.beta(), 1), 64, 500)
        iv = max(res, key=lambda v: float(v.hi) - float(v.lo))
        key = iv.record.class_key()
        lo = float(iv.lo)
        hi = float(iv.hi)
        for frac in (0.25, 0.5, 0.75):
            a = mpq(round((lo + frac * (hi - lo)) * 10**9), 10**9)
            r = detect_matching(TransformParams.make(PHI, a), 500)
            assert r.class_key() == key

    def test_deterministic_under_threads(self):
        kw = dict(alpha_range=(mpq(45, 100), mpq(60, 100)), grid=24, max_iter=200)
        r1 = scan_intervals(1, 2, threads=1, **kw)
        r2 = scan_intervals(1, 2, threads=2, **kw)
        assert len(r1) == len(r2)
        for a, b in zip(r1, r2):
            assert a.record == b.record
            assert a.lo == b.lo and a.hi == b.hi
            assert a.slope == b.slope

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            scan_intervals(1, 2, (mpq(1, 2), mpq(1, 4)), 8, 10)
        with pytest.raises(ValueError):
            scan_intervals(1, 2, (0, mpq(1, 2)), 1, 10)
        with pytest.raises(TypeError):
            scan_intervals(1, 2, (0.0, 0.5), 8, 10)


class TestMonotonicity:
    def _interval_with_time(self, res, t):
        for iv in res:
            if iv.record.time == t:
                return iv
        raise AssertionError(f"no interval with time {t}")

    def test_first_step_after_m_decreases(self):
        res = scan_intervals(1, 2, (2 - F.beta(), 1), 256, 500)
        iv = self._interval_with_time(res, 3)  # m + 1
        assert classify_monotonicity(iv) == "decreasing"
        assert iv.record.delta_k_sign == "-"

    def test_second_step_after_m_increases(self):
        res = scan_intervals(1, 2, (2 - F.beta(), 1), 256, 500)
        iv = self._interval_with_time(res, 4)  # m + 2, holds alpha = 1/2
        assert classify_monotonicity(iv) == "increasing"
        assert iv.lo <= mpq(1, 2) <= iv.hi

    def test_all_scanned_intervals_classify_consistently(self):
        res = scan_intervals(1, 2, (2 - F.beta(), 1), 256, 500)
        for iv in res:
            verdict = classify_monotonicity(iv)  # raises on sign conflict
            expect = "increasing" if iv.record.delta_k_sign == "+" else "decreasing"
            assert verdict == expect

    def test_other_field_consistency(self):
        # rational range strictly inside the upper regime (boundary ~0.268)
        res = scan_intervals(2, 2, (mpq(27, 100), 1), 128, 500)
        assert res.residual_fraction == 0.0
        for iv in res:
            classify_monotonicity(iv)

    def test_algebraic_grid_hits_certified_exceptions(self):
        # a grid anchored at the irrational regime boundary lands on
        # parameters whose orbit pair is periodic; each unmatched sample
        # must carry a never-matching certificate (they are measure zero,
        # so this does not contradict a.e. matching)
        f22 = BetaSpec.multinacci(2, 2).field
        res = scan_intervals(2, 2, (3 - f22.beta(), 1), 128, 500)
        assert 0 < len(res.unmatched) < 13
        b22 = BetaSpec.multinacci(2, 2)
        for a in res.unmatched:
            r = detect_matching(TransformParams.make(b22, a), 20000)
            assert r.certificate is not None

    def test_lower_regime_interval_rejected(self):
        res = scan_intervals(1, 2, (0, 2 - F.beta()), 16, 10)
        with pytest.raises(ValueError):
            classify_monotonicity(res[0])
