"""Acceptance gate: eleven end-to-end checks, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.  Each
check states the property, the sample sizes, and the tolerance it enforces;
everything here drives the public API only.
"""

import random
import time

import numpy as np
import pytest
from gmpy2 import mpq

from ibeta.density import build_series, eval_density, invariance_defect, normalization
from ibeta.dynamics import BetaSpec, TransformParams
from ibeta.matching import (
    delta_word_track,
    detect_matching,
    scan_intervals,
)
from ibeta.mvalue import (
    beta_gap_bounds,
    closed_forms,
    m_birkhoff,
    m_finite,
    m_series,
    monotone_table,
    symmetry_defect,
)

QM_GRID = [(q, m) for q in (1, 2, 3) for m in (2, 3, 4, 5)]
WORD_PAIRS = [(1, 2), (1, 3), (2, 2), (2, 3)]
SYMMETRY_BETAS = [(1, 2), (1, 3), (2, 4)]


def report(num, name, ok, detail):
    print(f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num:02d} {name}: {detail}"


def low_regime_alphas(beta, count):
    """count rationals filling [0, 1 - <beta>), strictly below the boundary."""
    bound = float(beta.field.q + 1) - beta.as_float()
    den = int(count / (bound - 1e-9)) + 1
    return [mpq(j, den) for j in range(count)]


def high_regime_alphas(beta, count, rng):
    out = []
    while len(out) < count:
        a = mpq(rng.randrange(1, 10**6), 10**6)
        if TransformParams.make(beta, a).regime == "high":
            out.append(a)
    return out


def symmetry_parameter_set():
    rng = random.Random(404)
    cases = []
    for q, m in SYMMETRY_BETAS:
        beta = BetaSpec.multinacci(q, m)
        for _ in range(100):
            cases.append((beta, mpq(rng.randrange(1, 10**6), 10**6)))
    return cases


def test_criterion_01_matching_time_is_m_below_the_boundary():
    t0 = time.perf_counter()
    checked = 0
    for q, m in QM_GRID:
        beta = BetaSpec.multinacci(q, m)
        for a in low_regime_alphas(beta, 25):
            rec = detect_matching(TransformParams.make(beta, a), m + 5)
            assert rec.matched and rec.time == m, (q, m, a, rec.time)
            checked += 1
    dt = time.perf_counter() - t0
    report(1, "matching at time m on the low regime", dt < 10.0,
           f"{checked} parameters over {len(QM_GRID)} (q,m), all time=m, {dt:.2f}s")


def test_criterion_02_series_fits_the_closed_forms():
    worst = 0.0
    for q, m in QM_GRID:
        beta = BetaSpec.multinacci(q, m)
        c = closed_forms(q, m)
        xs, ys = [], []
        for a in low_regime_alphas(beta, 50):
            v = m_series(TransformParams.make(beta, a), 1e-10)
            xs.append(float(a))
            ys.append(float(v.value))
        slope, intercept = np.polyfit(xs, ys, 1)
        rs = abs(slope - float(c.slope)) / float(c.slope) if m > 1 else 0.0
        ri = abs(intercept - float(c.intercept)) / float(c.intercept)
        worst = max(worst, rs, ri)
    printed = closed_forms(1, 2, diagnostics=True)
    bad = float(printed.intercept_simplified)
    good = float(printed.intercept)
    report(2, "least-squares fit matches closed forms", worst <= 1e-9,
           f"12 (q,m) pairs x 50 alphas, worst rel err {worst:.2e}; "
           f"simplified printed intercept at (1,2) evaluates to {bad:.6f} "
           f"(> 1, impossible) vs finite sum {good:.6f}")


def test_criterion_03_slope_and_intercept_increase_in_m():
    t0 = time.perf_counter()
    rows_checked = 0
    ok = True
    for q in range(1, 6):
        for row in monotone_table(q, range(2, 9)):
            rows_checked += 1
            if row.slope_increased is not None:
                ok = ok and row.slope_increased and row.intercept_increased
    dt = time.perf_counter() - t0
    report(3, "slope and intercept strictly increase in m", ok and dt < 5.0,
           f"q in 1..5, m in 2..8, {rows_checked} rows, {dt:.2f}s")


def test_criterion_04_reflection_symmetry():
    worst = 0.0
    beta24 = BetaSpec.multinacci(2, 4).as_float()
    assert beta24 == pytest.approx(2.974449244, abs=1e-9)
    for beta, a in symmetry_parameter_set():
        d = symmetry_defect(TransformParams.make(beta, a), 1e-9)
        worst = max(worst, d)
    report(4, "M(alpha) + M(1-<beta+alpha>) = 1", worst <= 1e-6,
           f"300 parameters over 3 fields (beta_24={beta24:.9f}), "
           f"worst defect {worst:.2e}")


def test_criterion_05_root_gap_bound_chain():
    width = mpq(1, 10**30)
    count = 0
    for q in range(1, 6):
        for m in range(2, 11):
            beta_gap_bounds(q, m, width)  # raises GapOrderingError on failure
            count += 1
    report(5, "upper > gap > lower for consecutive roots", True,
           f"{count} (q,m) pairs certified at enclosure width 1e-30")


def test_criterion_06_delta_word_laws():
    rng = random.Random(606)
    total_words = 0
    for q, m in WORD_PAIRS:
        beta = BetaSpec.multinacci(q, m)
        bound = 2 ** (m + 1) - 3
        for a in high_regime_alphas(beta, 1000, rng):
            words = delta_word_track(TransformParams.make(beta, a), 1000)
            first = words[0]
            assert first.sign == -1 and first.e == (0,) * (m - 1) + (q,), (q, m, a)
            distinct = {(w.sign, w.e) for w in words if w.sign != 0}
            assert len(distinct) <= bound, (q, m, a, len(distinct))
            total_words += len(words)
    report(6, "delta-word start, transitions, cardinality", True,
           f"4 pairs x 1000 alphas, horizon 1000, {total_words} words; "
           "every word re-derived from exact coordinates in the tracker")


def test_criterion_07_almost_every_alpha_matches():
    rng = random.Random(707)
    lines = []
    ok = True
    for q, m in WORD_PAIRS:
        beta = BetaSpec.multinacci(q, m)
        matched = certified = undecided = 0
        for a in high_regime_alphas(beta, 10**4, rng):
            rec = detect_matching(TransformParams.make(beta, a), 10**4)
            if rec.matched:
                matched += 1
            elif rec.certificate is not None:
                certified += 1
            else:
                undecided += 1
        frac = matched / 10**4
        ok = ok and frac >= 0.99
        lines.append(f"({q},{m}) {frac:.4f} matched, {certified} certified "
                     f"never-matching, {undecided} undecided")
    report(7, "at least 99% of random alphas match", ok, "; ".join(lines))


def test_criterion_08_slope_sign_equals_csum_sign():
    sign_of = {"+": 1, "-": -1}
    violations = 0
    intervals = 0
    for q, m in WORD_PAIRS:
        f = BetaSpec.multinacci(q, m).field
        lo = f.one() * (q + 1) - f.beta()  # 1 - <beta> exactly
        res = scan_intervals(q, m, (lo, mpq(1)), 2**12, 400)
        for itv in res:
            intervals += 1
            s = itv.slope.sign()
            if not (s == itv.csum_sign == sign_of[itv.record.delta_k_sign]):
                violations += 1
    report(8, "sign(slope) = sign(C^k) = sign(delta^k)", violations == 0,
           f"{intervals} matching intervals over 4 high-regime scans at "
           f"grid 2^12, {violations} violations")


def test_criterion_09_three_routes_agree():
    rng = random.Random(909)
    finite_pairs = 0
    worst_fs = 0.0
    worst_bs = 0.0
    for i in range(20):
        if i % 2 == 0:
            beta = BetaSpec.multinacci(rng.choice((1, 2, 3)), rng.choice((2, 3, 4)))
            alpha = mpq(rng.randrange(0, 970_000), 10**6)
        else:
            beta = BetaSpec.from_value(rng.uniform(1.5, 3.0))
            alpha = rng.uniform(0.0, 0.97)
        params = TransformParams.make(beta, alpha)
        vs = m_series(params, 1e-10)
        rec = detect_matching(params, 10**4)
        if rec.matched:
            vf = m_finite(rec, beta, alpha)
            worst_fs = max(worst_fs, abs(float(vf.value) - float(vs.value)))
            finite_pairs += 1
        vb = m_birkhoff(params, 10**6, 10**3, 909 + i)
        dev = abs(vb.value - float(vs.value))
        worst_bs = max(worst_bs, dev / vb.error_bound)
    ok = worst_fs <= 1e-10 and worst_bs <= 4.0
    report(9, "series, finite sum, and Birkhoff agree", ok,
           f"20 random (beta, alpha) with beta > sqrt(2); finite route on "
           f"{finite_pairs} matched cases, worst |finite-series| {worst_fs:.2e}; "
           f"worst Birkhoff deviation {worst_bs:.2f} standard errors at 1e6 "
           "iterations")


def test_criterion_10_density_is_a_valid_invariant_density():
    worst_norm = 0.0
    worst_neg = 0.0
    worst_inv = 0.0
    worst_tilde = 0.0
    cases = symmetry_parameter_set()[::10]  # every 10th: 30 parameters
    for beta, a in cases:
        p = TransformParams.make(beta, a)
        series = build_series(p, 1e-10)
        K = normalization(series)
        worst_norm = max(worst_norm,
                         abs(float(series.step.total()) / float(K.value) - 1.0))
        tilde = build_series(p, 1e-10, "tilde")
        for j in range(64):
            x = mpq(2 * j + 1, 128)
            g = eval_density(series, x)
            worst_neg = min(worst_neg, float(g))
            gt = eval_density(tilde, x)
            worst_tilde = max(worst_tilde, abs(float(g) - float(gt)))
        for j in range(1, 21):
            t = mpq(j, 21)
            worst_inv = max(worst_inv, invariance_defect(p, series, t))
    ok = (worst_norm <= 1e-9 and worst_neg >= -1e-12 and worst_inv <= 1e-9
          and worst_tilde <= 1e-6)
    report(10, "normalized, nonnegative, invariant density", ok,
           f"{len(cases)} parameters: norm defect {worst_norm:.2e}, "
           f"min value {worst_neg:.2e}, invariance defect {worst_inv:.2e}, "
           f"tilde mismatch {worst_tilde:.2e} off the critical orbits")


def _shared_boundary_jumps(q, m, grid):
    """Jumps of the piecewise-linear M-curve at genuinely shared interval
    boundaries; pairs separated by unresolved structure are skipped."""
    beta = BetaSpec.multinacci(q, m)
    res = scan_intervals(q, m, (mpq(0), mpq(1)), grid, 400)
    ivs = sorted(res.intervals, key=lambda iv: float(iv.lo))

    def klass(a):
        rec = detect_matching(TransformParams.make(beta, a), 400)
        return rec.class_key() if rec.matched else None

    jumps = []
    skipped = 0
    for x, y in zip(ivs, ivs[1:]):
        if float(y.lo - x.hi) > 1e-6:
            skipped += 1
            continue
        kx, ky = x.record.class_key(), y.record.class_key()
        lo, hi = x.hi, y.lo
        for _ in range(40):
            mid = (lo + hi) / 2
            km = klass(mid)
            if km == kx:
                lo = mid
            elif km == ky:
                hi = mid
            else:
                skipped += 1
                break
        else:
            jumps.append(abs(float(x.m_at(lo)) - float(y.m_at(hi))))
    return len(ivs), jumps, skipped


def test_criterion_11_scan_curves_are_piecewise_linear_and_continuous():
    lines = []
    ok = True
    for q, m in [(1, 2), (2, 4)]:
        n, jumps, skipped = _shared_boundary_jumps(q, m, 2**10)
        worst = max(jumps) if jumps else 0.0
        ok = ok and jumps and worst <= 1e-4
        lines.append(f"({q},{m}) {n} intervals, {len(jumps)} shared boundaries "
                     f"tightened, worst jump {worst:.2e}, {skipped} pairs with "
                     "finer structure between them")
    report(11, "M-curve continuous across interval boundaries", ok,
           "; ".join(lines))
