"""The approximation functional M by three independent routes.

M_beta(alpha) is the mean of x under the normalized invariant density of
the shifted beta-map.  The routes:

  * m_series    -- truncated orbit series with a certified tail bound,
                   cross-checked against direct step-function integration
  * m_finite    -- exact finite sum available once the critical orbits
                   match, error zero in exact arithmetic
  * m_birkhoff  -- seeded Monte Carlo time average, statistical error

plus the exact closed-form constants (normalization reciprocal, slope,
intercept of the left linear piece) for the multinacci family, certified
bounds for the gap between consecutive multinacci roots, the symmetry
defect |M(alpha) + M(alpha*) - 1|, and a table of slope/intercept
monotonicity with certified strictness flags.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from gmpy2 import mpq

from .density import DensitySeries, build_series, normalization
from .dynamics import BetaSpec, TransformParams, symmetry_partner
from .matching import MatchingRecord, interval_line
from .numberfield import (
    FieldElement,
    SignRefinementError,
    get_field,
    isolate_root,
)

__all__ = [
    "MValue",
    "MultinacciConstants",
    "GapBounds",
    "GapOrderingError",
    "MonotoneRow",
    "m_series",
    "m_finite",
    "m_birkhoff",
    "closed_forms",
    "beta_gap_bounds",
    "symmetry_defect",
    "monotone_table",
]

Number = Union[float, mpq, FieldElement]

METHODS = ("series", "finite_sum", "birkhoff", "closed_form")

# two rational root brackets this narrow certify every gap inequality we test
DEFAULT_GAP_WIDTH = mpq(1, 10**30)

_EPS = sys.float_info.epsilon


class GapOrderingError(ArithmeticError):
    """Certified enclosures failed to order upper > gap > lower."""


def _sign(x) -> int:
    if isinstance(x, FieldElement):
        return x.sign()
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


@dataclass(frozen=True)
class MValue:
    """One computed value of the functional.

    value may be exact (mpq or FieldElement) or float depending on the
    route.  error_bound is a certified truncation bound for series and
    finite_sum (zero when the computation is exact) and a batch-means
    standard error for birkhoff.  Float-route bounds include a roundoff
    allowance; they are working estimates, not proofs.
    """

    value: Number
    method: str
    error_bound: float

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not (math.isfinite(self.error_bound) and self.error_bound >= 0):
            raise ValueError("error_bound must be finite and nonnegative")
        v = float(self.value)
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"functional value {v} outside [0, 1]")

    def value_float(self) -> float:
        return float(self.value)

    def __repr__(self):
        return (
            f"MValue({float(self.value):.12g}, {self.method},"
            f" +-{self.error_bound:.3g})"
        )


@dataclass(frozen=True)
class MultinacciConstants:
    """Exact constants of the left linear piece for a multinacci slope.

    K_recip is the reciprocal of the normalization integral at alpha = 0,
    slope and intercept describe alpha -> M(alpha) on the lower parameter
    range.  intercept_simplified, when requested, evaluates an algebraic
    rearrangement of the intercept that fails its own desk check (it lands
    above 1 already at q = 1, m = 2); it is retained only so the
    disagreement stays visible.
    """

    q: int
    m: int
    K_recip: Number
    slope: Number
    intercept: Number
    intercept_simplified: Optional[Number] = None

    def __post_init__(self):
        s = _sign(self.slope)
        expected = 0 if self.m == 1 else 1
        if s != expected:
            raise ValueError("slope sign violates the linear-piece law")
        if not (_sign(self.intercept) > 0 and _sign(self.intercept - 1) < 0):
            raise ValueError("intercept must lie strictly inside (0, 1)")

    def as_floats(self) -> Tuple[float, float, float]:
        return (float(self.K_recip), float(self.slope), float(self.intercept))


class GapBounds(NamedTuple):
    upper: float
    gap: float
    lower: float


class MonotoneRow(NamedTuple):
    m: int
    slope: Number
    intercept: Number
    slope_increased: Optional[bool]
    intercept_increased: Optional[bool]


# ---------------------------------------------------------------------------
# series route


def _half_square_sum(series: DensitySeries):
    """sum_k (T^k(1)^2 - T^k(0)^2) / (2 beta^k) over the stored depth."""
    params = series.params
    if params.is_exact:
        binv = params.beta.beta_number().inverse()
        field = params.beta.field
        acc = field.zero()
        w = field.one()
        for u, v in zip(series.one_orbit, series.zero_orbit):
            acc = acc + w * (u * u - v * v)
            w = w * binv
        return acc / 2
    b = params.beta.as_float()
    acc = 0.0
    w = 1.0
    for u, v in zip(series.one_orbit, series.zero_orbit):
        acc += w * (u * u - v * v)
        w /= b
    return acc / 2.0


def _routes_agree(num_orbit, num_step, exact: bool) -> None:
    if exact:
        if not (num_orbit - num_step).is_zero:
            raise ArithmeticError(
                "orbit series and step integration disagree in exact mode"
            )
        return
    scale = max(1.0, abs(num_step))
    if abs(num_orbit - num_step) > 1e-9 * scale:
        raise ArithmeticError(
            f"orbit series {num_orbit!r} and step integration {num_step!r}"
            " disagree beyond float tolerance"
        )


def _quotient_error(ta: float, tk: float, kf: float, mf: float) -> float:
    # |A/K - A_N/K_N| <= (dA + |M_N| dK) / (K_N - dK), needs K_N > dK
    if kf - tk <= 0.0:
        return math.inf
    return (ta + abs(mf) * tk) / (kf - tk) * (1.0 + 1e-9)


def _matched_float_tail(series: DensitySeries) -> float:
    """Residual-sum allowance when a float run stops at approximate matching.

    The observed gap d at the stopping time can grow by a factor beta per
    step until it saturates at 1; summing min(1, d beta^i) / beta^(k+i)
    gives beta^-k * d * (sat + beta/(beta-1)) with sat the saturation time.
    """
    k = series.depth
    d = abs(series.one_orbit[k] - series.zero_orbit[k])
    if d == 0.0:
        return 0.0
    b = series.params.beta.as_float()
    sat = max(0.0, math.ceil(math.log(1.0 / d) / math.log(b)))
    return b ** (-k) * d * (sat + b / (b - 1.0))


def _clamped_unit(value, exact: bool):
    if exact:
        if _sign(value) >= 0 and _sign(value - 1) <= 0:
            return value
        value = float(value)
    return min(1.0, max(0.0, float(value)))


def m_series(params: TransformParams, tol: float = 1e-10) -> MValue:
    """M via the orbit series, certified to within tol.

    The numerator sum_k (T^k(1)^2 - T^k(0)^2)/(2 beta^k) and the
    denominator K are truncated together; the quotient error is propagated
    from the two tail bounds and the depth is increased until it drops
    below tol.  The numerator is also recomputed by integrating x against
    the step form of the unnormalized density and the two routes must
    agree.  When the orbits match in exact mode the sums are finite and
    the result is exact.
    """
    tol = float(tol)
    if not tol > 0:
        raise ValueError("tol must be positive")
    inner = tol
    for _ in range(8):
        series = build_series(params, inner)
        num = _half_square_sum(series)
        _routes_agree(num, series.step.moment(), params.is_exact)
        K = normalization(series)
        kf = K.value_float()
        mf = float(num) / kf
        if params.is_exact:
            if series.matched_at is not None:
                return MValue(num / K.value, "series", 0.0)
            tail = series.tail_bound
            err = _quotient_error(tail / 4.0, tail / 2.0, kf, mf)
            if err <= tol:
                value = _clamped_unit(num / K.value, True)
                return MValue(value, "series", err)
        else:
            floor = 32.0 * _EPS * (series.depth + 1) * (1.0 + abs(mf)) / kf
            if series.matched_at is not None:
                t = _matched_float_tail(series)
                err = _quotient_error(t, t, kf, mf) + floor
                if err <= tol:
                    return MValue(
                        _clamped_unit(mf, False), "series", err
                    )
                raise ArithmeticError(
                    f"approximate matching floors the error at {err:.3g},"
                    f" above the requested {tol:.3g}"
                )
            tail = series.tail_bound
            err = _quotient_error(tail / 4.0, tail / 2.0, kf, mf) + floor
            if err <= tol:
                return MValue(_clamped_unit(mf, False), "series", err)
            if floor > tol:
                raise ArithmeticError(
                    f"float roundoff floor {floor:.3g} exceeds the"
                    f" requested {tol:.3g}; use an exact beta"
                )
        # tail bound too loose for this K; shrink the depth target
        if math.isfinite(err) and err > 0.0:
            inner = inner * max(min(0.25, tol / err), 1e-6)
        else:
            inner = inner / 16.0
    raise ArithmeticError("could not certify the requested tolerance")


# ---------------------------------------------------------------------------
# finite route


def m_finite(record: MatchingRecord, beta: BetaSpec, alpha) -> MValue:
    """Exact M from a matched record's weighted finite sum.

    The value is intercept + slope * alpha with the line taken from the
    record's frozen digit prefixes; with an exact beta and a rational or
    field alpha the evaluation is exact and the error bound is zero.
    """
    if not record.matched:
        raise ValueError("m_finite needs a matched record")
    slope, intercept = interval_line(record, beta)
    if beta.is_exact and not isinstance(alpha, float):
        value = intercept + slope * alpha
        return MValue(value, "finite_sum", 0.0)
    vf = float(intercept) + float(slope) * float(alpha)
    err = 64.0 * _EPS * (record.time + 1)
    return MValue(min(1.0, max(0.0, vf)), "finite_sum", err)


# ---------------------------------------------------------------------------
# Birkhoff route


_JITTER = 2.0**-52


def m_birkhoff(
    params: TransformParams,
    iters: int = 10**6,
    burn_in: int = 10**3,
    seed: int = 0,
) -> MValue:
    """Time average of x along a single seeded orbit.

    Starts from a uniform x0 drawn with the given seed, discards burn_in
    steps, then averages the next iters iterates.  Each step adds uniform
    noise below machine precision: a float orbit of an integer slope
    collapses onto the dyadics and absorbs at zero, and the noise stands
    in for the unseen low bits of a real starting point; for fractional
    slopes it stays at the scale of ordinary roundoff.  The error bound
    is the standard error of ~1000 equal batch means, which absorbs the
    orbit's short-range correlation; it is statistical, not certified.
    Trust it only above the ergodicity threshold beta > sqrt(2).
    """
    iters = int(iters)
    if iters < 1000:
        raise ValueError("need iters >= 1000 for a usable batch estimate")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    rng = np.random.default_rng(seed)
    x = float(rng.random())
    b = params.beta.as_float()
    a = params.alpha_float()
    floor = math.floor
    if burn_in:
        for u in rng.random(burn_in).tolist():
            y = b * x + a + u * _JITTER
            x = y - floor(y)
    batch = max(1, iters // 1000)
    nbatch = iters // batch
    means = np.empty(nbatch, dtype=float)
    for j in range(nbatch):
        s = 0.0
        for u in rng.random(batch).tolist():
            y = b * x + a + u * _JITTER
            x = y - floor(y)
            s += x
        means[j] = s / batch
    rest = 0.0
    leftover = iters - nbatch * batch
    if leftover:
        for u in rng.random(leftover).tolist():
            y = b * x + a + u * _JITTER
            x = y - floor(y)
            rest += x
    mean = (float(means.sum()) * batch + rest) / iters
    stderr = float(np.std(means, ddof=1)) / math.sqrt(nbatch)
    return MValue(min(1.0, max(0.0, mean)), "birkhoff", stderr)


# ---------------------------------------------------------------------------
# closed forms


def closed_forms(q: int, m: int, diagnostics: bool = False) -> MultinacciConstants:
    """Exact constants of the lower linear piece at beta_{q,m}.

    K_recip = (beta - 1) / (beta - m q / beta^m); the slope comes from the
    weighted-derivative sum and the intercept from the finite sum of the
    orbit products at alpha = 0, both reduced in the field and rounded
    only on output.  m = 1 degenerates to the integer map beta = q with a
    flat functional: slope 0, intercept 1/2.

    diagnostics=True also evaluates the simplified single-fraction
    rearrangement of the intercept, which does not reproduce the finite
    sum (see MultinacciConstants).
    """
    if q < 1:
        raise ValueError("need q >= 1")
    if m == 1:
        if q < 2:
            raise ValueError("m = 1 needs q >= 2 so that beta = q > 1")
        return MultinacciConstants(
            q=q, m=1, K_recip=mpq(1), slope=mpq(0), intercept=mpq(1, 2)
        )
    if m < 1:
        raise ValueError("need m >= 1")
    field = get_field(q, m)
    b = field.beta()
    one = field.one()
    pw = [one]
    for _ in range(m):
        pw.append(pw[-1] * b)
    bm = pw[m]
    denom = b - mpq(m * q) / bm
    K_recip = (b - 1) / denom
    slope = (q * (m - 1) - 2 + mpq(q * (m + 1)) / bm) / ((b - 1) * denom)
    # sum_{j=i+1}^m q/beta^j built backwards so each tail reuses the last
    acc = field.zero()
    tails = [None] * (m + 1)
    tails[m] = acc
    for i in range(m - 1, 0, -1):
        acc = acc + q / pw[i + 1]
        tails[i] = acc
    inner = field.from_rational(mpq(1, 2))
    for i in range(1, m):
        t = tails[i]
        inner = inner + pw[i] * t * t / 2
    intercept = K_recip * inner
    simplified = None
    if diagnostics:
        big = bm
        num = (
            2 / (big - 1)
            - q / (big * (big - 1))
            - (2 * q * q * (m - 1) - q * m) / big
        )
        den = 2 * (q + 1 - mpq(q * (m + 1)) / big)
        simplified = mpq(1, 2) + num / den
    return MultinacciConstants(
        q=q,
        m=m,
        K_recip=K_recip,
        slope=slope,
        intercept=intercept,
        intercept_simplified=simplified,
    )


# ---------------------------------------------------------------------------
# root gaps


def beta_gap_bounds(q: int, m: int, width=DEFAULT_GAP_WIDTH) -> GapBounds:
    """Certified bounds for the gap between consecutive multinacci roots.

    upper = q / beta_{q,m+1}^m, gap = beta_{q,m+1} - beta_{q,m}, and
    lower = q (1 - 1/beta_{q,m}) / beta_{q,m+1}^m, each enclosed in
    rational interval arithmetic from root brackets of the given width.
    The chain upper > gap > lower must separate at that width; a failure
    raises GapOrderingError with the offending enclosures.
    """
    e0 = isolate_root(q, m, width)
    e1 = isolate_root(q, m + 1, width)
    pw_lo = e1.lo**m
    pw_hi = e1.hi**m
    upper = (q / pw_hi, q / pw_lo)
    gap = (e1.lo - e0.hi, e1.hi - e0.lo)
    lower = (q * (1 - 1 / e0.lo) / pw_hi, q * (1 - 1 / e0.hi) / pw_lo)
    if not (upper[0] > gap[1] and gap[0] > lower[1]):
        raise GapOrderingError(
            f"bound chain failed to separate for q={q}, m={m}: "
            f"upper {[float(v) for v in upper]}, "
            f"gap {[float(v) for v in gap]}, "
            f"lower {[float(v) for v in lower]}"
        )
    return GapBounds(
        upper=float((upper[0] + upper[1]) / 2),
        gap=float((gap[0] + gap[1]) / 2),
        lower=float((lower[0] + lower[1]) / 2),
    )


# ---------------------------------------------------------------------------
# symmetry and monotonicity


def symmetry_defect(params: TransformParams, tol: float = 1e-9) -> float:
    """|M(alpha) + M(alpha*) - 1| with alpha* the reflection partner.

    Both sides run through m_series at the given tolerance.  In exact
    mode the partner parameter is irrational but still lives in the
    field; when both critical orbit pairs match the defect comes out
    exact, otherwise it is bounded by the two certified series errors.
    """
    partner = symmetry_partner(params)
    mirrored = TransformParams.make(params.beta, partner, eps=params.eps)
    v1 = m_series(params, tol)
    v2 = m_series(mirrored, tol)
    return abs(float(v1.value + v2.value - 1))


def _interval_of(x, prec: int):
    if isinstance(x, FieldElement):
        return x.interval(prec)
    r = mpq(x)
    return (r, r)


def _certified_less(x, y) -> bool:
    """Strict x < y across different fields via shrinking rational brackets."""
    for prec in (64, 128, 256, 512, 1024, 2048):
        xlo, xhi = _interval_of(x, prec)
        ylo, yhi = _interval_of(y, prec)
        if xhi < ylo:
            return True
        if yhi < xlo:
            return False
    raise SignRefinementError(
        "could not separate the two values at 2048 bits"
    )


def monotone_table(q: int, m_range: Sequence[int]) -> List[MonotoneRow]:
    """Closed-form slope and intercept rows with certified strictness flags.

    Rows are sorted by m; each row's flags compare it against the previous
    row (None on the first).  Comparisons happen on certified rational
    brackets, never on doubles, so a True flag is a proof of strict
    increase at the printed m.
    """
    ms = sorted({int(v) for v in m_range})
    if not ms:
        raise ValueError("m_range is empty")
    if ms[0] < 2:
        raise ValueError("m_range must stay >= 2")
    rows: List[MonotoneRow] = []
    prev = None
    for m in ms:
        c = closed_forms(q, m)
        if prev is None:
            rows.append(MonotoneRow(m, c.slope, c.intercept, None, None))
        else:
            rows.append(
                MonotoneRow(
                    m,
                    c.slope,
                    c.intercept,
                    _certified_less(prev.slope, c.slope),
                    _certified_less(prev.intercept, c.intercept),
                )
            )
        prev = c
    return rows
