"""Matching detection, delta-word algebra, and matching-interval scans.

Matching means the orbits of 1 and 0 under T_{beta,alpha} meet: some
delta^k = T^k(1) - T^k(0) is zero, after which the two orbits coincide
forever.  On a parameter interval where both critical digit prefixes are
constant, the approximation functional M_beta is affine in alpha with slope
sign given by the last nonzero delta; this module computes all of it.

Exact mode (multinacci beta, alpha in Q(beta)) runs on an integer kernel:
orbit points have a fixed common denominator D and bounded integer
coordinates in the power basis, so a step is a handful of big-int
operations, branch digits are certified through outward-rounded power
tables with an exact fallback, and zero tests are literal.  Since the state
space of coordinate pairs is finite, every exact orbit pair is eventually
periodic: a state repeat (found by Brent's algorithm) certifies that
matching can never occur.  Float mode uses |delta| <= MATCH_EPS and labels
every verdict approximate.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpq, mpz

from .dynamics import BetaSpec, TransformParams, step_T
from .numberfield import FieldElement, MultinacciField, as_rational, get_field

__all__ = [
    "MATCH_EPS",
    "WordDecompositionError",
    "MonotonicityConflict",
    "DeltaWord",
    "CycleCertificate",
    "MatchingRecord",
    "MatchingInterval",
    "ScanResult",
    "detect_matching",
    "delta_word_track",
    "fixed_point_P",
    "scan_intervals",
    "interval_line",
    "coefficient_sum",
    "classify_monotonicity",
]

MATCH_EPS = 1e-10

KERNEL_PREC = 192


class WordDecompositionError(RuntimeError):
    """A delta value failed to decompose as a signed {0,q}-word.

    Either an implementation bug or a genuine counterexample to the rule
    that every orbit difference stays a word of this shape; never
    swallowed.
    """


class MonotonicityConflict(RuntimeError):
    """The delta-sign rule, the coefficient sum, and the fitted slope
    disagree about monotonicity on a matching interval."""


@dataclass(frozen=True)
class DeltaWord:
    """delta^k written as sign * (0.e_1 ... e_m) in base beta, e_j in {0,q}."""

    sign: int  # +1, -1, or 0
    e: Tuple[int, ...]

    def __post_init__(self):
        if self.sign == 0 and any(self.e):
            raise ValueError("zero sign requires the zero word")
        if self.sign != 0 and not any(self.e):
            raise ValueError("nonzero sign requires a nonzero word")

    def value(self, field: MultinacciField) -> FieldElement:
        binv = field.beta().inverse()
        acc = field.zero()
        p = field.one()
        for ej in self.e:
            p = p * binv
            acc = acc + ej * p
        return self.sign * acc

    def label(self) -> str:
        digits = ",".join(str(x) for x in self.e)
        if self.sign == 0:
            return "zero"
        return ("+" if self.sign > 0 else "-") + f"({digits})"


@dataclass(frozen=True)
class CycleCertificate:
    """Exact state repeat: the orbit pair at step `closing` equals the pair
    at step `closing - period`, so delta cycles through nonzero values and
    matching is provably impossible."""

    period: int
    closing: int


@dataclass(frozen=True)
class MatchingRecord:
    matched: bool
    time: Optional[int]
    prefix_a: Tuple[int, ...]  # digits of the orbit of 0
    prefix_b: Tuple[int, ...]  # digits of the orbit of 1
    delta_k_sign: Optional[str]  # sign of the last nonzero delta, '+'/'-'
    mode: str  # "exact" | "approximate"
    eps: float
    certificate: Optional[CycleCertificate]
    iterations: int

    def class_key(self):
        """Grouping key for scans: matched records with identical prefixes
        and time belong to the same matching interval."""
        if self.matched:
            return (self.time, self.prefix_a, self.prefix_b)
        return None


@dataclass(frozen=True)
class MatchingInterval:
    beta: BetaSpec
    lo: object
    hi: object
    lo_bracket: tuple  # (outside-or-edge, certified-inside)
    hi_bracket: tuple  # (certified-inside, outside-or-edge)
    record: MatchingRecord
    slope: object
    intercept: object
    csum_sign: int

    def m_at(self, alpha):
        return self.slope * alpha + self.intercept

    def slope_float(self) -> float:
        return float(self.slope)

    def intercept_float(self) -> float:
        return float(self.intercept)


class ScanResult(Sequence):
    """Ordered matching intervals plus the unmatched residual samples."""

    def __init__(self, intervals, unmatched, grid, span):
        self.intervals = list(intervals)
        self.unmatched = tuple(unmatched)
        self.grid = grid
        self.span = span

    @property
    def residual_fraction(self) -> float:
        return len(self.unmatched) / self.grid

    @property
    def residual_measure(self) -> float:
        return self.residual_fraction * float(self.span)

    def __len__(self):
        return len(self.intervals)

    def __getitem__(self, i):
        return self.intervals[i]


# ---------------------------------------------------------------------------
# integer kernel


class _ExactKernel:
    """Orbit arithmetic for T_{beta,alpha} on integer coordinate vectors.

    A point x is stored as m integers c with x = sum c_i beta^i / D, where D
    is the common denominator of alpha's coefficients.  Multiplication by
    beta is a shift plus the reduction beta^m = q(beta^{m-1}+...+1); digits
    come from outward-rounded scaled power tables, falling back to an exact
    field-element floor when the enclosure straddles an integer.
    """

    __slots__ = ("field", "q", "m", "D", "avec", "plo", "phi", "den_scaled")

    def __init__(self, field: MultinacciField, alpha):
        self.field = field
        self.q = field.q
        self.m = field.m
        if isinstance(alpha, FieldElement):
            coeffs = alpha.as_fraction_coeffs()
            coeffs = tuple(mpq(c) for c in coeffs)
        else:
            coeffs = (mpq(alpha),) + (mpq(0),) * (field.m - 1)
        D = mpz(1)
        for c in coeffs:
            D = gmpy2.lcm(D, c.denominator)
        self.D = D
        self.avec = tuple(mpz(c.numerator * (D // c.denominator)) for c in coeffs)
        self.plo, self.phi = field._power_tables(KERNEL_PREC)
        self.den_scaled = D << KERNEL_PREC

    def start_pair(self):
        one = (self.D,) + (mpz(0),) * (self.m - 1)
        zero = (mpz(0),) * self.m
        return one, zero

    def _bounds(self, coords):
        lo = mpz(0)
        hi = mpz(0)
        for c, pl, ph in zip(coords, self.plo, self.phi):
            if c >= 0:
                lo += c * pl
                hi += c * ph
            else:
                lo += c * ph
                hi += c * pl
        return lo, hi

    def to_element(self, coords) -> FieldElement:
        D = self.D
        return self.field.element([mpq(c, D) for c in coords])

    def shift(self, coords):
        """Coordinates of beta * x (no alpha, no digit)."""
        t = self.q * coords[self.m - 1]
        out = [t]
        for i in range(1, self.m):
            out.append(coords[i - 1] + t)
        return out

    def step(self, coords):
        """One application of T; returns (new coords, digit)."""
        y = self.shift(coords)
        for i, a in enumerate(self.avec):
            y[i] += a
        lo, hi = self._bounds(y)
        dlo = lo // self.den_scaled
        dhi = hi // self.den_scaled
        if dlo == dhi:
            d = int(dlo)
        else:
            d = self.to_element(y).floor()
        y[0] -= d * self.D
        return tuple(y), d

    def diff_sign(self, c1, c0) -> int:
        diff = [a - b for a, b in zip(c1, c0)]
        if not any(diff):
            return 0
        lo, hi = self._bounds(diff)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        return self.to_element(diff).sign()


def _kernel_for(params: TransformParams) -> _ExactKernel:
    return _ExactKernel(params.beta.field, params.alpha)


# ---------------------------------------------------------------------------
# matching detection


def detect_matching(params: TransformParams, max_iter: int) -> MatchingRecord:
    """Find the first k <= max_iter with delta^k = 0, or certify/observe
    its absence.

    Exact mode runs Brent cycle detection on the coordinate pair alongside
    the zero test: a state repeat proves no matching can ever occur and is
    attached as a certificate.  An exhausted max_iter without either verdict
    leaves matched=False, certificate=None ("no matching observed").
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if params.is_exact:
        return _detect_exact(params, max_iter)
    return _detect_float(params, max_iter)


def _sign_char(s: int) -> Optional[str]:
    if s > 0:
        return "+"
    if s < 0:
        return "-"
    return None


def _detect_exact(params: TransformParams, max_iter: int) -> MatchingRecord:
    kern = _kernel_for(params)
    c1, c0 = kern.start_pair()
    a_digits = []
    b_digits = []
    prev = (c1, c0)
    tortoise = (c1, c0)
    power = 1
    lam = 0
    for k in range(1, max_iter + 1):
        prev = (c1, c0)
        c1, d1 = kern.step(c1)
        c0, d0 = kern.step(c0)
        b_digits.append(d1)
        a_digits.append(d0)
        if c1 == c0:
            last = kern.diff_sign(prev[0], prev[1])
            # delta^0 = 1 - 0 > 0 covers matching at the first step
            sign = _sign_char(last if k > 1 else 1)
            return MatchingRecord(
                matched=True,
                time=k,
                prefix_a=tuple(a_digits),
                prefix_b=tuple(b_digits),
                delta_k_sign=sign,
                mode="exact",
                eps=0.0,
                certificate=None,
                iterations=k,
            )
        hare = (c1, c0)
        lam += 1
        if hare == tortoise:
            return MatchingRecord(
                matched=False,
                time=None,
                prefix_a=tuple(a_digits),
                prefix_b=tuple(b_digits),
                delta_k_sign=None,
                mode="exact",
                eps=0.0,
                certificate=CycleCertificate(period=lam, closing=k),
                iterations=k,
            )
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
    return MatchingRecord(
        matched=False,
        time=None,
        prefix_a=tuple(a_digits),
        prefix_b=tuple(b_digits),
        delta_k_sign=None,
        mode="exact",
        eps=0.0,
        certificate=None,
        iterations=max_iter,
    )


def _detect_float(params: TransformParams, max_iter: int) -> MatchingRecord:
    x1 = 1.0
    x0 = 0.0
    a_digits = []
    b_digits = []
    prev_delta = 1.0
    for k in range(1, max_iter + 1):
        prev_delta = x1 - x0
        r1 = step_T(params, x1)
        r0 = step_T(params, x0)
        x1, x0 = r1.value, r0.value
        b_digits.append(r1.digit)
        a_digits.append(r0.digit)
        if abs(x1 - x0) <= MATCH_EPS:
            sign = _sign_char(1 if k == 1 else (1 if prev_delta > 0 else -1))
            return MatchingRecord(
                matched=True,
                time=k,
                prefix_a=tuple(a_digits),
                prefix_b=tuple(b_digits),
                delta_k_sign=sign,
                mode="approximate",
                eps=MATCH_EPS,
                certificate=None,
                iterations=k,
            )
    return MatchingRecord(
        matched=False,
        time=None,
        prefix_a=tuple(a_digits),
        prefix_b=tuple(b_digits),
        delta_k_sign=None,
        mode="approximate",
        eps=MATCH_EPS,
        certificate=None,
        iterations=max_iter,
    )


# ---------------------------------------------------------------------------
# delta words


def _decompose_word(kern: _ExactKernel, diff) -> DeltaWord:
    """Write a delta coordinate vector as sign * (0.e_1...e_m), or fail."""
    if not any(diff):
        return DeltaWord(0, (0,) * kern.m)
    # delta * beta^m has integer-combination coordinates s*(e_m, ..., e_1)
    coords = list(diff)
    for _ in range(kern.m):
        coords = kern.shift(coords)
    sign = 0
    e_rev = []
    for c in coords:
        num, rem = divmod(c, kern.D)
        if rem != 0:
            raise WordDecompositionError(
                f"delta * beta^m has non-integer coordinate {c}/{kern.D}"
            )
        n = int(num)
        if n != 0:
            s = 1 if n > 0 else -1
            if sign == 0:
                sign = s
            elif s != sign:
                raise WordDecompositionError(
                    "mixed signs in delta word coordinates"
                )
        e_rev.append(abs(n))
    if sign == 0:
        raise WordDecompositionError("nonzero delta decomposed to zero word")
    e = tuple(reversed(e_rev))
    bad = [x for x in e if x not in (0, kern.q)]
    if bad:
        raise WordDecompositionError(f"digits {e} outside {{0, {kern.q}}}")
    if all(x == kern.q for x in e):
        raise WordDecompositionError("forbidden all-q word (|delta| = 1)")
    return DeltaWord(sign, e)


def _normalize_word(sign: int, e: Tuple[int, ...]) -> DeltaWord:
    if not any(e):
        return DeltaWord(0, e)
    return DeltaWord(sign, e)


def _expected_next(word: DeltaWord, dshift: int, q: int) -> DeltaWord:
    """Apply the two-case evolution law to get word k+1 from word k.

    A branch shift equal to sign*e_1 (so 0 or +-q) keeps the sign and
    appends 0; a shift of sign*(e_1+1) (so +-1 or +-(q+1)) flips the sign,
    complements the remaining digits, and appends q.  Anything else is a
    law violation.
    """
    if word.sign == 0:
        if dshift != 0:
            raise WordDecompositionError(
                f"digit shift {dshift} after matching (must be 0)"
            )
        return word
    s = word.sign
    e1 = word.e[0]
    rest = word.e[1:]
    if dshift == s * e1:
        return _normalize_word(s, rest + (0,))
    if dshift == s * (e1 + 1):
        return _normalize_word(-s, tuple(q - x for x in rest) + (q,))
    raise WordDecompositionError(
        f"branch shift {dshift} incompatible with word {word.label()}"
    )


def delta_word_track(params: TransformParams, horizon: int):
    """The delta sequence as signed {0,q}-words, validated step by step.

    Each delta^k is decomposed independently from its exact coordinates and
    checked against the evolution law applied to the previous word; any
    mismatch aborts loudly.  Defined for the upper parameter regime
    (alpha >= 1 - <beta>), where delta^1 = -q/beta^m seeds the words; the
    tracker refuses the lower regime rather than guessing a seed.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if not params.is_exact:
        raise ValueError("delta words need exact arithmetic")
    if params.regime != "high":
        raise ValueError(
            "delta-word evolution is defined for alpha >= 1 - <beta>"
        )
    kern = _kernel_for(params)
    q, m = kern.q, kern.m
    c1, c0 = kern.start_pair()
    words = []
    prev_word = None
    for k in range(1, horizon + 1):
        c1, d1 = kern.step(c1)
        c0, d0 = kern.step(c0)
        diff = tuple(a - b for a, b in zip(c1, c0))
        word = _decompose_word(kern, diff)
        if k == 1:
            seed = DeltaWord(-1, (0,) * (m - 1) + (q,))
            if word != seed:
                raise WordDecompositionError(
                    f"first word {word.label()} is not {seed.label()}"
                )
        else:
            expected = _expected_next(prev_word, d1 - d0, q)
            if word != expected:
                raise WordDecompositionError(
                    f"step {k}: law predicts {expected.label()}, "
                    f"decomposition gives {word.label()}"
                )
        words.append(word)
        prev_word = word
        if word.sign == 0:
            break
    return words


def fixed_point_P(params: TransformParams):
    """P = (q - alpha)/(beta - 1); a fixed point of T when P lies in the
    branch of digit q."""
    if not params.beta.is_exact:
        raise ValueError("fixed point formula needs a multinacci beta")
    f = params.beta.field
    return (f.q - params.alpha) / (f.beta() - 1)


# ---------------------------------------------------------------------------
# interval algebra


def _line_terms_exact(record: MatchingRecord, field: MultinacciField):
    b = field.beta()
    binv = b.inverse()
    one = field.one()
    lam = [one]
    acc = one
    pw = one
    for aj, bj in zip(record.prefix_a, record.prefix_b):
        pw = pw * binv
        acc = acc + (aj - bj) * pw
        lam.append(acc)
    return lam


def interval_line(record: MatchingRecord, beta: BetaSpec):
    """(slope, intercept) of alpha -> M_beta(alpha) on the record's interval.

    With lambda_i = 1 + sum_{j<=i}(a_j - b_j)/beta^j, the functional is the
    lambda-weighted average of the orbit midpoints, each affine in alpha
    with derivative (beta^i - 1)/(beta - 1); the intercept extrapolates the
    frozen digit prefixes to alpha = 0.
    """
    if not record.matched:
        raise ValueError("interval line needs a matched record")
    if beta.is_exact:
        f = beta.field
        b = f.beta()
        lam = _line_terms_exact(record, f)
        S = lam[0]
        for t in lam[1:]:
            S = S + t
        if S.sign() <= 0:
            raise ValueError("nonpositive normalization; corrupt record")
        dg = f.zero()
        h = f.one()
        slope_num = f.zero()
        inter_num = lam[0] * h  # i = 0 term, h_0 = 1, dg_0 = 0
        ab = list(zip(record.prefix_a, record.prefix_b))
        for i in range(1, len(lam)):
            dg = dg * b + 1
            aj, bj = ab[i - 1]
            h = h * b - (aj + bj)
            slope_num = slope_num + lam[i] * dg
            inter_num = inter_num + lam[i] * h
        return slope_num / S, inter_num / (2 * S)
    bv = beta.value
    lam = [1.0]
    acc = 1.0
    for j, (aj, bj) in enumerate(zip(record.prefix_a, record.prefix_b), 1):
        acc += (aj - bj) / bv**j
        lam.append(acc)
    S = sum(lam)
    if S <= 0:
        raise ValueError("nonpositive normalization; corrupt record")
    dg = 0.0
    h = 1.0
    slope_num = 0.0
    inter_num = lam[0]
    for i in range(1, len(lam)):
        dg = dg * bv + 1.0
        aj = record.prefix_a[i - 1]
        bj = record.prefix_b[i - 1]
        h = h * bv - (aj + bj)
        slope_num += lam[i] * dg
        inter_num += lam[i] * h
    return slope_num / S, inter_num / (2 * S)


def coefficient_sum(record: MatchingRecord, beta: BetaSpec):
    """C^k = sum_{i<k} (beta^{i-1}+...+1) * delta^i / beta^i, with the
    deltas read off the frozen prefixes via delta^i = beta^i * lambda_i.
    Its sign equals the sign of the interval slope."""
    if not record.matched:
        raise ValueError("coefficient sum needs a matched record")
    if beta.is_exact:
        f = beta.field
        b = f.beta()
        lam = _line_terms_exact(record, f)
        dg = f.zero()
        acc = f.zero()
        for i in range(1, len(lam)):
            dg = dg * b + 1
            acc = acc + lam[i] * dg
        return acc
    bv = beta.value
    lam = [1.0]
    acc = 1.0
    for j, (aj, bj) in enumerate(zip(record.prefix_a, record.prefix_b), 1):
        acc += (aj - bj) / bv**j
        lam.append(acc)
    dg = 0.0
    out = 0.0
    for i in range(1, len(lam)):
        dg = dg * bv + 1.0
        out += lam[i] * dg
    return out


def classify_monotonicity(interval: MatchingInterval) -> str:
    """"increasing" or "decreasing" on the interval, by the sign of the
    last nonzero delta; cross-checked against sign(C^k) and the exact
    slope.  A disagreement would falsify the monotonicity rule and raises
    instead of being swallowed."""
    rec = interval.record
    beta = interval.beta
    if not rec.matched:
        raise ValueError("monotonicity needs a matched interval")
    if beta.is_exact:
        f = beta.field
        lo = interval.lo
        if isinstance(lo, (int, mpq)):
            lo_el = f.from_rational(as_rational(lo))
        else:
            lo_el = lo
        if (f.beta() + lo_el - (f.q + 1)).sign() < 0:
            raise ValueError("classification applies to the upper regime")
        if rec.time < f.m + 1:
            raise ValueError(f"matching time {rec.time} below m+1 = {f.m + 1}")
        s_rule = 1 if rec.delta_k_sign == "+" else -1
        s_csum = coefficient_sum(rec, beta).sign()
        s_slope = interval.slope.sign()
        if not (s_rule == s_csum == s_slope):
            raise MonotonicityConflict(
                f"delta sign {s_rule}, C^k sign {s_csum}, slope sign "
                f"{s_slope} disagree on {rec.class_key()}"
            )
        return "increasing" if s_rule > 0 else "decreasing"
    s_rule = 1 if rec.delta_k_sign == "+" else -1
    s_slope = 1 if interval.slope > 0 else (-1 if interval.slope < 0 else 0)
    cs = coefficient_sum(rec, beta)
    s_csum = 1 if cs > 0 else (-1 if cs < 0 else 0)
    if not (s_rule == s_csum == s_slope):
        raise MonotonicityConflict(
            f"delta sign {s_rule}, C^k sign {s_csum}, slope sign {s_slope}"
        )
    return "increasing" if s_rule > 0 else "decreasing"


# ---------------------------------------------------------------------------
# scanning


def _as_alpha(field: MultinacciField, v):
    """Coerce a scan endpoint to mpq or a FieldElement of `field`."""
    if isinstance(v, FieldElement):
        if v.field is not field:
            raise ValueError("endpoint belongs to a different field")
        return v
    if isinstance(v, float):
        raise TypeError(
            "scan endpoints must be exact (rational or field element)"
        )
    return as_rational(v)


def _alpha_payload(alpha):
    if isinstance(alpha, FieldElement):
        return ("fe", tuple(str(c) for c in alpha.as_fraction_coeffs()))
    return ("q", str(alpha))


def _scan_worker(task):
    q, m, kind, payload, max_iter = task
    field = get_field(q, m)
    if kind == "fe":
        alpha = field.element([mpq(s) for s in payload])
    else:
        alpha = mpq(payload)
    params = TransformParams.make(BetaSpec.multinacci(q, m), alpha)
    return detect_matching(params, max_iter)


def _record_at(q, m, alpha, max_iter) -> MatchingRecord:
    params = TransformParams.make(BetaSpec.multinacci(q, m), alpha)
    return detect_matching(params, max_iter)


def _resolve_threads(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("IBETA_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def scan_intervals(
    q: int,
    m: int,
    alpha_range,
    grid: int,
    max_iter: int,
    threads: Optional[int] = None,
) -> ScanResult:
    """Sample alpha on a uniform grid, group runs of identical matching
    records into intervals, and refine the boundaries.

    Boundary refinement bisects on the discrete record class until the
    bracket is narrower than (hi-lo)/grid/2^10; endpoints are reported as
    brackets (outer, inner), with interval.lo/hi the certified inner
    points.  Unmatched samples land in the residual set of the result; they
    are data, not errors.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    field = get_field(q, m)
    lo = _as_alpha(field, alpha_range[0])
    hi = _as_alpha(field, alpha_range[1])
    in_range = (0 <= lo) and (lo < hi) and (hi <= 1)
    if not in_range:
        raise ValueError("need 0 <= lo < hi <= 1")
    if isinstance(lo, FieldElement) or isinstance(hi, FieldElement):
        lo = lo if isinstance(lo, FieldElement) else field.from_rational(lo)
        hi = hi if isinstance(hi, FieldElement) else field.from_rational(hi)
    width = hi - lo
    step_w = width / grid
    alphas = [lo + j * step_w for j in range(grid)]

    nthreads = _resolve_threads(threads)
    if nthreads > 1:
        tasks = [
            (q, m) + _alpha_payload(a) + (max_iter,) for a in alphas
        ]
        chunk = max(1, grid // (nthreads * 8))
        with ProcessPoolExecutor(max_workers=nthreads) as ex:
            records = list(ex.map(_scan_worker, tasks, chunksize=chunk))
    else:
        records = [_record_at(q, m, a, max_iter) for a in alphas]

    # group maximal runs of equal record class
    runs = []  # (class_key, start_idx, end_idx inclusive)
    start = 0
    for i in range(1, grid):
        if records[i].class_key() != records[start].class_key():
            runs.append((records[start].class_key(), start, i - 1))
            start = i
    runs.append((records[start].class_key(), start, grid - 1))

    # refine each internal boundary on the discrete class
    tol = step_w / 1024
    cuts = []  # bracket (left_pt, right_pt) per internal boundary
    for r in range(len(runs) - 1):
        key_left = runs[r][0]
        a = alphas[runs[r][2]]
        b = alphas[runs[r + 1][1]]
        while (b - a) > tol:
            mid = (a + b) / 2
            if _record_at(q, m, mid, max_iter).class_key() == key_left:
                a = mid
            else:
                b = mid
        cuts.append((a, b))

    intervals = []
    unmatched = []
    for r, (key, i0, i1) in enumerate(runs):
        left_bracket = (lo, lo) if r == 0 else cuts[r - 1]
        right_bracket = (hi, hi) if r == len(runs) - 1 else cuts[r]
        if key is None:
            unmatched.extend(alphas[i0 : i1 + 1])
            continue
        rec = records[i0]
        bspec = BetaSpec.multinacci(q, m)
        slope, intercept = interval_line(rec, bspec)
        cs = coefficient_sum(rec, bspec)
        intervals.append(
            MatchingInterval(
                beta=bspec,
                lo=left_bracket[1],
                hi=right_bracket[0],
                lo_bracket=left_bracket,
                hi_bracket=right_bracket,
                record=rec,
                slope=slope,
                intercept=intercept,
                csum_sign=cs.sign(),
            )
        )
    return ScanResult(intervals, unmatched, grid, width)
