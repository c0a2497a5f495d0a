"""Invariant densities of the intermediate beta-transformations.

The unnormalized density is the orbit sum

    gtilde(x) = sum_{k>=0, x < T^k(1)} beta^-k  -  sum_{k>=0, x < T^k(0)} beta^-k,

a right-continuous step function whose breakpoints are exactly the critical
orbit points.  Truncating both sums at depth N leaves an error of at most
2/((beta-1) beta^N) uniformly in x, and the sums become finite, hence exact,
as soon as the two orbits meet.  The normalized density divides by
K = integral of gtilde = sum_k (T^k(1) - T^k(0))/beta^k.

Internally the truncated density is a breakpoint/weight list: gtilde is a
sum of terms w * 1_{[0,c)}, which makes pointwise evaluation a suffix sum
and integration against 1 or x a closed form in the same arithmetic as the
orbits (exact for multinacci beta with rational alpha).
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from gmpy2 import mpq

from .dynamics import BetaSpec, TransformParams, step_T, step_T_tilde

__all__ = [
    "ErgodicityWarning",
    "StepDensity",
    "DensitySeries",
    "NormalizationIntegral",
    "truncation_depth",
    "build_series",
    "eval_density",
    "eval_density_many",
    "normalization",
    "invariance_defect",
]

ZERO_EPS = 1e-10

SQRT2 = math.sqrt(2.0)


class ErgodicityWarning(UserWarning):
    """Raised as a warning when beta <= sqrt(2).

    The orbit sums still evaluate, but uniqueness/ergodicity of the
    invariant measure is only guaranteed for beta > sqrt(2).
    """


class StepDensity:
    """gtilde as sum_j w_j * 1_{[0, c_j)} with sorted breakpoints.

    Pointwise value at x is the suffix sum over c_j > x; the integrals
    needed elsewhere are closed forms:

        int_0^t gtilde = sum_j w_j * min(t, c_j)
        int_0^1 x gtilde dx = sum_j w_j * c_j^2 / 2
    """

    __slots__ = ("breakpoints", "weights", "exact", "_total", "_float_cache")

    def __init__(self, breakpoints, weights, exact):
        pairs = sorted(zip(breakpoints, weights), key=lambda p: p[0])
        self.breakpoints = tuple(p[0] for p in pairs)
        self.weights = tuple(p[1] for p in pairs)
        self.exact = exact
        self._total = None
        self._float_cache = None

    def gtilde_at(self, x):
        acc = 0
        for c, w in zip(self.breakpoints, self.weights):
            if x < c:
                acc = acc + w
        return acc

    def total(self):
        """int_0^1 gtilde (breakpoints all lie in [0,1])."""
        if self._total is None:
            acc = 0
            for c, w in zip(self.breakpoints, self.weights):
                acc = acc + w * c
            self._total = acc
        return self._total

    def cumulative(self, t):
        """int_0^t gtilde for t in [0,1]."""
        acc = 0
        for c, w in zip(self.breakpoints, self.weights):
            acc = acc + w * (t if t < c else c)
        return acc

    def moment(self):
        """int_0^1 x * gtilde(x) dx."""
        acc = 0
        for c, w in zip(self.breakpoints, self.weights):
            acc = acc + w * c * c
        return acc / 2

    def float_table(self):
        """(sorted breakpoint array, suffix weight sums) in doubles."""
        if self._float_cache is None:
            cs = np.array([float(c) for c in self.breakpoints], dtype=float)
            ws = np.array([float(w) for w in self.weights], dtype=float)
            order = np.argsort(cs, kind="stable")
            cs = cs[order]
            ws = ws[order]
            suffix = np.concatenate([np.cumsum(ws[::-1])[::-1], [0.0]])
            self._float_cache = (cs, suffix)
        return self._float_cache

    def gtilde_at_float(self, x: float) -> float:
        cs, suffix = self.float_table()
        # value = sum of weights with c_j > x
        i = bisect.bisect_right(cs, x)
        return float(suffix[i])


@dataclass(frozen=True)
class DensitySeries:
    """Truncated critical-orbit sums with a certified uniform tail bound."""

    params: TransformParams
    variant: str
    depth: int
    one_orbit: tuple  # T^k(1), k = 0..depth
    zero_orbit: tuple  # T^k(0), k = 0..depth
    tail_bound: float
    matched_at: Optional[int]
    ergodic_guaranteed: bool
    step: StepDensity = dc_field(repr=False, compare=False, default=None)

    @property
    def exact(self) -> bool:
        return self.params.is_exact and self.matched_at is not None


@dataclass(frozen=True)
class NormalizationIntegral:
    """K = sum_{k<=depth} (T^k(1) - T^k(0))/beta^k, with its tail bound."""

    value: object
    tail_bound: float

    def value_float(self) -> float:
        return float(self.value)


def truncation_depth(beta: BetaSpec, tol) -> int:
    """Smallest N with 2/((beta-1) beta^N) <= tol."""
    tol = float(tol)
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    b = beta.as_float()
    n = 0
    p = 1.0
    while 2.0 > tol * (b - 1.0) * p:
        n += 1
        p *= b
    return n


def _step_density_from_orbits(one_orbit, zero_orbit, params: TransformParams):
    if params.is_exact:
        binv = params.beta.field.beta().inverse()
        w = params.beta.field.one()
        cs, ws = [], []
        for u, z in zip(one_orbit, zero_orbit):
            cs.append(u)
            ws.append(w)
            cs.append(z)
            ws.append(-w)
            w = w * binv
        return StepDensity(cs, ws, exact=True)
    b = params.beta.as_float()
    w = 1.0
    cs, ws = [], []
    for u, z in zip(one_orbit, zero_orbit):
        cs.append(u)
        ws.append(w)
        cs.append(z)
        ws.append(-w)
        w /= b
    return StepDensity(cs, ws, exact=False)


def build_series(
    params: TransformParams,
    tol,
    variant: str = "standard",
    zero_eps: float = ZERO_EPS,
) -> DensitySeries:
    """Iterate the critical orbits far enough that the tail is below tol.

    If the orbits meet within the horizon the series stops there: the tail
    terms cancel pairwise, the sum is exact, and tail_bound is zero.  The
    tilde variant iterates the left-continuous map and requires alpha > 0.
    """
    if variant not in ("standard", "tilde"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "tilde":
        zero_alpha = params.alpha == 0
        if zero_alpha:
            raise ValueError("tilde variant needs alpha in (0, 1]")
    step = step_T if variant == "standard" else step_T_tilde
    horizon = truncation_depth(params.beta, tol)
    ergodic = params.beta.as_float() > SQRT2
    if not ergodic:
        warnings.warn(
            "beta <= sqrt(2): invariant density computed, ergodicity not "
            "guaranteed",
            ErgodicityWarning,
            stacklevel=2,
        )
    one = [params.lift(1)]
    zero = [params.lift(0)]
    matched_at = None
    for k in range(1, horizon + 1):
        one.append(step(params, one[-1]).value)
        zero.append(step(params, zero[-1]).value)
        d = one[-1] - zero[-1]
        is_zero = d.is_zero if params.is_exact else abs(d) <= zero_eps
        if is_zero:
            matched_at = k
            break
    depth = matched_at if matched_at is not None else horizon
    b = params.beta.as_float()
    tail = 0.0 if matched_at is not None else 2.0 / ((b - 1.0) * b**depth)
    series = DensitySeries(
        params=params,
        variant=variant,
        depth=depth,
        one_orbit=tuple(one),
        zero_orbit=tuple(zero),
        tail_bound=tail,
        matched_at=matched_at,
        ergodic_guaranteed=ergodic,
        step=_step_density_from_orbits(one, zero, params),
    )
    return series


def normalization(series: DensitySeries) -> NormalizationIntegral:
    """K = int_0^1 gtilde, strictly positive for a sane orbit convention."""
    value = series.step.total()
    positive = value.sign() > 0 if series.params.is_exact else value > 0.0
    if not positive:
        raise ValueError(
            "normalization integral is not positive; orbit convention bug"
        )
    return NormalizationIntegral(value=value, tail_bound=series.tail_bound / 2.0)


def eval_density(series: DensitySeries, x, clip: bool = True):
    """Normalized density g(x) = gtilde(x) / K at a point of [0, 1).

    Truncation can push the raw value slightly negative; within the
    tail-induced tolerance it is clipped to 0 (unless clip=False).  A value
    negative beyond that tolerance signals an orbit bug and raises.
    """
    params = series.params
    x = params.lift(x)
    in_range = (0 <= x) and (x < 1)
    if not in_range:
        raise ValueError("x must lie in [0, 1)")
    K = normalization(series).value
    raw = series.step.gtilde_at(x) / K
    neg = raw.sign() < 0 if params.is_exact else raw < 0.0
    if neg:
        allowance = series.tail_bound / float(K) + 1e-12
        if -float(raw) > allowance:
            raise ValueError(
                f"density {float(raw)} negative beyond tolerance {allowance}"
            )
        if clip:
            return params.lift(0) if params.is_exact else 0.0
    return raw


def eval_density_many(series: DensitySeries, xs) -> np.ndarray:
    """Vectorized unclipped g(x)/K over an array of floats (diagnostics)."""
    cs, suffix = series.step.float_table()
    xs = np.asarray(xs, dtype=float)
    idx = np.searchsorted(cs, xs, side="right")
    K = float(normalization(series).value)
    return suffix[idx] / K


def _branch_intervals(params: TransformParams):
    """[lo_i, hi_i] for each branch domain, in the working arithmetic."""
    if params.is_exact:
        f = params.beta.field
        b = f.beta()
        binv = b.inverse()
        zero = f.zero()
        one = f.one()
        alpha = params.alpha
        out = []
        for i in range(params.branch_count):
            lo = (i - alpha) * binv
            hi = (i + 1 - alpha) * binv
            lo = zero if lo < zero else lo
            hi = one if hi > one else hi
            out.append((lo, hi))
        return out
    b = params.beta.value
    a = params.alpha
    out = []
    for i in range(params.branch_count):
        lo = max(0.0, (i - a) / b)
        hi = min(1.0, (i + 1 - a) / b)
        out.append((lo, hi))
    return out


def invariance_defect(params: TransformParams, series: DensitySeries, t) -> float:
    """|nu([0,t]) - nu(T^{-1}[0,t])| for the normalized measure nu = g dx.

    Both sides are exact piecewise integrals of the stored step function:
    the preimage of [0,t] meets branch i in [lo_i, min(hi_i, (t+i-a)/b)].
    In exact mode with a matched series the defect is exactly zero.
    """
    t = params.lift(t)
    in_range = (0 < t) and (t < 1)
    if not in_range:
        raise ValueError("threshold t must lie in (0, 1)")
    step = series.step
    K = normalization(series).value
    direct = step.cumulative(t)
    if params.is_exact:
        binv = params.beta.field.beta().inverse()
        pre = params.beta.field.zero()
        for i, (lo, hi) in enumerate(_branch_intervals(params)):
            upper = (t + i - params.alpha) * binv
            if hi < upper:
                upper = hi
            if lo < upper:
                pre = pre + (step.cumulative(upper) - step.cumulative(lo))
        defect = (direct - pre) / K
        return abs(float(defect))
    b = params.beta.value
    pre = 0.0
    for i, (lo, hi) in enumerate(_branch_intervals(params)):
        upper = min(hi, (t + i - params.alpha) / b)
        if lo < upper:
            pre += step.cumulative(upper) - step.cumulative(lo)
    return abs(direct - pre) / K
