"""The intermediate beta-transformations T and their digit dynamics.

T_{beta,alpha}(x) = beta*x + alpha - floor(beta*x + alpha) on [0,1], with the
branch partition left-closed right-open except the last branch, which is
closed at 1; the digit of a step is floor(beta*x + alpha).  The auxiliary
left-continuous variant uses the ceiling instead:
T~(x) = beta*x + alpha - ceil(beta*x + alpha) + 1, differing from T exactly
on the finite set {(i - alpha)/beta}.

Two arithmetic backends sit behind one interface.  With a multinacci beta
and rational alpha every orbit point is a FieldElement and every branch
decision is exact.  Any other (beta, alpha) runs in hardware floats with a
configurable guard band eps; a digit decided within eps of a branch
boundary is flagged ambiguous on the result instead of failing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple, Optional, Union

from gmpy2 import mpq

from .numberfield import FieldElement, MultinacciField, as_rational, get_field

__all__ = [
    "BetaSpec",
    "TransformParams",
    "StepResult",
    "OrbitStep",
    "Expansion",
    "DeltaSequence",
    "step_T",
    "step_T_tilde",
    "orbit",
    "expand",
    "delta_sequence",
    "prefix_agreement",
    "symmetry_partner",
]

Number = Union[FieldElement, mpq, float]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BetaSpec:
    """A slope beta > 1: either an exact multinacci root or a float."""

    kind: str  # "multinacci" | "float"
    field: Optional[MultinacciField] = None
    value: float = 0.0

    @staticmethod
    def multinacci(q: int, m: int) -> "BetaSpec":
        # value doubles as the float image so float-mode paths (exact beta,
        # float alpha) see the right slope
        f = get_field(q, m)
        return BetaSpec(kind="multinacci", field=f, value=f.root_float())

    @staticmethod
    def from_value(value: float) -> "BetaSpec":
        value = float(value)
        if not value > 1.0:
            raise ValueError("beta must exceed 1")
        return BetaSpec(kind="float", value=value)

    @property
    def is_exact(self) -> bool:
        return self.kind == "multinacci"

    @property
    def floor_int(self) -> int:
        # multinacci roots live in (q, q+1)
        if self.is_exact:
            return self.field.q
        return int(math.floor(self.value))

    def beta_number(self):
        """beta in the working arithmetic (FieldElement or float)."""
        if self.is_exact:
            return self.field.beta()
        return self.value

    def frac_number(self):
        """<beta> = beta - floor(beta) in the working arithmetic."""
        if self.is_exact:
            return self.field.beta() - self.field.q
        return self.value - math.floor(self.value)

    def as_float(self) -> float:
        if self.is_exact:
            return self.field.root_float()
        return self.value

    def describe(self) -> str:
        if self.is_exact:
            return f"mult:{self.field.q},{self.field.m}"
        return f"float:{self.value!r}"


@dataclass(frozen=True)
class TransformParams:
    """(beta, alpha) with the mode implied by the types.

    Exact mode requires a multinacci beta and a rational alpha; anything else
    computes in floats with guard band eps.  alpha is allowed in [0, 1]; the
    standard map is studied on alpha in [0, 1) and the tilde variant on
    (0, 1].
    """

    beta: BetaSpec
    alpha: Union[mpq, FieldElement, float]
    eps: float = 1e-12

    def __post_init__(self):
        a = self.alpha
        if isinstance(a, float):
            ok = 0.0 <= a <= 1.0
        else:
            ok = 0 <= a <= 1
        if not ok:
            raise ValueError("alpha must lie in [0, 1]")

    @staticmethod
    def make(beta: BetaSpec, alpha, eps: float = 1e-12) -> "TransformParams":
        """Build params, choosing exact mode whenever possible.

        alpha given as int/Fraction/mpq/decimal-or-p/q string, or as an
        element of beta's own field, stays exact when beta is exact; a float
        alpha (or float beta) selects float mode.
        """
        if beta.is_exact and isinstance(alpha, FieldElement):
            if alpha.field is not beta.field:
                raise ValueError("alpha belongs to a different field")
            return TransformParams(beta=beta, alpha=alpha, eps=eps)
        if beta.is_exact and not isinstance(alpha, float):
            return TransformParams(beta=beta, alpha=as_rational(alpha), eps=eps)
        return TransformParams(beta=beta, alpha=float(alpha), eps=eps)

    @property
    def mode(self) -> str:
        if self.beta.is_exact and isinstance(self.alpha, (mpq, FieldElement)):
            return "exact"
        return "float"

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    @property
    def regime(self) -> str:
        """"low" for alpha in [0, 1-<beta>), "high" for alpha in [1-<beta>, 1]."""
        if self.is_exact:
            f = self.beta.field
            s = (f.beta() + self.alpha - (f.q + 1)).sign()
            return "high" if s >= 0 else "low"
        boundary = 1.0 - (self.beta.value - math.floor(self.beta.value))
        return "high" if self.alpha >= boundary else "low"

    @property
    def branch_count(self) -> int:
        return self.beta.floor_int + (2 if self.regime == "high" else 1)

    def alpha_float(self) -> float:
        return float(self.alpha)

    def lift(self, x) -> Number:
        """Coerce a point of [0,1] into the working arithmetic."""
        if self.is_exact:
            if isinstance(x, FieldElement):
                if x.field is not self.beta.field:
                    raise ValueError("point belongs to a different field")
                return x
            return self.beta.field.from_rational(as_rational(x))
        if isinstance(x, FieldElement):
            return float(x)
        return float(x)

    def describe(self) -> str:
        return f"beta={self.beta.describe()} alpha={self.alpha} mode={self.mode}"


class StepResult(NamedTuple):
    value: Number
    digit: int
    ambiguous: bool


@dataclass(frozen=True)
class OrbitStep:
    n: int
    value: Number
    digit: int
    ambiguous: bool = False

    def value_float(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class Expansion:
    digits: tuple
    residual: Number
    ambiguous: bool = False


@dataclass(frozen=True)
class DeltaSequence:
    """delta^k = T^k(1) - T^k(0) for k = 1..n, plus the first exact zero."""

    entries: tuple
    first_zero: Optional[int]
    approximate: bool

    def entry_floats(self):
        return [float(d) for d in self.entries]


def step_T(params: TransformParams, x) -> StepResult:
    """One step of the standard map; digit = floor(beta*x + alpha)."""
    x = params.lift(x)
    if params.is_exact:
        y = params.beta.field.beta() * x + params.alpha
        d = y.floor()
        return StepResult(y - d, d, False)
    y = params.beta.value * x + params.alpha
    d = math.floor(y)
    frac = y - d
    ambiguous = frac < params.eps or frac > 1.0 - params.eps
    if frac < 0.0:
        frac = 0.0
    if frac > 1.0:
        frac = 1.0
    return StepResult(frac, d, ambiguous)


def step_T_tilde(params: TransformParams, x) -> StepResult:
    """One step of the left-continuous variant; digit = ceil(beta*x+alpha) - 1.

    Agrees with step_T except at the branch points {(i-alpha)/beta}, which it
    sends to 1 rather than 0.
    """
    x = params.lift(x)
    if params.is_exact:
        y = params.beta.field.beta() * x + params.alpha
        d = y.ceil() - 1
        return StepResult(y - d, d, False)
    y = params.beta.value * x + params.alpha
    d = math.ceil(y) - 1
    frac = y - d
    ambiguous = frac < params.eps or frac > 1.0 - params.eps
    if frac < 0.0:
        frac = 0.0
    if frac > 1.0:
        frac = 1.0
    return StepResult(frac, d, ambiguous)


def orbit(params: TransformParams, x0, n: int, variant: str = "standard"):
    """The first n steps (T^1 x0 .. T^n x0) with their digits."""
    if n < 1:
        raise ValueError("n must be at least 1")
    step = {"standard": step_T, "tilde": step_T_tilde}[variant]
    steps = []
    x = params.lift(x0)
    for k in range(1, n + 1):
        x, d, amb = step(params, x)
        steps.append(OrbitStep(n=k, value=x, digit=d, ambiguous=amb))
    return steps

def orbit_values(params: TransformParams, x0, n: int, variant: str = "standard"):
    """[x0, T x0, ..., T^n x0] without per-step records (plumbing helper)."""
    step = {"standard": step_T, "tilde": step_T_tilde}[variant]
    x = params.lift(x0)
    values = [x]
    for _ in range(n):
        x = step(params, x).value
        values.append(x)
    return values


def expand(params: TransformParams, x, n: int) -> Expansion:
    """Digits c_1..c_n of x and the exact truncation residual.

    residual = x - sum_i (c_i - alpha)/beta^i, which equals T^n(x)/beta^n.
    """
    steps = orbit(params, x, n)
    digits = tuple(s.digit for s in steps)
    x = params.lift(x)
    if params.is_exact:
        b = params.beta.field.beta()
        binv = b.inverse()
        acc = params.beta.field.zero()
        p = params.beta.field.one()
        for c in digits:
            p = p * binv
            acc = acc + (c - params.alpha) * p
        residual = x - acc
    else:
        b = params.beta.value
        acc = 0.0
        for i, c in enumerate(digits, start=1):
            acc += (c - params.alpha) / b**i
        residual = x - acc
    return Expansion(
        digits=digits, residual=residual, ambiguous=any(s.ambiguous for s in steps)
    )


def delta_sequence(
    params: TransformParams, n: int, zero_eps: float = 1e-10
) -> DeltaSequence:
    """The critical-orbit differences delta^k = T^k(1) - T^k(0), k = 1..n.

    In exact mode a zero entry is an exact coordinate test; in float mode
    |delta| <= zero_eps counts as zero and the sequence is flagged
    approximate.  Once zero, the difference stays zero, so iteration stops
    at the first zero.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    x1 = params.lift(1)
    x0 = params.lift(0)
    entries = []
    first_zero = None
    for k in range(1, n + 1):
        x1 = step_T(params, x1).value
        x0 = step_T(params, x0).value
        d = x1 - x0
        entries.append(d)
        if first_zero is None:
            zero = d.is_zero if params.is_exact else abs(d) <= zero_eps
            if zero:
                first_zero = k
                break
    return DeltaSequence(
        entries=tuple(entries),
        first_zero=first_zero,
        approximate=not params.is_exact,
    )


def prefix_agreement(
    p1: TransformParams, p2: TransformParams, horizon: int
) -> int:
    """Longest common digit prefix of the critical orbits under two alphas.

    Both the orbit of 0 and the orbit of 1 must agree digit-by-digit; the
    count stops at the first disagreement or at the horizon.
    """
    if p1.beta != p2.beta:
        raise ValueError("prefix agreement needs identical beta")
    if p1.alpha == p2.alpha:
        raise ValueError("alphas must differ")
    if p1.regime != p2.regime:
        raise ValueError("alphas must lie in the same regime")
    pts = [p1.lift(0), p1.lift(1), p2.lift(0), p2.lift(1)]
    agree = 0
    for _ in range(horizon):
        r10 = step_T(p1, pts[0])
        r11 = step_T(p1, pts[1])
        r20 = step_T(p2, pts[2])
        r21 = step_T(p2, pts[3])
        if r10.digit != r20.digit or r11.digit != r21.digit:
            break
        agree += 1
        pts = [r10.value, r11.value, r20.value, r21.value]
    return agree


def symmetry_partner(params: TransformParams, printed_variant: bool = False):
    """The partner parameter alpha* = 1 - <beta + alpha>, reduced mod 1.

    M_beta(alpha) + M_beta(alpha*) = 1.  The diagnostic printed_variant
    swaps the inner sign to 1 - <beta - alpha>; the two disagree except on
    a measure-zero set, and only the default satisfies the symmetry (the
    variant is kept purely for comparison).  The returned value is a
    FieldElement in exact mode (it is irrational there) and a float in
    float mode.
    """
    if params.is_exact:
        b = params.beta.field.beta()
        inner = b - params.alpha if printed_variant else b + params.alpha
        frac = inner - inner.floor()
        partner = 1 - frac
        if partner == 1:
            return params.beta.field.zero()
        return partner
    inner = (
        params.beta.value - params.alpha
        if printed_variant
        else params.beta.value + params.alpha
    )
    frac = inner - math.floor(inner)
    partner = 1.0 - frac
    return 0.0 if partner == 1.0 else partner
