"""Exact arithmetic in the multinacci number fields Q(beta_{q,m}).

beta_{q,m} is the unique root in (q, q+1) of

    P_{q,m}(x) = x^m - q*x^{m-1} - ... - q*x - q.

Field elements are coordinate vectors over the basis 1, beta, ..., beta^{m-1};
products are reduced with beta^m = q*(beta^{m-1} + ... + beta + 1).  Every sign,
floor, and comparison decision is made rigorously: an exact zero test on the
coordinates first, then outward-rounded interval evaluation against a certified
dyadic enclosure of beta, refined until the interval excludes zero.  A decision
is therefore never a guess; if refinement exceeds its budget the operation
raises ``SignRefinementError`` instead of answering.

Rationals are ``gmpy2.mpq`` (always reduced, positive denominator);
``fractions.Fraction``, ints, and ``p/q`` strings are accepted everywhere.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpq, mpz

__all__ = [
    "Rational",
    "as_rational",
    "SignRefinementError",
    "RootEnclosure",
    "isolate_root",
    "MultinacciField",
    "FieldElement",
    "get_field",
]

Rational = mpq

# Extra bits of refinement allowed beyond the coefficient-adapted starting
# precision before a sign decision gives up.
DEFAULT_SIGN_BUDGET = 256


class SignRefinementError(ArithmeticError):
    """A sign decision did not resolve within its refinement budget."""


def as_rational(x) -> mpq:
    """Coerce x to an exact rational.

    Accepts int, Fraction, mpq, and strings like "3/4" or "0.37" (decimal
    strings become exact decimal fractions, not binary floats).  Floats are
    rejected: exactness must be requested explicitly.
    """
    if isinstance(x, mpq):
        return x
    if isinstance(x, (int, mpz)):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            num, den = s.split("/", 1)
            return mpq(int(num), int(den))
        return mpq(Fraction(s))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _poly_sign_at_scaled(q: int, m: int, num: mpz, scale: int) -> int:
    # sign of P_{q,m}(num / 2^scale), computed as an exact integer
    acc = num**m
    for i in range(m):
        acc -= q * num**i * (mpz(1) << ((m - i) * scale))
    return (acc > 0) - (acc < 0)


def _poly_at(q: int, m: int, x: mpq) -> mpq:
    acc = x**m
    for i in range(m):
        acc -= q * x**i
    return acc


@dataclass(frozen=True)
class RootEnclosure:
    """A certified rational bracket [lo, hi] around beta_{q,m}.

    Invariant: q <= lo < beta < hi <= q+1 with P(lo) < 0 < P(hi).
    """

    q: int
    m: int
    lo: mpq
    hi: mpq

    def width(self) -> mpq:
        return self.hi - self.lo

    def midpoint(self) -> mpq:
        return (self.lo + self.hi) / 2

    def refine(self, halvings: int = 1) -> "RootEnclosure":
        """Return a new enclosure after sign-preserving bisection steps."""
        lo, hi = self.lo, self.hi
        for _ in range(halvings):
            mid = (lo + hi) / 2
            if _poly_at(self.q, self.m, mid) <= 0:
                lo = mid
            else:
                hi = mid
        return RootEnclosure(self.q, self.m, lo, hi)

    def contains(self, x) -> bool:
        x = as_rational(x)
        return self.lo <= x <= self.hi


def isolate_root(q: int, m: int, width) -> RootEnclosure:
    """Isolate beta_{q,m} in (q, q+1) by sign-preserving bisection.

    P(q) < 0 and P(q+1) = 1 > 0, so the bracket is valid from the start;
    bisection keeps the sign change until the bracket is narrower than width.
    """
    if q < 1 or m < 2:
        raise ValueError("need q >= 1 and m >= 2")
    width = as_rational(width)
    if width <= 0:
        raise ValueError("width must be positive")
    lo, hi = mpq(q), mpq(q + 1)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if _poly_at(q, m, mid) <= 0:
            lo = mid
        else:
            hi = mid
    return RootEnclosure(q, m, lo, hi)


class MultinacciField:
    """The field Q(beta_{q,m}) with a cached, refinable enclosure of beta.

    Instances are interned per (q, m); use get_field(q, m).  The internal
    enclosure is a dyadic bracket (integers at scale 2^prec) that only ever
    shrinks; power tables for interval evaluation are cached per precision.
    """

    def __init__(self, q: int, m: int):
        if q < 1 or m < 2:
            raise ValueError("need q >= 1 and m >= 2")
        self.q = q
        self.m = m
        # dyadic bracket: _lo/2^_prec < beta < _hi/2^_prec, signs certified
        self._prec = 0
        self._lo = mpz(q)
        self._hi = mpz(q + 1)
        self._powers = {}
        self._ensure(192)

    # -- enclosure management ------------------------------------------------

    def _ensure(self, prec: int) -> None:
        """Grow the certified dyadic bracket to scale 2^prec (never shrinks)."""
        if self._prec >= prec:
            return
        q, m = self.q, self.m
        lo, hi, p = self._lo, self._hi, self._prec
        while p < 16:
            lo, hi = lo << 1, hi << 1
            p += 1
            mid = (lo + hi) >> 1
            if _poly_sign_at_scaled(q, m, mid, p) <= 0:
                lo = mid
            else:
                hi = mid
        while p < prec:
            newp = min(max(2 * p, 32), prec)
            shift = newp - p
            x = (lo + hi) << (shift - 1)
            # one Newton step at the new scale, then re-certify the bracket
            pv = x**m
            for i in range(m):
                pv -= q * x**i * (mpz(1) << ((m - i) * newp))
            pd = m * x ** (m - 1)
            for i in range(1, m):
                pd -= q * i * x ** (i - 1) * (mpz(1) << ((m - i) * newp))
            x -= pv // pd
            lo, hi = x - 4, x + 4
            step = mpz(8)
            while _poly_sign_at_scaled(q, m, lo, newp) > 0:
                lo -= step
                step <<= 1
            step = mpz(8)
            while _poly_sign_at_scaled(q, m, hi, newp) <= 0:
                hi += step
                step <<= 1
            p = newp
        self._lo, self._hi, self._prec = lo, hi, prec
        self._powers.clear()

    def _power_tables(self, prec: int):
        """Scaled enclosures of beta^0..beta^{m-1} at 2^prec (cached)."""
        tab = self._powers.get(prec)
        if tab is not None:
            return tab
        self._ensure(prec + 16)
        sh = self._prec - prec
        blo, bhi = self._lo >> sh, (self._hi >> sh) + 1
        plo, phi = [mpz(1) << prec], [mpz(1) << prec]
        for _ in range(1, self.m):
            plo.append((plo[-1] * blo) >> prec)
            phi.append(((phi[-1] * bhi) >> prec) + 1)
        tab = (plo, phi)
        self._powers[prec] = tab
        return tab

    def enclosure(self, width=None) -> RootEnclosure:
        """A certified rational bracket of beta, at most `width` wide."""
        if width is not None:
            w = as_rational(width)
            need = 1
            while mpq(1, mpz(1) << need) > w:
                need += 1
            self._ensure(need + 4)
        lo = mpq(self._lo, mpz(1) << self._prec)
        hi = mpq(self._hi, mpz(1) << self._prec)
        return RootEnclosure(self.q, self.m, lo, hi)

    def root_float(self) -> float:
        self._ensure(96)
        return float(mpq(self._lo + self._hi, mpz(2) << self._prec))

    # -- element constructors ------------------------------------------------

    def element(self, coeffs) -> "FieldElement":
        """Element from coordinates (c0, c1, ..., c_{m-1}) over 1, beta, ..."""
        cs = [as_rational(c) for c in coeffs]
        if len(cs) > self.m:
            raise ValueError(f"at most {self.m} coordinates expected")
        cs += [mpq(0)] * (self.m - len(cs))
        return FieldElement(self, tuple(cs))

    def zero(self) -> "FieldElement":
        return self.element([])

    def one(self) -> "FieldElement":
        return self.element([1])

    def beta(self) -> "FieldElement":
        return self.element([0, 1])

    def from_rational(self, x) -> "FieldElement":
        return self.element([as_rational(x)])

    def minimal_polynomial(self):
        """Coefficients of P_{q,m} from degree 0 to m: (-q, ..., -q, 1)."""
        return tuple([-self.q] * self.m + [1])

    def __repr__(self):
        return f"MultinacciField(q={self.q}, m={self.m})"


_FIELD_CACHE: dict[tuple[int, int], MultinacciField] = {}


def get_field(q: int, m: int) -> MultinacciField:
    """Interned field instance for (q, m)."""
    key = (int(q), int(m))
    field = _FIELD_CACHE.get(key)
    if field is None:
        field = MultinacciField(*key)
        _FIELD_CACHE[key] = field
    return field


class FieldElement:
    """An element of Q(beta_{q,m}) as exact coordinates over 1, beta, ..., beta^{m-1}.

    Coordinates determine the element uniquely (the basis is a Q-basis), so
    equality and the zero test are exact coordinate checks.  Ordering,
    sign(), floor(), and ceil() are rigorous real-number decisions.

    Arithmetic accepts other elements of the same field and exact rationals
    (int / Fraction / mpq).  Floats are rejected; convert explicitly with
    float(x) at the end of a computation.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: MultinacciField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    # -- plumbing ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements belong to different fields")
            return other
        try:
            r = as_rational(other)
        except TypeError:
            return None
        return self.field.from_rational(r)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.field.q, self.field.m, self.coeffs))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(f"{c}")
            elif i == 1:
                terms.append(f"({c})*b")
            else:
                terms.append(f"({c})*b^{i}")
        body = " + ".join(terms) if terms else "0"
        return f"<{body} in Q(beta_{{{self.field.q},{self.field.m}}})>"

    # -- ring arithmetic -----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(
            self.field, tuple(a + b for a, b in zip(self.coeffs, o.coeffs))
        )

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(
            self.field, tuple(a - b for a, b in zip(self.coeffs, o.coeffs))
        )

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements belong to different fields")
            return self._mul_element(other)
        try:
            r = as_rational(other)
        except TypeError:
            return NotImplemented
        return FieldElement(self.field, tuple(a * r for a in self.coeffs))

    __rmul__ = __mul__

    def _mul_element(self, other: "FieldElement") -> "FieldElement":
        m, q = self.field.m, self.field.q
        prod = [mpq(0)] * (2 * m - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                prod[i + j] += a * b
        # reduce top degrees with beta^m = q*(beta^{m-1} + ... + 1)
        for deg in range(2 * m - 2, m - 1, -1):
            c = prod[deg]
            if c == 0:
                continue
            prod[deg] = mpq(0)
            for k in range(deg - m, deg):
                prod[k] += q * c
        return FieldElement(self.field, tuple(prod[:m]))

    def __pow__(self, n: int):
        if not isinstance(n, (int, mpz)):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        n = int(n)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse, by solving (mult-by-self) x = 1 exactly."""
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero field element")
        m = self.field.m
        # columns: coordinates of self * beta^j
        cols = []
        col = self
        beta = self.field.beta()
        for _ in range(m):
            cols.append(list(col.coeffs))
            col = col * beta
        # solve sum_j x_j * cols[j] = e0 by Gaussian elimination over mpq
        aug = [[cols[j][i] for j in range(m)] + [mpq(1 if i == 0 else 0)]
               for i in range(m)]
        for piv in range(m):
            r = next(r for r in range(piv, m) if aug[r][piv] != 0)
            aug[piv], aug[r] = aug[r], aug[piv]
            inv = 1 / aug[piv][piv]
            aug[piv] = [v * inv for v in aug[piv]]
            for r in range(m):
                if r != piv and aug[r][piv] != 0:
                    f = aug[r][piv]
                    aug[r] = [v - f * p for v, p in zip(aug[r], aug[piv])]
        return FieldElement(self.field, tuple(aug[i][m] for i in range(m)))

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self * other.inverse()
        try:
            r = as_rational(other)
        except TypeError:
            return NotImplemented
        if r == 0:
            raise ZeroDivisionError("division by zero")
        return FieldElement(self.field, tuple(a / r for a in self.coeffs))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    # -- rigorous real-number decisions --------------------------------------

    def _integerized(self):
        """(n_0..n_{m-1}, D) with self = sum n_i beta^i / D, n_i integers."""
        D = mpz(1)
        for c in self.coeffs:
            D = gmpy2.lcm(D, c.denominator)
        nums = [mpz(c * D) for c in self.coeffs]
        return nums, D

    def interval(self, prec: int = 128):
        """Certified rational bracket (lo, hi) with lo <= self <= hi."""
        nums, D = self._integerized()
        lo, hi = self._scaled_interval(nums, prec)
        scale = D << prec
        return mpq(lo, scale), mpq(hi, scale)

    def _scaled_interval(self, nums, prec: int):
        # integer bracket of self * D * 2^prec
        plo, phi = self.field._power_tables(prec)
        lo = mpz(0)
        hi = mpz(0)
        for n, pl, ph in zip(nums, plo, phi):
            if n >= 0:
                lo += n * pl
                hi += n * ph
            else:
                lo += n * ph
                hi += n * pl
        return lo, hi

    def _precision_schedule(self, budget: int):
        bits = 0
        for c in self.coeffs:
            bits = max(bits, c.numerator.bit_length(), c.denominator.bit_length())
        p0 = max(128, bits + 64)
        return (p0, p0 + budget // 4, p0 + budget // 2, p0 + budget)

    def sign(self, budget: int = DEFAULT_SIGN_BUDGET) -> int:
        """Rigorous sign in {-1, 0, +1}.

        Zero is decided exactly from the coordinates.  Otherwise interval
        evaluation is refined through a precision schedule that spends at
        most `budget` extra bits of enclosure refinement; running out raises
        SignRefinementError rather than guessing.
        """
        if self.is_zero:
            return 0
        if self.is_rational:
            c = self.coeffs[0]
            return (c > 0) - (c < 0)
        nums, _D = self._integerized()
        for prec in self._precision_schedule(budget):
            lo, hi = self._scaled_interval(nums, prec)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
        raise SignRefinementError(
            f"sign of {self!r} unresolved within {budget} refinement bits"
        )

    def floor(self, budget: int = DEFAULT_SIGN_BUDGET) -> int:
        """Exact floor: the integer n with n <= self < n+1."""
        if self.is_rational:
            c = self.coeffs[0]
            return int(c.numerator // c.denominator)
        nums, D = self._integerized()
        for prec in self._precision_schedule(budget):
            lo, hi = self._scaled_interval(nums, prec)
            scale = D << prec
            flo = lo // scale
            fhi = hi // scale
            if flo == fhi:
                return int(flo)
            if fhi == flo + 1:
                # bracket straddles one integer; settle by exact comparison
                diff = self - int(fhi)
                if diff.is_zero:
                    return int(fhi)
                s = diff.sign(budget)
                return int(fhi) if s > 0 else int(flo)
        raise SignRefinementError(f"floor of {self!r} unresolved")

    def ceil(self, budget: int = DEFAULT_SIGN_BUDGET) -> int:
        return -((-self).floor(budget))

    def compare(self, other, budget: int = DEFAULT_SIGN_BUDGET) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare FieldElement with {other!r}")
        return (self - o).sign(budget)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __float__(self):
        lo, hi = self.interval(128)
        return float((lo + hi) / 2)

    def to_float(self) -> float:
        return float(self)

    def decimal(self, digits: int = 30) -> str:
        """Decimal string correct to `digits` significant digits."""
        prec = 4 * digits + 64
        lo, hi = self.interval(prec)
        mid = (lo + hi) / 2
        if mid == 0:
            return "0"
        with decimal.localcontext() as ctx:
            ctx.prec = digits
            d = decimal.Decimal(int(mid.numerator)) / decimal.Decimal(
                int(mid.denominator)
            )
        return str(d)

    def as_fraction_coeffs(self):
        """Coordinates as fractions.Fraction (for serialization)."""
        return tuple(Fraction(int(c.numerator), int(c.denominator))
                     for c in self.coeffs)
