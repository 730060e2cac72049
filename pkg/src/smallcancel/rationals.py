"""Exact rational helpers: directed-rounding powers, Euler-constant bounds,
and monotone function tables.

All gatekeeping predicates in the package compare exact Fractions; floats
appear only in reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def parse_fraction(text: str) -> Fraction:
    """Parse 'p/q' or a plain integer/decimal string into a Fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(text)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer, by Newton iteration."""
    if n < 0:
        raise ValueError("iroot of negative number")
    if n == 0:
        return 0
    if k == 1:
        return n
    x = 1 << (n.bit_length() // k + 1)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x


def e4_bounds(terms: int = 40) -> tuple[Fraction, Fraction]:
    """Rational enclosure of e**4 from the Taylor series of e.

    The tail after `terms` terms is below 2/(terms+1)!, so the enclosure is
    far tighter than any ceiling computed from it.
    """
    e_lo = Fraction(0)
    fact = 1
    for k in range(terms + 1):
        if k > 0:
            fact *= k
        e_lo += Fraction(1, fact)
    e_hi = e_lo + Fraction(2, fact * (terms + 1))
    return e_lo ** 4, e_hi ** 4


def pow_frac_bounds(base: Fraction, exp: Fraction,
                    digits: int = 40) -> tuple[Fraction, Fraction]:
    """Directed-rounding enclosure of base**exp for base > 0, exp >= 0.

    Exact when the exponent is an integer; otherwise bounds the q-th root
    of base**p with scaled integer roots carrying `digits` decimal digits.
    """
    if base <= 0:
        raise ValueError("base must be positive")
    p, q = exp.numerator, exp.denominator
    x = base ** p
    if q == 1:
        return x, x
    scale = 10 ** digits
    m = x * scale ** q
    lo_int = iroot(floor_frac(m), q)
    hi_int = iroot(ceil_frac(m), q) + 1
    return Fraction(lo_int, scale), Fraction(hi_int, scale)


@dataclass(frozen=True)
class AffineFn:
    """Monotone function t -> a*t + b with rational coefficients, a > 0."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __call__(self, t: Fraction) -> Fraction:
        return self.a * Fraction(t) + self.b

    def describe(self) -> str:
        return f"{format_fraction(self.a)}*t + {format_fraction(self.b)}"


class TableFn:
    """Monotone function given by values at integer arguments, extended by
    piecewise-linear interpolation through (0, 0).

    Used for measured separation profiles; interpolation keeps evaluation at
    rational arguments exact.
    """

    def __init__(self, values: dict[int, int | Fraction]):
        if not values:
            raise ValueError("empty table")
        self.points = sorted((int(t), Fraction(v)) for t, v in values.items())
        if self.points[0][0] > 0:
            self.points.insert(0, (0, Fraction(0)))
        for (t0, v0), (t1, v1) in zip(self.points, self.points[1:]):
            if v1 < v0:
                raise ValueError(f"table not monotone at t={t1}")

    def max_arg(self) -> int:
        return self.points[-1][0]

    def __call__(self, t: Fraction) -> Fraction:
        t = Fraction(t)
        if t < 0:
            raise ValueError("negative argument")
        if t > self.points[-1][0]:
            raise ValueError(f"argument {t} beyond table range {self.points[-1][0]}")
        for (t0, v0), (t1, v1) in zip(self.points, self.points[1:]):
            if t0 <= t <= t1:
                if t0 == t1:
                    return v0
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        return self.points[0][1]

    def describe(self) -> str:
        return "table[" + ", ".join(f"{t}:{format_fraction(v)}"
                                    for t, v in self.points) + "]"


def cmp_linear_sqrt(lhs: Fraction, a: Fraction, b: Fraction, d: int) -> int:
    """Sign of lhs - (a*sqrt(d) + b) computed exactly (a >= 0, d >= 0).

    Returns -1, 0 or +1.
    """
    t = lhs - b
    if a == 0 or d == 0:
        return -1 if t < 0 else (0 if t == 0 else 1)
    if t < 0:
        return -1
    diff = t * t - a * a * d
    return -1 if diff < 0 else (0 if diff == 0 else 1)


def isqrt_frac_ge(x: Fraction, d: int) -> bool:
    """x >= sqrt(d), exactly (x rational, d nonnegative integer)."""
    if x < 0:
        return d == 0 and x == 0
    return x * x >= d
