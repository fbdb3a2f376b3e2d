"""Exact p-adic magnitude arithmetic in base-p logarithmic coordinates.

Every absolute value handled by this package is stored as its base-p
logarithm, an exact rational: |a| = p^v corresponds to ``LogMag(Fraction(v))``.
The absolute value 0 has no finite logarithm; it is the distinguished bottom
element ``LogMag.BOTTOM``, which absorbs products and is the identity of max.

Log-radii (rho = log_p r) are plain ``Fraction`` values; open intervals of
log-radii are ``Interval`` values.  Everything here is immutable and safe to
share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Union

from .errors import InputError

__all__ = [
    "Rational",
    "Prime",
    "as_prime",
    "LogMag",
    "BOTTOM",
    "Interval",
    "padic_valuation",
    "log_abs",
    "digit_sum",
    "factorial_log_abs",
]

Rational = Union[int, Fraction]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Prime:
    """A prime base p.

    Exposes the Dwork constant log_p(pi) = -1/(p-1), the logarithmic
    magnitude of pi = p^(-1/(p-1)).
    """

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise InputError(f"not a prime: {self.p!r}")

    @property
    def log_pi(self) -> Fraction:
        return Fraction(-1, self.p - 1)

    def __int__(self) -> int:
        return self.p

    def __str__(self) -> str:
        return str(self.p)


def as_prime(p: Union[int, Prime]) -> Prime:
    return p if isinstance(p, Prime) else Prime(int(p))


@total_ordering
@dataclass(frozen=True)
class LogMag:
    """log_p of a p-adic absolute value; ``log is None`` encodes |a| = 0.

    Addition is the magnitude of a product (logs add, bottom absorbs);
    the ordering makes ``max`` the magnitude of a sum's upper bound,
    with bottom below every finite value.
    """

    log: Optional[Fraction]

    @staticmethod
    def finite(value: Rational) -> "LogMag":
        return LogMag(Fraction(value))

    @property
    def is_bottom(self) -> bool:
        return self.log is None

    def __add__(self, other: object) -> "LogMag":
        if isinstance(other, LogMag):
            if self.log is None or other.log is None:
                return BOTTOM
            return LogMag(self.log + other.log)
        if isinstance(other, (int, Fraction)):
            return BOTTOM if self.log is None else LogMag(self.log + other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other: object) -> "LogMag":
        """Magnitude of a quotient; the divisor must be nonzero."""
        if isinstance(other, LogMag):
            if other.log is None:
                raise ZeroDivisionError("magnitude quotient by |0|")
            other = other.log
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return BOTTOM if self.log is None else LogMag(self.log - other)

    def scaled(self, factor: Rational) -> "LogMag":
        """Magnitude of a power |a|^t for exact rational t > 0."""
        return BOTTOM if self.log is None else LogMag(self.log * Fraction(factor))

    def __lt__(self, other: "LogMag") -> bool:
        if not isinstance(other, LogMag):
            return NotImplemented
        if self.log is None:
            return other.log is not None
        if other.log is None:
            return False
        return self.log < other.log

    def __float__(self) -> float:
        return float("-inf") if self.log is None else float(self.log)

    def __repr__(self) -> str:
        return "LogMag(bottom)" if self.log is None else f"LogMag({self.log})"


BOTTOM = LogMag(None)


def padic_valuation(n: int, p: Union[int, Prime]) -> int:
    """v_p(n) for a nonzero integer n."""
    if n == 0:
        raise InputError("valuation of 0 is undefined; use log_abs, which returns bottom")
    q = as_prime(p).p
    n = abs(n)
    v = 0
    while n % q == 0:
        v += 1
        n //= q
    return v


def log_abs(a: Rational, p: Union[int, Prime]) -> LogMag:
    """log_p |a|_p of an exact rational, BOTTOM for a = 0.

    For a = p^k * u/v with u, v coprime to p this is the integer -k;
    log_abs(12, 2) = -2 because |12|_2 = 1/4.
    """
    a = Fraction(a)
    if a == 0:
        return BOTTOM
    q = as_prime(p).p
    return LogMag(Fraction(padic_valuation(a.denominator, q) - padic_valuation(a.numerator, q)))


def digit_sum(n: int, p: Union[int, Prime]) -> int:
    """Sum of base-p digits of n >= 0."""
    if n < 0:
        raise InputError("digit_sum needs n >= 0")
    q = as_prime(p).p
    s = 0
    while n:
        s += n % q
        n //= q
    return s


def factorial_log_abs(n: int, p: Union[int, Prime]) -> Fraction:
    """log_p |n!|_p, computed exactly as -(n - digit_sum_p(n))/(p - 1)."""
    q = as_prime(p).p
    return Fraction(-(n - digit_sum(n, q)), q - 1)


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi) of log-radii with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not self.lo < self.hi:
            raise InputError(f"degenerate or empty interval ({self.lo}, {self.hi})")

    def contains(self, rho: Rational, closed: bool = False) -> bool:
        rho = Fraction(rho)
        if closed:
            return self.lo <= rho <= self.hi
        return self.lo < rho < self.hi

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def interior_grid(self, count: int) -> list[Fraction]:
        """count equispaced points strictly inside the interval."""
        if count < 1:
            raise InputError("grid needs at least one point")
        step = (self.hi - self.lo) / (count + 1)
        return [self.lo + step * k for k in range(1, count + 1)]

    def scaled(self, factor: Rational) -> "Interval":
        """Interval of rho * factor, for factor > 0."""
        factor = Fraction(factor)
        if factor <= 0:
            raise InputError("interval scaling factor must be positive")
        return Interval(self.lo * factor, self.hi * factor)

    def remove_points(self, points) -> list["Interval"]:
        """Open subintervals left after deleting finitely many points."""
        cuts = sorted({Fraction(q) for q in points if self.contains(q)})
        pieces = []
        lo = self.lo
        for c in cuts:
            if lo < c:
                pieces.append(Interval(lo, c))
            lo = c
        if lo < self.hi:
            pieces.append(Interval(lo, self.hi))
        return pieces

    def __str__(self) -> str:
        return f"({self.lo}, {self.hi})"
