"""Laurent polynomials and rational functions over exact rationals.

The coefficient domain is Q throughout; a Laurent polynomial is a finite
map from integer exponents to nonzero ``Fraction`` coefficients.  The Gauss
norm at log-radius rho,

    |sum a_n x^n| at rho  =  max_n ( log_p|a_n| + n*rho ),

is exact, multiplicative, and extends to quotients as numerator norm minus
denominator norm.  Root magnitudes of denominators come from lower Newton
polygons, which is all the root finding this package ever needs.

The module also owns the text grammar for rational functions used by the
command-line front end: integer literals, one variable, ``+ - * / ^`` and
parentheses, e.g. ``(1 - x^2)/(4*x)``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd as int_gcd
from typing import Mapping, Optional, Union

from .arith import BOTTOM, Interval, LogMag, Prime, Rational, as_prime, log_abs
from .errors import InputError, ParseError

__all__ = [
    "LaurentPoly",
    "RationalFunction",
    "gauss_norm",
    "newton_root_logmags",
    "pole_free_on",
    "interval_max_principle_check",
    "parse_rational_function",
    "poly_to_str",
    "rf_to_str",
]


class LaurentPoly:
    """A Laurent polynomial with exact rational coefficients.

    Stored as {exponent: coefficient} with no zero coefficients; the empty
    map is the zero polynomial.  Instances are immutable by convention.
    """

    __slots__ = ("_c", "_profiles")

    def __init__(self, coeffs: Optional[Mapping[int, Rational]] = None):
        c: dict[int, Fraction] = {}
        if coeffs:
            for e, v in coeffs.items():
                v = Fraction(v)
                if v:
                    c[int(e)] = v
        self._c = c
        self._profiles: dict[int, list[tuple[int, Fraction]]] = {}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly()

    @staticmethod
    def one() -> "LaurentPoly":
        return LaurentPoly({0: 1})

    @staticmethod
    def constant(value: Rational) -> "LaurentPoly":
        return LaurentPoly({0: Fraction(value)})

    @staticmethod
    def x(exponent: int = 1, coeff: Rational = 1) -> "LaurentPoly":
        return LaurentPoly({exponent: Fraction(coeff)})

    # -- structure ---------------------------------------------------------

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._c)

    def coeff(self, exponent: int) -> Fraction:
        return self._c.get(exponent, Fraction(0))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._c))

    @property
    def is_zero(self) -> bool:
        return not self._c

    @property
    def is_monomial(self) -> bool:
        return len(self._c) == 1

    @property
    def min_exp(self) -> int:
        if not self._c:
            raise InputError("zero polynomial has no support")
        return min(self._c)

    @property
    def max_exp(self) -> int:
        if not self._c:
            raise InputError("zero polynomial has no support")
        return max(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LaurentPoly):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == LaurentPoly.constant(other)._c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __repr__(self) -> str:
        return f"LaurentPoly({poly_to_str(self)})"

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        c = dict(self._c)
        for e, v in other._c.items():
            w = c.get(e, 0) + v
            if w:
                c[e] = w
            elif e in c:
                del c[e]
        out = LaurentPoly.__new__(LaurentPoly)
        out._c, out._profiles = c, {}
        return out

    def __neg__(self) -> "LaurentPoly":
        out = LaurentPoly.__new__(LaurentPoly)
        out._c = {e: -v for e, v in self._c.items()}
        out._profiles = {}
        return out

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: Union["LaurentPoly", Rational]) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return LaurentPoly.zero()
            out = LaurentPoly.__new__(LaurentPoly)
            out._c = {e: v * other for e, v in self._c.items()}
            out._profiles = {}
            return out
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        # convolve over Z after clearing denominators: one Fraction build per
        # output coefficient instead of one per term product
        d1 = d2 = 1
        for v in self._c.values():
            d1 = d1 * v.denominator // int_gcd(d1, v.denominator)
        for v in other._c.values():
            d2 = d2 * v.denominator // int_gcd(d2, v.denominator)
        a = {e: v.numerator * (d1 // v.denominator) for e, v in self._c.items()}
        b = {e: v.numerator * (d2 // v.denominator) for e, v in other._c.items()}
        acc: dict[int, int] = {}
        get = acc.get
        for e1, v1 in a.items():
            for e2, v2 in b.items():
                e = e1 + e2
                acc[e] = get(e, 0) + v1 * v2
        scale = Fraction(1, d1 * d2)
        out = LaurentPoly.__new__(LaurentPoly)
        out._c = {e: v * scale for e, v in acc.items() if v}
        out._profiles = {}
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if not self.is_monomial:
                raise InputError("negative powers only for monomials; use RationalFunction")
            e, v = next(iter(self._c.items()))
            return LaurentPoly({e * n: Fraction(1) / v ** (-n)})
        result = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def derivative(self) -> "LaurentPoly":
        """Termwise d/dx: a_n x^n -> n a_n x^(n-1)."""
        return LaurentPoly({e - 1: e * v for e, v in self._c.items() if e})

    def substitute_power(self, m: int) -> "LaurentPoly":
        """x -> x^m for a nonzero integer m."""
        if m == 0:
            raise InputError("substitution exponent must be nonzero")
        return LaurentPoly({e * m: v for e, v in self._c.items()})

    def shifted(self, k: int) -> "LaurentPoly":
        """Multiply by x^k."""
        out = LaurentPoly.__new__(LaurentPoly)
        out._c = {e + k: v for e, v in self._c.items()}
        out._profiles = {}
        return out

    # -- norms -------------------------------------------------------------

    def norm_profile(self, p: Union[int, Prime]) -> list[tuple[int, Fraction]]:
        """Sorted (exponent, log_p|coeff|) pairs; cached per prime."""
        q = as_prime(p).p
        prof = self._profiles.get(q)
        if prof is None:
            prof = sorted((e, log_abs(v, q).log) for e, v in self._c.items())
            self._profiles[q] = prof
        return prof

    def gauss_norm(self, rho: Rational, p: Union[int, Prime]) -> LogMag:
        if not self._c:
            return BOTTOM
        rho = Fraction(rho)
        return LogMag(max(lv + e * rho for e, lv in self.norm_profile(p)))


# ---------------------------------------------------------------------------
# ordinary-polynomial helpers (min exponent 0), used for reduction and gcd
# ---------------------------------------------------------------------------


def _deg(c: dict[int, Fraction]) -> int:
    return max(c) if c else -1


def _poly_divmod(a: dict[int, Fraction], b: dict[int, Fraction]):
    """Division with remainder in Q[x]; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = dict(a)
    quo: dict[int, Fraction] = {}
    db, lb = _deg(b), b[_deg(b)]
    while rem and _deg(rem) >= db:
        dr = _deg(rem)
        f = rem[dr] / lb
        quo[dr - db] = f
        for e, v in b.items():
            ee = e + dr - db
            w = rem.get(ee, Fraction(0)) - f * v
            if w:
                rem[ee] = w
            elif ee in rem:
                del rem[ee]
    return quo, rem


def _prim_int(c: dict[int, Fraction]) -> dict[int, int]:
    """Scale a nonzero rational polynomial to primitive integer coefficients."""
    den = 1
    for v in c.values():
        den = den * v.denominator // int_gcd(den, v.denominator)
    ints = {e: v.numerator * (den // v.denominator) for e, v in c.items()}
    g = 0
    for v in ints.values():
        g = int_gcd(g, v)
    return {e: v // g for e, v in ints.items()}


def _int_prem(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    """Pseudo-remainder of a by b in Z[x] (b nonzero)."""
    db, lb = _deg(b), b[_deg(b)]
    rem = dict(a)
    while rem and _deg(rem) >= db:
        dr = _deg(rem)
        lr = rem[dr]
        nxt = {e: v * lb for e, v in rem.items()}
        for e, v in b.items():
            ee = e + dr - db
            w = nxt.get(ee, 0) - lr * v
            if w:
                nxt[ee] = w
            elif ee in nxt:
                del nxt[ee]
        rem = nxt
    return rem


def _poly_gcd(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    """Monic gcd in Q[x] via a primitive pseudo-remainder sequence.

    Working over Z[x] with content stripped after every pseudo-division
    keeps intermediate coefficients small; plain Euclid over Q[x] blows up.
    """
    if not a and not b:
        return {}
    A = _prim_int(a) if a else {}
    B = _prim_int(b) if b else {}
    if not A:
        A, B = B, A
    while B:
        R = _int_prem(A, B)
        A, B = B, (_prim_int({e: Fraction(v) for e, v in R.items()}) if R else {})
    lead = A[_deg(A)]
    return {e: Fraction(v, lead) for e, v in A.items()}


def _content(c: dict[int, Fraction]) -> Fraction:
    """Positive rational content: c / content is primitive with integer coeffs."""
    num = 0
    den = 1
    for v in c.values():
        num = int_gcd(num, abs(v.numerator))
        den = den * v.denominator // int_gcd(den, v.denominator)
    return Fraction(num, den)


class RationalFunction:
    """A quotient of Laurent polynomials, not necessarily reduced.

    Equality is representation-independent (cross multiplication).  Lowest
    terms are computed on demand by :meth:`reduce`, which also absorbs
    monomial denominators into the Laurent numerator and normalizes the
    remaining denominator to a primitive integer polynomial with positive
    leading coefficient and nonzero constant term.
    """

    __slots__ = ("num", "den", "_reduced")

    def __init__(self, num: LaurentPoly, den: Optional[LaurentPoly] = None):
        if den is None:
            den = LaurentPoly.one()
        if den.is_zero:
            raise InputError("zero denominator")
        self.num = num
        self.den = den
        self._reduced: Optional[RationalFunction] = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "RationalFunction":
        return RationalFunction(LaurentPoly.zero())

    @staticmethod
    def one() -> "RationalFunction":
        return RationalFunction(LaurentPoly.one())

    @staticmethod
    def constant(value: Rational) -> "RationalFunction":
        return RationalFunction(LaurentPoly.constant(value))

    @staticmethod
    def from_poly(f: LaurentPoly) -> "RationalFunction":
        return RationalFunction(f)

    @staticmethod
    def from_string(text: str, var: str = "x") -> "RationalFunction":
        return parse_rational_function(text, var)

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        r = self.reduce()
        return r.den == LaurentPoly.one()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.constant(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:
        r = self.reduce()
        return hash((r.num, r.den))

    def __repr__(self) -> str:
        return f"RationalFunction({rf_to_str(self)})"

    # -- field operations ---------------------------------------------------

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den is other.den or self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero:
            raise InputError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            if self.num.is_zero:
                raise InputError("negative power of zero")
            return RationalFunction(self.den ** (-n), self.num ** (-n))
        return RationalFunction(self.num**n, self.den**n)

    def derivative(self) -> "RationalFunction":
        """Quotient rule: (n/d)' = (n'd - nd')/d^2."""
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def substitute_power(self, m: int) -> "RationalFunction":
        return RationalFunction(self.num.substitute_power(m), self.den.substitute_power(m))

    # -- reduction -----------------------------------------------------------

    def reduce(self) -> "RationalFunction":
        """Lowest terms with a canonical denominator (cached)."""
        if self._reduced is not None:
            return self._reduced
        if self.num.is_zero:
            out = RationalFunction(LaurentPoly.zero())
        else:
            m_num, m_den = self.num.min_exp, self.den.min_exp
            n0 = {e - m_num: v for e, v in self.num._c.items()}
            d0 = {e - m_den: v for e, v in self.den._c.items()}
            g = _poly_gcd(n0, d0)
            if _deg(g) > 0:
                n0, _ = _poly_divmod(n0, g)
                d0, _ = _poly_divmod(d0, g)
            scale = _content(d0)
            if d0[_deg(d0)] < 0:
                scale = -scale
            num = LaurentPoly({e + m_num - m_den: v / scale for e, v in n0.items()})
            den = LaurentPoly({e: v / scale for e, v in d0.items()})
            if den.is_monomial and den.min_exp == 0 and den.coeff(0) == 1:
                den = LaurentPoly.one()
            out = RationalFunction(num, den)
        out._reduced = out
        self._reduced = out
        return out


def _coerce(value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, LaurentPoly):
        return RationalFunction(value)
    if isinstance(value, (int, Fraction)):
        return RationalFunction.constant(value)
    return NotImplemented


def gauss_norm(
    f: Union[LaurentPoly, RationalFunction],
    rho: Rational,
    p: Union[int, Prime],
) -> LogMag:
    """Gauss norm log_p|f| at log-radius rho.

    For a Laurent polynomial this is max_n (log_p|a_n| + n*rho); for a
    quotient it is the numerator norm minus the denominator norm, which by
    multiplicativity never requires reduction.
    """
    if isinstance(f, LaurentPoly):
        return f.gauss_norm(rho, p)
    if f.den.is_zero:
        raise InputError("zero denominator")
    den_norm = f.den.gauss_norm(rho, p)
    return f.num.gauss_norm(rho, p) - den_norm


def newton_root_logmags(f: LaurentPoly, p: Union[int, Prime]) -> list[tuple[Fraction, int]]:
    """Log-magnitudes of the nonzero roots of f, with multiplicities.

    Computed from the lower Newton polygon of the points (n, v_p(a_n)):
    a hull segment of slope s and horizontal length m accounts for m roots
    of log-magnitude s over an algebraically closed valued field.  Roots at
    0 (monomial factors) carry no finite log-magnitude and are dropped.
    """
    if f.is_zero:
        raise InputError("zero polynomial has every root")
    q = as_prime(p).p
    pts = sorted((e, -lv) for e, lv in f.norm_profile(q))  # (exponent, valuation)
    if len(pts) == 1:
        return []
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep the lower hull: drop the middle point when it lies on or
            # above the segment joining its neighbours
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        out.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    return out


def pole_free_on(
    f: RationalFunction,
    interval: Interval,
    p: Union[int, Prime],
) -> bool:
    """True iff f has no pole of log-magnitude inside the open interval.

    Reduces f to lowest terms first; poles are the denominator roots, whose
    log-magnitudes are read off the Newton polygon.
    """
    r = f.reduce()
    if r.den == LaurentPoly.one():
        return True
    return not any(interval.contains(s) for s, _ in newton_root_logmags(r.den, p))


def pole_logmags(f: RationalFunction, p: Union[int, Prime]) -> list[Fraction]:
    """Distinct log-magnitudes of poles of f (after reduction)."""
    r = f.reduce()
    if r.den == LaurentPoly.one():
        return []
    return sorted({s for s, _ in newton_root_logmags(r.den, p)})


def interval_max_principle_check(
    f: RationalFunction,
    rho1: Rational,
    rho: Rational,
    rho2: Rational,
    p: Union[int, Prime],
) -> bool:
    """Whether |f| at rho is bounded by the max of the endpoint norms.

    Always true for a function pole-free on [rho1, rho2]; exposed as a test
    oracle for the interval maximum principle.
    """
    rho1, rho, rho2 = Fraction(rho1), Fraction(rho), Fraction(rho2)
    if not rho1 <= rho <= rho2:
        raise InputError("need rho1 <= rho <= rho2")
    mid = gauss_norm(f, rho, p)
    return mid <= max(gauss_norm(f, rho1, p), gauss_norm(f, rho2, p))


# ---------------------------------------------------------------------------
# text grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, object]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1))))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2)))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError(f"unexpected character at position {pos}: {text[pos:].strip()[0]!r}")
    return tokens


class _Parser:
    """Recursive descent over: expr := term (('+'|'-') term)*,
    term := unary (('*'|'/') unary)*, unary := ('-'|'+')* power,
    power := atom ('^' signed_int)?, atom := int | var | '(' expr ')'.
    """

    def __init__(self, tokens, var: str):
        self.tokens = tokens
        self.var = var
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}")

    def parse(self) -> RationalFunction:
        out = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input starting at {self.peek()[1]!r}")
        return out

    def expr(self) -> RationalFunction:
        out = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> RationalFunction:
        out = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.unary()
            out = out * rhs if op == "*" else out / rhs
        return out

    def unary(self) -> RationalFunction:
        sign = 1
        while self.peek() in (("op", "-"), ("op", "+")):
            if self.take()[1] == "-":
                sign = -sign
        out = self.power()
        return out if sign > 0 else -out

    def power(self) -> RationalFunction:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return base ** self.signed_int()
        return base

    def signed_int(self) -> int:
        if self.peek() == ("op", "("):
            self.take()
            n = self.signed_int()
            self.expect_op(")")
            return n
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        kind, val = self.take()
        if kind != "int":
            raise ParseError(f"expected integer exponent, found {val!r}")
        return sign * val

    def atom(self) -> RationalFunction:
        kind, val = self.take()
        if kind == "int":
            return RationalFunction.constant(val)
        if kind == "name":
            if val != self.var:
                raise ParseError(f"unknown symbol {val!r} (variable is {self.var!r})")
            return RationalFunction(LaurentPoly.x())
        if (kind, val) == ("op", "("):
            out = self.expr()
            self.expect_op(")")
            return out
        raise ParseError(f"unexpected token {val!r}")


def parse_rational_function(text: str, var: str = "x") -> RationalFunction:
    """Parse a rational-function string such as ``(1 - x^2)/(4*x)``."""
    if not text.strip():
        raise ParseError("empty expression")
    return _Parser(_tokenize(text), var).parse()


def _coeff_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def poly_to_str(f: LaurentPoly, var: str = "x") -> str:
    """Canonical text form, ascending exponents; re-parses to an equal value."""
    if f.is_zero:
        return "0"
    parts = []
    for e in f.support:
        v = f.coeff(e)
        mag = abs(v)
        if e == 0:
            body = _coeff_str(mag)
        else:
            xs = var if e == 1 else f"{var}^{e}"
            body = xs if mag == 1 else f"{_coeff_str(mag)}*{xs}"
        if not parts:
            parts.append(body if v > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if v > 0 else f"- {body}")
    return " ".join(parts)


def rf_to_str(f: RationalFunction, var: str = "x") -> str:
    """Canonical text form of a quotient; reduces first."""
    r = f.reduce()
    if r.den == LaurentPoly.one():
        return poly_to_str(r.num, var)
    return f"({poly_to_str(r.num, var)})/({poly_to_str(r.den, var)})"
