"""Differential modules on annuli and their exact transformations.

A module of rank mu is a square matrix G of rational functions together
with a prime p and an open interval of log-radii: the system dX/dx = G X.
This file owns the exact machinery around that object:

* gauge transforms H[G] = H G H^-1 + H' H^-1,
* the Taylor recursion G_0 = I, G_{n+1} = G_n' + G_n G at a generic point,
  run entirely over Z[x, 1/x] by clearing denominators,
* log-norm sequences log_p ||G_n / n!|| at any log-radius,
* ramification pullback F(z) -> p x^(p-1) F(x^p),
* companion matrices of monic scalar operators.

The recursion stores scaled integer numerators S_n with
G_n = S_n / (d^n Q^n), where Q is the common denominator of G and d clears
the remaining coefficient denominators; every step is then integer
polynomial arithmetic, which keeps the growth of intermediate objects to
polynomial multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .arith import (
    Interval,
    Prime,
    Rational,
    as_prime,
    factorial_log_abs,
    padic_valuation,
)
from .errors import BudgetExceededError, DomainError, InputError, InvalidGaugeError
from .laurent import (
    LaurentPoly,
    RationalFunction,
    _content,
    _deg,
    _poly_divmod,
    _poly_gcd,
    pole_free_on,
    parse_rational_function,
)

__all__ = [
    "RFMatrix",
    "DiffModule",
    "RecursionState",
    "NormSequence",
    "gauge_transform",
    "gn_sequence",
    "norm_sequence",
    "frobenius_pullback",
    "companion_of",
]

DEFAULT_DEPTH = 256
DEFAULT_COEFF_BUDGET = 5_000_000


class RFMatrix:
    """Square-friendly matrix of rational functions (immutable)."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[RationalFunction]]):
        rows = tuple(tuple(_as_rf(e) for e in row) for row in rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise InputError("matrix rows must be nonempty and of equal length")
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *_):
        raise AttributeError("RFMatrix is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "RFMatrix":
        one, zero = RationalFunction.one(), RationalFunction.zero()
        return RFMatrix([[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(n: int, m: Optional[int] = None) -> "RFMatrix":
        zero = RationalFunction.zero()
        return RFMatrix([[zero] * (m or n) for _ in range(n)])

    @staticmethod
    def diagonal(entries: Sequence[RationalFunction]) -> "RFMatrix":
        zero = RationalFunction.zero()
        n = len(entries)
        return RFMatrix(
            [[_as_rf(entries[i]) if i == j else zero for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def from_strings(rows: Sequence[Sequence[str]], var: str = "x") -> "RFMatrix":
        return RFMatrix([[parse_rational_function(s, var) for s in row] for row in rows])

    # -- structure ---------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]))

    @property
    def size(self) -> int:
        n, m = self.shape
        if n != m:
            raise InputError("matrix is not square")
        return n

    def entry(self, i: int, j: int) -> RationalFunction:
        return self.rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RFMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __hash__(self) -> int:
        return hash(tuple(tuple(e.reduce() for e in row) for row in self.rows))

    def __repr__(self) -> str:
        return f"RFMatrix({self.shape[0]}x{self.shape[1]})"

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.rows for e in row)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "RFMatrix") -> "RFMatrix":
        if self.shape != other.shape:
            raise InputError("shape mismatch")
        return RFMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __sub__(self, other: "RFMatrix") -> "RFMatrix":
        if self.shape != other.shape:
            raise InputError("shape mismatch")
        return RFMatrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __neg__(self) -> "RFMatrix":
        return RFMatrix([[-a for a in row] for row in self.rows])

    def __matmul__(self, other: "RFMatrix") -> "RFMatrix":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise InputError("shape mismatch")
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = RationalFunction.zero()
                for t in range(k):
                    acc = acc + self.rows[i][t] * other.rows[t][j]
                row.append(acc)
            out.append(row)
        return RFMatrix(out)

    def scaled(self, c: Union[RationalFunction, Rational]) -> "RFMatrix":
        c = _as_rf(c)
        return RFMatrix([[a * c for a in row] for row in self.rows])

    def derivative(self) -> "RFMatrix":
        return RFMatrix([[a.derivative() for a in row] for row in self.rows])

    def map_entries(self, fn: Callable[[RationalFunction], RationalFunction]) -> "RFMatrix":
        return RFMatrix([[fn(a) for a in row] for row in self.rows])

    def reduced(self) -> "RFMatrix":
        return self.map_entries(lambda e: e.reduce())

    def det(self) -> RationalFunction:
        """Determinant by cofactor expansion (ranks here stay tiny)."""
        n = self.size
        if n == 1:
            return self.rows[0][0].reduce()
        if n == 2:
            (a, b), (c, d) = self.rows
            return (a * d - b * c).reduce()
        acc = RationalFunction.zero()
        for j in range(n):
            if self.rows[0][j].is_zero:
                continue
            minor = RFMatrix([row[:j] + row[j + 1 :] for row in self.rows[1:]])
            term = self.rows[0][j] * minor.det()
            acc = acc + term if j % 2 == 0 else acc - term
        return acc.reduce()

    def inverse(self) -> "RFMatrix":
        """Adjugate over determinant; raises InvalidGaugeError when singular."""
        n = self.size
        d = self.det()
        if d.is_zero:
            raise InvalidGaugeError("singular matrix")
        if n == 1:
            return RFMatrix([[RationalFunction.one() / d]])
        adj = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = RFMatrix(
                    [row[:j] + row[j + 1 :] for k, row in enumerate(self.rows) if k != i]
                )
                cof = minor.det()
                if (i + j) % 2:
                    cof = -cof
                adj[j][i] = (cof / d).reduce()
        return RFMatrix(adj)


def _as_rf(value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, LaurentPoly):
        return RationalFunction(value)
    if isinstance(value, (int, Fraction)):
        return RationalFunction.constant(value)
    raise InputError(f"not a rational function: {value!r}")


@dataclass(eq=False)
class DiffModule:
    """A differential system dX/dx = G X over an open annulus.

    ``matrix`` is square; entries are expected to be pole-free on the
    interval, but the flag is only reported (gauge transforms can create
    poles and the result must stay inspectable).
    """

    p: Prime
    matrix: RFMatrix
    interval: Interval
    var: str = "x"
    _state: Optional["RecursionState"] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.p = as_prime(self.p)
        self.matrix.size  # raises when not square

    @property
    def rank(self) -> int:
        return self.matrix.size

    def pole_violations(self) -> list[tuple[int, int]]:
        """Entries with a pole of log-magnitude inside the interval."""
        out = []
        for i, row in enumerate(self.matrix.rows):
            for j, e in enumerate(row):
                if not pole_free_on(e, self.interval, self.p):
                    out.append((i, j))
        return out

    @property
    def is_pole_free(self) -> bool:
        return not self.pole_violations()

    def validate(self) -> "DiffModule":
        bad = self.pole_violations()
        if bad:
            raise InputError(f"matrix entries with poles on the annulus: {bad}")
        return self

    def taylor_state(self, depth: int, budget: int = DEFAULT_COEFF_BUDGET) -> "RecursionState":
        """Shared recursion state, grown on demand and cached on the module."""
        if self._state is None:
            self._state = RecursionState(self, depth, budget)
        else:
            self._state.extend(depth)
        return self._state


# ---------------------------------------------------------------------------
# integer Laurent helpers for the recursion engine
# ---------------------------------------------------------------------------


def _imul(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    acc: dict[int, int] = {}
    get = acc.get
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            acc[e] = get(e, 0) + c1 * c2
    return {e: v for e, v in acc.items() if v}


def _iadd_scaled(a: dict[int, int], b: dict[int, int], k: int) -> dict[int, int]:
    """a + k*b."""
    if not k:
        return dict(a)
    out = dict(a)
    for e, v in b.items():
        w = out.get(e, 0) + k * v
        if w:
            out[e] = w
        elif e in out:
            del out[e]
    return out


def _ideriv(a: dict[int, int]) -> dict[int, int]:
    return {e - 1: e * v for e, v in a.items() if e}


def _iscale(a: dict[int, int], k: int) -> dict[int, int]:
    return {e: k * v for e, v in a.items()} if k else {}


def _int_dict(f: LaurentPoly) -> dict[int, int]:
    out = {}
    for e, v in f.coeffs.items():
        if v.denominator != 1:
            raise InputError("expected integer coefficients")
        out[e] = v.numerator
    return out


class RecursionState:
    """Taylor-coefficient matrices of a module, scaled to integers.

    ``P(n)`` returns the rational numerator matrix with G_n = P(n) / Q^n;
    internally P(n) = S_n / d^n with integer S_n and a fixed integer d that
    clears the coefficient denominators of Q*G, so each step

        S_{n+1} = d*(Q*S_n' - n*S_n*Q') + S_n*(d*Q*G)

    stays in Z[x, 1/x].  Norm queries never rebuild coefficients: per-index
    profiles (exponent -> minimal valuation across entries) are cached.
    """

    def __init__(self, module: DiffModule, depth: int, budget: int = DEFAULT_COEFF_BUDGET):
        self.module = module
        self.p = module.p.p
        self.budget = budget
        mu = module.rank

        reduced = [[e.reduce() for e in row] for row in module.matrix.rows]
        q_dict: dict[int, Fraction] = {0: Fraction(1)}
        for row in reduced:
            for e in row:
                den = {k: v for k, v in e.den.coeffs.items()}
                if den == {0: Fraction(1)}:
                    continue
                g = _poly_gcd(q_dict, den)
                extra, _ = _poly_divmod(den, g)
                q_dict = {k: v for k, v in _mul_frac(q_dict, extra).items()}
        content = _content(q_dict)
        if q_dict[_deg(q_dict)] < 0:
            content = -content
        q_dict = {e: v / content for e, v in q_dict.items()}
        self.Q_poly = LaurentPoly(q_dict)
        self._q = _int_dict(self.Q_poly)
        self._dq = _ideriv(self._q)

        # numerators of Q*G as Laurent polynomials, then clear denominators
        p_entries: list[list[LaurentPoly]] = []
        d = 1
        for row in reduced:
            new_row = []
            for e in row:
                quo, rem = _poly_divmod(q_dict, e.den.coeffs)
                if rem:
                    raise InputError("common denominator does not divide an entry denominator")
                pe = e.num * LaurentPoly(quo)
                for v in pe.coeffs.values():
                    d = d * v.denominator // _gcd_int(d, v.denominator)
                new_row.append(pe)
            p_entries.append(new_row)
        self.d = d
        self._ptilde = tuple(
            tuple(_int_dict(pe * d) for pe in row) for row in p_entries
        )

        ident = tuple(
            tuple({0: 1} if i == j else {} for j in range(mu)) for i in range(mu)
        )
        self._S: list[tuple[tuple[dict[int, int], ...], ...]] = [ident]
        self._coeff_count = mu
        self._profiles: list[Optional[list[tuple[int, int]]]] = [None]
        self._vp_d = padic_valuation(d, self.p) if d != 1 else 0
        self.extend(depth)

    @property
    def depth(self) -> int:
        return len(self._S) - 1

    def extend(self, depth: int) -> None:
        mu = self.module.rank
        q, dq, pt, d = self._q, self._dq, self._ptilde, self.d
        trivial_q = q == {0: 1}
        while self.depth < depth:
            n = self.depth
            S = self._S[-1]
            new_rows = []
            for i in range(mu):
                row = []
                for j in range(mu):
                    acc = _imul(S[i][0], pt[0][j]) if mu else {}
                    for t in range(1, mu):
                        acc = _iadd_scaled(acc, _imul(S[i][t], pt[t][j]), 1)
                    if trivial_q:
                        term = _ideriv(S[i][j])
                        acc = _iadd_scaled(acc, term, d)
                    else:
                        term = _imul(q, _ideriv(S[i][j]))
                        if n:
                            term = _iadd_scaled(term, _imul(S[i][j], dq), -n)
                        acc = _iadd_scaled(acc, term, d)
                    row.append(acc)
                new_rows.append(tuple(row))
            self._S.append(tuple(new_rows))
            self._profiles.append(None)
            self._coeff_count += sum(len(c) for row in new_rows for c in row)
            if self._coeff_count > self.budget:
                raise BudgetExceededError(
                    f"recursion stopped at n={self.depth}: "
                    f"{self._coeff_count} stored coefficients exceed budget {self.budget}"
                )

    # -- exact views ---------------------------------------------------------

    @property
    def Q(self) -> LaurentPoly:
        return self.Q_poly

    def P(self, n: int) -> list[list[LaurentPoly]]:
        """Numerator matrix with G_n = P(n) / Q^n, exact rational coefficients."""
        scale = Fraction(1, self.d**n)
        return [
            [LaurentPoly({e: v * scale for e, v in c.items()}) for c in row]
            for row in self._S[n]
        ]

    def term_matrix(self, n: int) -> RFMatrix:
        """G_n as a matrix of rational functions (unreduced P(n)/Q^n)."""
        qn = self.Q_poly**n
        return RFMatrix([[RationalFunction(pe, qn) for pe in row] for row in self.P(n)])

    # -- norms ----------------------------------------------------------------

    def _profile(self, n: int) -> list[tuple[int, int]]:
        """(exponent, min valuation over entries) for S_n; [] when S_n = 0."""
        prof = self._profiles[n]
        if prof is None:
            merged: dict[int, int] = {}
            p = self.p
            for row in self._S[n]:
                for c in row:
                    for e, v in c.items():
                        w = _vp_int(v, p)
                        old = merged.get(e)
                        if old is None or w < old:
                            merged[e] = w
            prof = sorted(merged.items())
            self._profiles[n] = prof
        return prof

    def matrix_log_norm(self, n: int, rho: Rational) -> Optional[Fraction]:
        """log_p ||G_n|| at log-radius rho; None when G_n = 0."""
        prof = self._profile(n)
        if not prof:
            return None
        rho = Fraction(rho)
        best = max(-v + e * rho for e, v in prof)
        q_norm = self.Q_poly.gauss_norm(rho, self.p).log
        return best + n * (self._vp_d - q_norm)

    def log_norms(
        self,
        rho: Rational,
        depth: Optional[int] = None,
        include_factorial: bool = True,
    ) -> list[Optional[Fraction]]:
        """log_p ||G_n / n!|| (or ||G_n||) for n = 0..depth; None marks zero."""
        depth = self.depth if depth is None else depth
        self.extend(depth)
        rho = Fraction(rho)
        q_norm = self.Q_poly.gauss_norm(rho, self.p).log
        out: list[Optional[Fraction]] = []
        for n in range(depth + 1):
            prof = self._profile(n)
            if not prof:
                out.append(None)
                continue
            val = max(-v + e * rho for e, v in prof) + n * (self._vp_d - q_norm)
            if include_factorial:
                val -= factorial_log_abs(n, self.p)
            out.append(val)
        return out


def _mul_frac(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    acc: dict[int, Fraction] = {}
    for e1, v1 in a.items():
        for e2, v2 in b.items():
            e = e1 + e2
            acc[e] = acc.get(e, Fraction(0)) + v1 * v2
    return {e: v for e, v in acc.items() if v}


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _vp_int(n: int, p: int) -> int:
    """Valuation of a nonzero integer; coefficients here can carry valuations
    in the hundreds, so strip p in doubling chunks rather than one at a time."""
    if p == 2:
        return (n & -n).bit_length() - 1
    v = 0
    ladder = []
    power, step = p, 1
    while True:
        q, r = divmod(n, power)
        if r:
            break
        n = q
        v += step
        ladder.append((power, step))
        power, step = power * power, step * 2
    for power, step in reversed(ladder):
        q, r = divmod(n, power)
        if not r:
            n = q
            v += step
    return v


@dataclass(frozen=True)
class NormSequence:
    """log_p ||G_n / n!|| at a fixed log-radius; None entries mark zero matrices."""

    rho: Fraction
    values: tuple[Optional[Fraction], ...]
    include_factorial: bool = True

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> Optional[Fraction]:
        return self.values[n]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def gauge_transform(module: DiffModule, H: RFMatrix) -> DiffModule:
    """Basis change: the new matrix is H[G] = (H G + H') H^-1.

    The interval and rank are unchanged.  The result can acquire poles on
    the annulus; inspect ``is_pole_free`` on the returned module.
    """
    if H.size != module.rank:
        raise InputError("gauge size does not match module rank")
    h_inv = H.inverse()  # raises InvalidGaugeError when singular
    new_matrix = ((H @ module.matrix + H.derivative()) @ h_inv).reduced()
    return DiffModule(module.p, new_matrix, module.interval, module.var)


def gn_sequence(
    module: DiffModule,
    depth: int = DEFAULT_DEPTH,
    budget: int = DEFAULT_COEFF_BUDGET,
) -> RecursionState:
    """Taylor recursion state to the requested depth (shared and reusable)."""
    if depth < 0:
        raise InputError("depth must be nonnegative")
    return module.taylor_state(depth, budget)


def norm_sequence(
    module: DiffModule,
    rho: Rational,
    depth: int = DEFAULT_DEPTH,
    state: Optional[RecursionState] = None,
    include_factorial: bool = True,
) -> NormSequence:
    """Sequence log_p ||G_n / n!|| at rho for n = 0..depth.

    rho must lie in the closure of the module interval.
    """
    rho = Fraction(rho)
    if not module.interval.contains(rho, closed=True):
        raise DomainError(f"rho={rho} outside the closed interval {module.interval}")
    state = state or module.taylor_state(depth)
    vals = state.log_norms(rho, depth, include_factorial)
    return NormSequence(rho, tuple(vals), include_factorial)


def frobenius_pullback(module: DiffModule, h: int = 1) -> DiffModule:
    """h-fold ramification pullback.

    One step sends the matrix F(z) of d/dz to p x^(p-1) F(x^p), the matrix of
    d/dx after z = x^p, and maps the interval of log-radii to its p-th part
    (rho -> rho/p).  The rank is unchanged.
    """
    if h < 1:
        raise InputError("h must be a positive integer")
    p = module.p.p
    out = module
    factor = RationalFunction(LaurentPoly.x(p - 1, p))
    for _ in range(h):
        rows = [
            [(e.substitute_power(p) * factor).reduce() for e in row]
            for row in out.matrix.rows
        ]
        out = DiffModule(out.p, RFMatrix(rows), out.interval.scaled(Fraction(1, p)), out.var)
    return out


def companion_of(
    p: Union[int, Prime],
    q: Sequence[RationalFunction],
    interval: Interval,
    var: str = "x",
) -> DiffModule:
    """Module of the monic operator with coefficient list (q_1, ..., q_mu).

    The matrix has 1 on the superdiagonal and last row
    (-q_mu, -q_(mu-1), ..., -q_1): the system satisfied by
    (u, u', ..., u^(mu-1)) when u^(mu) + q_1 u^(mu-1) + ... + q_mu u = 0.
    """
    q = [_as_rf(e) for e in q]
    mu = len(q)
    if mu < 1:
        raise InputError("operator order must be at least 1")
    zero, one = RationalFunction.zero(), RationalFunction.one()
    rows = []
    for i in range(mu - 1):
        rows.append([one if j == i + 1 else zero for j in range(mu)])
    rows.append([-q[mu - 1 - j] for j in range(mu)])
    return DiffModule(as_prime(p), RFMatrix(rows), interval, var)
