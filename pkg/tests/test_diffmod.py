import random
from fractions import Fraction as F

import pytest

from padicdiff.arith import Interval, Prime
from padicdiff.diffmod import (
    DiffModule,
    RFMatrix,
    companion_of,
    frobenius_pullback,
    gauge_transform,
    gn_sequence,
    norm_sequence,
)
from padicdiff.errors import BudgetExceededError, DomainError, InputError, InvalidGaugeError
from padicdiff.laurent import LaurentPoly, RationalFunction, gauss_norm, parse_rational_function

P2 = Prime(2)
I01 = Interval(0, 1)


def P(text, var="x"):
    return parse_rational_function(text, var)


def scalar_module(text, p=2, interval=I01):
    return DiffModule(Prime(p), RFMatrix([[P(text)]]), interval)


def rand_rf(rng):
    num = LaurentPoly({e: rng.randint(-4, 4) for e in range(rng.randint(1, 4))})
    dens = [
        LaurentPoly.one(),
        LaurentPoly.x(),
        LaurentPoly({0: rng.randint(1, 3), 1: 1}),
        LaurentPoly({0: rng.randint(1, 3), 2: 1}),
    ]
    return RationalFunction(num, rng.choice(dens))


# -- matrices -----------------------------------------------------------------


def test_matrix_identity_inverse():
    rows = [["1", "x"], ["0", "1"]]
    H = RFMatrix.from_strings(rows)
    Hinv = H.inverse()
    assert H @ Hinv == RFMatrix.identity(2)
    assert H.det() == RationalFunction.one()


def test_matrix_det_3x3():
    H = RFMatrix.from_strings([["1", "0", "2"], ["0", "x", "0"], ["1", "0", "1"]])
    assert H.det() == P("-x")


def test_singular_inverse_raises():
    H = RFMatrix.from_strings([["1", "1"], ["1", "1"]])
    with pytest.raises(InvalidGaugeError):
        H.inverse()


def test_module_requires_square():
    with pytest.raises(InputError):
        DiffModule(P2, RFMatrix.from_strings([["1", "2"]]), I01)


def test_pole_detection():
    m = DiffModule(P2, RFMatrix([[P("1/(x-2)")]]), Interval(-2, 0))
    assert m.pole_violations() == [(0, 0)]
    assert not m.is_pole_free
    with pytest.raises(InputError):
        m.validate()
    assert scalar_module("1/x").is_pole_free


# -- gauge transforms ------------------------------------------------------------


def test_gauge_identity_fixes_matrix():
    m = scalar_module("1/(2*x)")
    out = gauge_transform(m, RFMatrix.identity(1))
    assert out.matrix == m.matrix


def test_gauge_scalar_example():
    # rank 1, H = (x): result is g + 1/x
    m = scalar_module("1/(2*x)")
    out = gauge_transform(m, RFMatrix([[P("x")]]))
    assert out.matrix.entry(0, 0) == P("1/(2*x) + 1/x")


def test_gauge_residual_identity():
    rng = random.Random(5)
    q = [P("1/x"), P("2 + x")]
    m = companion_of(P2, q, I01)
    for _ in range(10):
        H = RFMatrix.identity(2)
        for _ in range(3):
            i, j = rng.sample([0, 1], 2)
            entry = LaurentPoly.x(rng.randint(0, 2), rng.choice([-2, -1, 1, 2]))
            E = [[RationalFunction.one(), RationalFunction.zero()],
                 [RationalFunction.zero(), RationalFunction.one()]]
            E[i][j] = RationalFunction(entry)
            H = H @ RFMatrix(E)
        out = gauge_transform(m, H)
        # H[G]*H == H*G + H' exactly
        assert out.matrix @ H == H @ m.matrix + H.derivative()


def test_gauge_singular_rejected():
    m = scalar_module("0")
    with pytest.raises(InvalidGaugeError):
        gauge_transform(m, RFMatrix([[RationalFunction.zero()]]))


def test_gauge_can_introduce_poles():
    m = DiffModule(P2, RFMatrix.diagonal([P("1"), P("1")]), Interval(-2, 0))
    H = RFMatrix.from_strings([["x - 2", "0"], ["0", "1"]])
    out = gauge_transform(m, H)
    assert not out.is_pole_free  # picks up 1/(x-2)


# -- taylor recursion --------------------------------------------------------------


def test_gn_zero_module():
    state = gn_sequence(scalar_module("0"), 8)
    for n in range(1, 9):
        assert state.term_matrix(n).is_zero


def test_gn_constant_scalar():
    state = gn_sequence(scalar_module("3"), 6)
    for n in range(7):
        assert state.term_matrix(n) == RFMatrix([[RationalFunction.constant(3**n)]])


def test_gn_euler_closed_form():
    # G = (a/x): G_n = a(a-1)...(a-n+1) / x^n
    a = F(1, 2)
    state = gn_sequence(scalar_module("1/(2*x)"), 6)
    coeff = F(1)
    for n in range(7):
        want = RationalFunction(LaurentPoly({-n: coeff}) if coeff else LaurentPoly.zero())
        assert state.term_matrix(n) == RFMatrix([[want]])
        coeff *= a - n
    # a = 1 kills the sequence at n = 2
    state2 = gn_sequence(scalar_module("1/x"), 4)
    assert state2.term_matrix(1) == RFMatrix([[P("1/x")]])
    assert state2.term_matrix(2).is_zero
    assert state2.term_matrix(3).is_zero


def test_gn_matches_direct_recursion():
    rng = random.Random(11)
    for _ in range(8):
        mu = rng.randint(1, 3)
        G = RFMatrix([[rand_rf(rng) for _ in range(mu)] for _ in range(mu)])
        m = DiffModule(Prime(rng.choice([2, 3])), G, I01)
        state = gn_sequence(m, 5)
        direct = RFMatrix.identity(mu)
        for n in range(6):
            assert state.term_matrix(n) == direct
            direct = (direct.derivative() + direct @ G).reduced()


def test_gn_invariant_p_over_q():
    # G_n = P(n)/Q^n holds by construction; spot-check entries
    m = DiffModule(P2, RFMatrix([[P("1/(1+x)"), P("2")], [P("0"), P("x/(1+x)")]]), I01)
    state = gn_sequence(m, 4)
    assert state.Q == LaurentPoly({0: 1, 1: 1})
    for n in range(5):
        pn = state.P(n)
        qn = state.Q**n
        for i in range(2):
            for j in range(2):
                assert RationalFunction(pn[i][j], qn) == state.term_matrix(n).entry(i, j)


def test_budget_guard():
    m = DiffModule(P2, RFMatrix([[P("1 + x")]]), I01)
    with pytest.raises(BudgetExceededError):
        gn_sequence(m, 2000, budget=500)


# -- norm sequences ------------------------------------------------------------------


def test_norm_sequence_zero_module():
    seq = norm_sequence(scalar_module("0"), 0, 8)
    assert seq[0] == 0
    assert all(v is None for v in seq.values[1:])


def test_norm_sequence_entry0_always_zero():
    rng = random.Random(12)
    for _ in range(5):
        m = DiffModule(P2, RFMatrix([[rand_rf(rng)]]), I01)
        assert norm_sequence(m, F(1, 2), 4)[0] == 0


def test_norm_sequence_exp_legendre():
    # G = (1), p = 2, rho = 0: entry n is n - s_2(n)
    seq = norm_sequence(scalar_module("1"), 0, 16)
    for n in range(17):
        assert seq[n] == F(n - bin(n).count("1"))


def test_norm_sequence_euler_closed_form():
    # G = (1/(2x)), p = 2, rho = 0: entry n is n + (n - s_2(n))
    m = scalar_module("1/(2*x)", interval=Interval(-1, 1))
    seq = norm_sequence(m, 0, 16)
    for n in range(17):
        assert seq[n] == F(n + n - bin(n).count("1"))


def test_norm_sequence_respects_interval_closure():
    m = scalar_module("1")
    norm_sequence(m, 1, 4)  # closure endpoint allowed
    with pytest.raises(DomainError):
        norm_sequence(m, 2, 4)


def test_norm_sequence_unnormalized_flag():
    seq = norm_sequence(scalar_module("1"), 0, 8, include_factorial=False)
    assert all(v == 0 for v in seq.values)


# -- ramification pullback -------------------------------------------------------------


def test_pullback_examples():
    z = scalar_module("0", interval=Interval(-2, 2))
    assert frobenius_pullback(z, 1).matrix.is_zero
    one = scalar_module("1", interval=Interval(-2, 2))
    g = frobenius_pullback(one, 1)
    assert g.matrix.entry(0, 0) == P("2*x")
    assert (g.interval.lo, g.interval.hi) == (-1, 1)
    inv = scalar_module("1/x", interval=Interval(-2, 2))
    assert frobenius_pullback(inv, 1).matrix.entry(0, 0) == P("2/x")


def test_pullback_twice():
    one = scalar_module("1", interval=Interval(-4, 4))
    g = frobenius_pullback(one, 2)
    assert g.matrix.entry(0, 0) == P("4*x^3")
    assert (g.interval.lo, g.interval.hi) == (-1, 1)


def test_pullback_norm_identity():
    # |F| at p*rho equals |F(x^p)| at rho
    rng = random.Random(13)
    for _ in range(40):
        f = RationalFunction(
            LaurentPoly({e: rng.randint(-9, 9) for e in range(-2, 3)}),
            LaurentPoly({0: 1, 1: rng.randint(1, 5)}),
        )
        p = rng.choice([2, 3])
        rho = F(rng.randint(-6, 6), rng.randint(1, 3))
        assert gauss_norm(f, p * rho, p) == gauss_norm(f.substitute_power(p), rho, p)


def test_pullback_h_must_be_positive():
    with pytest.raises(InputError):
        frobenius_pullback(scalar_module("1"), 0)


# -- companion matrices ------------------------------------------------------------------


def test_companion_rank1():
    m = companion_of(P2, [P("-1/4")], I01)
    assert m.matrix.entry(0, 0) == P("1/4")


def test_companion_rank2_example():
    m = companion_of(P2, [P("0"), P("-1")], I01)
    assert m.matrix == RFMatrix.from_strings([["0", "1"], ["1", "0"]])


def test_companion_rank3_shape():
    q = [P("x"), P("2"), P("1/x")]
    m = companion_of(P2, q, I01)
    rows = m.matrix.rows
    assert rows[0][1] == RationalFunction.one() and rows[1][2] == RationalFunction.one()
    assert rows[0][0].is_zero and rows[0][2].is_zero and rows[1][0].is_zero
    assert [rows[2][j] for j in range(3)] == [-q[2], -q[1], -q[0]]
