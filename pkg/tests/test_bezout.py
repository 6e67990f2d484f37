import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from matstab.bezout import (bezoutian, common_zeros, hankel_congruence, hankel_definiteness,
                            right_coprime)
from matstab.exceptions import DiagonalNotZero, NotSelfAdjoint
from matstab.markov import (Definiteness, RationalMatrixFraction, block_hankel,
                            markov_parameters)
from matstab.matpoly import MatrixPolynomial as MP

from conftest import random_poly

I2 = np.eye(2)
s = MP.scalar


def self_adjoint_pair(rng, p, m, gap):
    """Unitarily rotated diagonal real pair with deg P = m and deg Q = m + gap."""
    U, _ = np.linalg.qr(rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p)))
    dens = [np.poly(rng.uniform(-3, 3, m)) for _ in range(p)]
    nums = [np.r_[rng.uniform(0.5, 2), rng.standard_normal(m + gap)]
            for _ in range(p)]
    rot = lambda F: MP(U[None] @ F.coeffs @ U.conj().T[None])  # noqa: E731
    return rot(MP.diag(*nums)), rot(MP.diag(*dens))


# -- Bezoutian -----------------------------------------------------------------

def test_bezoutian_linear_scalar():
    a = 0.7
    B = bezoutian(s([1, -a]), s([1]), s([1, -a]), s([1]))
    assert B.data.shape == (1, 1) and np.allclose(B.data, 1)


def test_bezoutian_quadratic_scalar():
    B = bezoutian(s([1, 0, -1]), s([1]), s([1, 0, -1]), s([1]))
    assert np.allclose(B.data, [[0, 1], [1, 0]])


def test_bezoutian_requires_diagonal_vanishing():
    with pytest.raises(DiagonalNotZero):
        bezoutian(s([1, 0]), s([1]), s([1, 1]), s([1]))


def test_bezoutian_worked_example_hermitian(ex2):
    B = bezoutian(ex2.P.vee, ex2.Q.vee, ex2.P, ex2.Q)
    assert B.data.shape == (2, 2)
    assert np.allclose(B.data, B.data.conj().T)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 3), st.integers(1, 4), st.integers(-1, 1))
def test_bezoutian_recurrence_and_generating_function(seed, p, m, gap):
    rng = np.random.default_rng(seed)
    Q, P = self_adjoint_pair(rng, p, m, gap)
    B = bezoutian(P.vee, Q.vee, P, Q)
    assert np.linalg.norm(B.data - B.data.conj().T) <= 1e-9 * max(1.0, np.linalg.norm(B.data))
    # generating identity at random (z, u)
    for _ in range(25):
        z, u = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        num = P.vee(z) @ Q(u) - Q.vee(z) @ P(u)
        assert np.linalg.norm(B(z, u) - num / (z - u)) <= 1e-8 * (1 + np.linalg.norm(num / (z - u)))
    # block recurrence N_{a,b} = D_{a-1,b} - D_{a,b-1}
    n1, n2 = B.n1, B.n2
    Mt, M, L, Lt = (X.ascending() for X in (P.vee, Q.vee, P, Q))

    def coef(X, k):
        return X[k] if k < len(X) else np.zeros((p, p))

    def D(a, b):
        return B.block(a, b) if 0 <= a < n1 and 0 <= b < n2 else np.zeros((p, p))

    for a in range(n1 + 1):
        for b in range(n2 + 1):
            N = coef(Mt, a) @ coef(Lt, b) - coef(M, a) @ coef(L, b)
            assert np.allclose(N, D(a - 1, b) - D(a, b - 1), atol=1e-9)


# -- congruence ----------------------------------------------------------------

def test_congruence_worked_example(ex2):
    res = hankel_congruence(ex2)
    assert res.case == "b" and res.residual <= 1e-10


def test_congruence_scalar_inverse_z():
    res = hankel_congruence(RationalMatrixFraction(s([1]), s([1, 0])))
    assert res.case == "b" and res.residual <= 1e-12
    assert np.allclose(res.lhs.data, 1)


def test_congruence_scalar_linear_part():
    res = hankel_congruence(RationalMatrixFraction(s([1, 0, 0]), s([1, 0])))
    assert res.case == "a" and res.residual <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 3), st.integers(1, 4), st.booleans())
def test_congruence_random(seed, p, m, linear):
    rng = np.random.default_rng(seed)
    Q, P = self_adjoint_pair(rng, p, m, 1 if linear else 0)
    res = hankel_congruence(RationalMatrixFraction(Q, P))
    assert res.case == ("a" if linear else "b")
    assert res.residual <= 1e-8


def test_congruence_requires_self_adjoint():
    R = RationalMatrixFraction(MP([[[1, 1j], [0, 1]]]), MP([I2, 0 * I2]))
    with pytest.raises(NotSelfAdjoint):
        hankel_congruence(R)


# -- inertia through the Bezoutian ---------------------------------------------

def test_hankel_definiteness_matches_direct_class(ex2):
    inert = hankel_definiteness(ex2)
    assert inert.method == "bezoutian" and inert.cls is Definiteness.NEG_DEF
    direct = block_hankel(markov_parameters(ex2), 0, 0)
    assert direct.cls is inert.cls


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 3), st.integers(1, 3), st.booleans())
def test_hankel_definiteness_agrees_on_well_conditioned(seed, p, m, linear):
    rng = np.random.default_rng(seed)
    Q, P = self_adjoint_pair(rng, p, m, 1 if linear else 0)
    R = RationalMatrixFraction(Q, P)
    direct = block_hankel(markov_parameters(R), 0, m - 1)
    if direct.margin < 1e-6:
        return
    assert hankel_definiteness(R).cls is direct.cls


def test_hankel_definiteness_falls_back():
    # z^3 / z has a quadratic polynomial part, outside the congruence
    inert = hankel_definiteness(RationalMatrixFraction(s([1, 0, 0, 0]), s([1, 0])))
    assert inert.method == "hankel" and inert.cls is Definiteness.ZERO


# -- coprimeness ---------------------------------------------------------------

def test_coprime_worked_example_despite_common_zero(ex2):
    ok, ev = right_coprime(ex2.Q, ex2.P)
    assert ok and ev.method == "bezout-hankel"
    zeros = common_zeros(ex2.P, ex2.Q)
    assert len(zeros) == 1 and abs(zeros[0] - 1) < 1e-9


def test_coprime_unimodular_divisor_example():
    P = MP([[[0, 0], [0, 1]], [[1, 0], [0, 0]]])
    Q = MP([[[0, 0], [0, 1]], [[1, 1], [0, 0]]])
    ok, _ = right_coprime(Q, P)
    assert ok


def test_not_coprime_with_itself(ex2):
    ok, _ = right_coprime(ex2.P, ex2.P)
    assert not ok
    ok, _ = right_coprime(MP.diag([1, 1], [1, 2]), MP.diag([1, 1], [1, 3]))
    assert not ok


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 3), st.integers(1, 3), st.booleans())
@example(0, 1, 1, False)  # denominator z + c recentres to z
def test_coprime_routes_agree(seed, p, m, share):
    rng = np.random.default_rng(seed)
    Q, P = self_adjoint_pair(rng, p, m, 0)
    if share:
        # plant a common zero in one diagonal channel
        r = rng.uniform(-2, 2)
        dens = [np.poly(np.r_[r, rng.uniform(-3, 3, m - 1)])] + [np.poly(rng.uniform(-3, 3, m))
                                                                for _ in range(p - 1)]
        nums = [np.poly(np.r_[r, rng.uniform(-3, 3, m - 1)])] + [rng.standard_normal(m + 1)
                                                                for _ in range(p - 1)]
        P, Q = MP.diag(*dens), MP.diag(*nums)
    ok, ev = right_coprime(Q, P, cross_check=True)
    if ev.method == "bezout-hankel":
        assert ok == ev.details["pointwise_verdict"]
    if share:
        assert not ok


def test_common_zeros_diag_parts(ex3):
    from matstab.matpoly import even_odd_split
    Fe, Fo = even_odd_split(ex3)
    zeros = common_zeros(Fe, Fo)
    assert len(zeros) == 1 and abs(zeros[0] + 12) < 1e-8
    assert right_coprime(Fo, Fe)[0]


def test_coprime_random_generic(rng):
    P = random_poly(rng, 2, 2, monic=True)
    Q = random_poly(rng, 2, 1)
    assert right_coprime(Q, P)[0]


def test_coprime_agrees_with_certified_inertia():
    # four close real poles with positive definite masses: the Bezoutian is
    # definite but graded, and its rank must not contradict that
    U = np.array([[1.0, 0.0], [0.0, 1.0]])
    lams = np.array([1.85, 2.0, 3.05, 3.2])
    den = MP([c * np.eye(2) for c in np.poly(lams)])
    num = MP.zero(2)
    for j, E in enumerate([np.diag([1.0, 0.3]), np.diag([0.2, 1.0]), U, np.diag([0.5, 2.0])]):
        num = num + MP([-c * E for c in np.poly(np.delete(lams, j))])
    R = RationalMatrixFraction(num, den)
    inert = hankel_definiteness(R)
    ok, ev = right_coprime(R.Q, R.P, cross_check=True)
    assert inert.cls is Definiteness.NEG_DEF
    assert ok and ev.details["pointwise_verdict"]
