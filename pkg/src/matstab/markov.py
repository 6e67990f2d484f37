"""Rational matrix fractions, their Markov parameters and block Hankel matrices.

A fraction ``R(z) = Q(z) P(z)^-1`` has the Laurent expansion at infinity

    R(z) = sum_{j=0}^{k} s_{-(j+1)} z^j + sum_{j>=0} s_j z^{-(j+1)},

and ``H_{j,k}(R)`` is the ``(k+1) x (k+1)`` block Hankel matrix with block
``(a, b)`` equal to ``s_{j+a+b}``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._numerics import asymmetry, hermitian_part, numerical_rank
from .exceptions import InsufficientCoefficients, NonInvertibleLeading, NotHermitian
from .matpoly import MatrixPolynomial, right_divide
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "RationalMatrixFraction",
    "MarkovSequence",
    "BlockHankel",
    "Definiteness",
    "split_proper",
    "markov_parameters",
    "block_hankel",
    "definiteness",
    "is_self_adjoint_fraction",
]


class RationalMatrixFraction:
    """Right matrix fraction ``R(z) = Q(z) P(z)^-1``.

    The denominator is stored monic: when ``P`` has an invertible leading
    coefficient ``L``, both ``Q`` and ``P`` are right-multiplied by ``L^-1``,
    which leaves ``Q P^-1`` unchanged.

    Parameters
    ----------
    Q, P : MatrixPolynomial
        Numerator and denominator of the same size ``p``.
    tol : Tolerances, optional

    Raises
    ------
    NonInvertibleLeading
        If ``P`` is zero or its leading coefficient is singular.
    """

    def __init__(self, Q, P, tol: Tolerances = DEFAULT):
        if Q.p != P.p:
            raise ValueError(f"size mismatch: Q is {Q.p}x{Q.p}, P is {P.p}x{P.p}")
        if P.is_zero():
            raise NonInvertibleLeading("denominator is the zero polynomial")
        rank, _, _ = numerical_rank(P.leading, tol.rank, P.p)
        if rank < P.p:
            raise NonInvertibleLeading("denominator has a singular leading coefficient")
        L_inv = np.linalg.inv(P.leading)
        if P.is_monic():
            self.Q, self.P = Q, P
        else:
            self.Q, self.P = Q @ L_inv, P @ L_inv
            # the new leading block is I up to round-off; pin it exactly
            c = self.P.coeffs.copy()
            c[0] = np.eye(P.p)
            self.P = MatrixPolynomial(c)
        self.tol = tol
        self._self_adjoint = None

    @property
    def p(self):
        return self.P.p

    @property
    def m(self):
        """Degree of the (monic) denominator."""
        return self.P.degree

    def __call__(self, z):
        Pz, Qz = self.P(z), self.Q(z)
        return np.swapaxes(np.linalg.solve(np.swapaxes(Pz, -1, -2), np.swapaxes(Qz, -1, -2)), -1, -2)

    def is_self_adjoint(self):
        if self._self_adjoint is None:
            self._self_adjoint = is_self_adjoint_fraction(self, self.tol)
        return self._self_adjoint

    def __repr__(self):
        return f"RationalMatrixFraction(p={self.p}, deg Q={self.Q.degree}, deg P={self.P.degree})"


@dataclass(frozen=True)
class MarkovSequence:
    """Laurent coefficients of a rational matrix fraction at infinity.

    ``poly_part[j]`` is the coefficient of ``z**j`` in the polynomial part,
    i.e. ``s_{-(j+1)}``; ``proper[j]`` is ``s_j`` for ``j = 0..N``.
    """

    poly_part: np.ndarray
    proper: np.ndarray
    p: int

    @property
    def N(self):
        return len(self.proper) - 1

    def s(self, j):
        """``s_j`` for any ``j >= -len(poly_part)``; zero beyond the polynomial part."""
        if j >= 0:
            if j > self.N:
                raise InsufficientCoefficients(f"s_{j} requested but only s_0..s_{self.N} computed")
            return self.proper[j]
        k = -j - 1
        if k < len(self.poly_part):
            return self.poly_part[k]
        return np.zeros((self.p, self.p), dtype=complex)


class Definiteness(enum.Enum):
    POS_DEF = "PosDef"
    NEG_DEF = "NegDef"
    POS_SEMIDEF = "PosSemiDef"
    NEG_SEMIDEF = "NegSemiDef"
    INDEFINITE = "Indefinite"
    ZERO = "Zero"
    EMPTY = "Empty"

    @property
    def negative_definite(self):
        return self in (Definiteness.NEG_DEF, Definiteness.EMPTY)

    @property
    def positive_definite(self):
        return self in (Definiteness.POS_DEF, Definiteness.EMPTY)

    @property
    def nonpositive(self):
        return self in (Definiteness.NEG_DEF, Definiteness.NEG_SEMIDEF,
                        Definiteness.ZERO, Definiteness.EMPTY)

    @property
    def nonnegative(self):
        return self in (Definiteness.POS_DEF, Definiteness.POS_SEMIDEF,
                        Definiteness.ZERO, Definiteness.EMPTY)


@dataclass(frozen=True)
class DefinitenessResult:
    cls: Definiteness
    eigenvalues: np.ndarray = field(repr=False)
    margin: float
    threshold: float
    asymmetry: float


def definiteness(H, tol=DEFAULT.definiteness, herm_tol=DEFAULT.hermitian, equilibrate=False):
    """Classify a Hermitian matrix by the signs of its eigenvalues.

    Eigenvalues with ``|e| <= tol * max(1, ||H||)`` count as zero.  The
    returned margin is the smallest ``|e|``, so a semidefinite or barely
    definite verdict can be judged by the caller.

    With ``equilibrate=True`` the matrix is first replaced by the congruent
    ``D H D``, ``D = diag(|H_ii|^(-1/2))``; inertia is unchanged, but badly
    graded matrices (moment matrices, for instance) are classified reliably.

    Raises
    ------
    NotHermitian
        If ``||H - H^*|| > herm_tol * ||H||``.
    """
    H = np.asarray(H, dtype=complex)
    if H.size == 0:
        return DefinitenessResult(Definiteness.EMPTY, np.zeros(0), np.inf, 0.0, 0.0)
    asym = asymmetry(H)
    if asym > herm_tol:
        raise NotHermitian(f"relative asymmetry {asym:.3e} exceeds {herm_tol:.1e}")
    Hh = hermitian_part(H)
    if equilibrate:
        d = np.abs(np.diag(Hh)).real
        d = np.where(d > 0, 1.0 / np.sqrt(np.where(d > 0, d, 1.0)), 1.0)
        Hh = d[:, None] * Hh * d[None, :]
    eig = np.linalg.eigvalsh(Hh)
    thr = tol * max(1.0, float(np.max(np.abs(eig))))
    pos = eig > thr
    neg = eig < -thr
    if pos.all():
        cls = Definiteness.POS_DEF
    elif neg.all():
        cls = Definiteness.NEG_DEF
    elif pos.any() and neg.any():
        cls = Definiteness.INDEFINITE
    elif pos.any():
        cls = Definiteness.POS_SEMIDEF
    elif neg.any():
        cls = Definiteness.NEG_SEMIDEF
    else:
        cls = Definiteness.ZERO
    return DefinitenessResult(cls, eig, float(np.min(np.abs(eig))), thr, asym)


@dataclass(frozen=True)
class BlockHankel:
    """``H_{j,k}(R)`` together with its definiteness classification."""

    j: int
    k: int
    data: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    cls: Definiteness
    margin: float
    zero_filled: bool = False

    @property
    def size(self):
        return self.data.shape[0]


def split_proper(R: RationalMatrixFraction):
    """Polynomial part and strictly proper remainder: ``Q = R_p P + Qtilde``."""
    return right_divide(R.Q, R.P, R.tol)


def markov_parameters(R: RationalMatrixFraction, N=None):
    """Markov parameters ``s_{-(k+1)}..s_{-1}`` and ``s_0..s_N``.

    With ``P = sum_k A_k z^(m-k)`` (``A_0 = I``) and the remainder
    ``Qtilde = sum_j B_{j+1} z^(m-1-j)``, matching coefficients in
    ``Qtilde = (sum_i s_i z^(-i-1)) P`` gives the recurrence

        s_j = B_{j+1} - sum_{i=0}^{j-1} s_i A_{j-i},     B_{j+1} = 0 for j >= m.

    ``N`` defaults to ``2 deg P + 2``.
    """
    m, p = R.m, R.p
    if N is None:
        N = 2 * m + 2
    if N < 0:
        raise ValueError("N must be non-negative")
    Rp, Qt = split_proper(R)
    poly_part = Rp.ascending().copy() if not Rp.is_zero() else np.zeros((0, p, p), dtype=complex)

    A = R.P.coeffs
    B = np.zeros((max(m, N + 1), p, p), dtype=complex)
    # B[j] holds B_{j+1}, the coefficient of z^(m-1-j) in Qtilde
    for j in range(m):
        B[j] = Qt.coefficient(m - 1 - j)
    s = np.zeros((N + 1, p, p), dtype=complex)
    for j in range(N + 1):
        acc = B[j].copy() if j < m else np.zeros((p, p), dtype=complex)
        for i in range(max(0, j - m), j):
            acc -= s[i] @ A[j - i]
        s[j] = acc
    return MarkovSequence(poly_part, s, p)


def block_hankel(S: MarkovSequence, j, k, tol=DEFAULT.definiteness, herm_tol=DEFAULT.hermitian,
                 equilibrate=True):
    """Assemble and classify ``H_{j,k} = [s_{j+a+b}]_{a,b=0}^{k}``.

    ``k = -1`` yields the empty matrix, which is what a vacuous condition
    such as ``H_{m-1}`` with ``m = 0`` amounts to.  For ``j < 0`` and
    ``k > 0`` entries reaching past the polynomial part are zero and the
    result is flagged.

    The classification uses the diagonally scaled congruent matrix by
    default (see :func:`definiteness`): block Hankel matrices of Markov
    parameters are graded by powers of the poles, and an unscaled eigenvalue
    threshold would hide small eigenvalues of either sign.
    """
    if j < -2:
        raise ValueError("j must be >= -2")
    if k < -1:
        raise ValueError("k must be >= -1")
    p = S.p
    if j + 2 * k > S.N:
        raise InsufficientCoefficients(
            f"H_{{{j},{k}}} needs s up to s_{j + 2 * k}, only s_0..s_{S.N} available")
    size = (k + 1) * p
    data = np.zeros((size, size), dtype=complex)
    zero_filled = False
    for a in range(k + 1):
        for b in range(k + 1):
            idx = j + a + b
            if idx < 0 and -idx - 1 >= len(S.poly_part):
                zero_filled = zero_filled or k > 0
            data[a * p:(a + 1) * p, b * p:(b + 1) * p] = S.s(idx)
    if zero_filled:
        warnings.warn(f"H_{{{j},{k}}}: entries beyond the polynomial part set to zero",
                      stacklevel=2)
    res = definiteness(data, tol, herm_tol, equilibrate)
    return BlockHankel(j, k, data, res.eigenvalues, res.cls, res.margin, zero_filled)


def _coefficient_residual(R: RationalMatrixFraction):
    lhs = R.P.vee @ R.Q
    rhs = R.Q.vee @ R.P
    diff = lhs - rhs
    scale = max(lhs.norm(), rhs.norm(), 1e-300)
    return 0.0 if diff.is_zero() else diff.norm() / scale


def _sampled_residual(R: RationalMatrixFraction, count=16, seed=0):
    rng = np.random.default_rng(seed)
    radius = 1.0 + R.P.norm()
    worst = 0.0
    for _ in range(count):
        z = radius * (rng.standard_normal() + 1j * rng.standard_normal())
        Rz = R(z)
        Rc = R(np.conj(z)).conj().T
        worst = max(worst, np.linalg.norm(Rz - Rc, 2) / (1.0 + np.linalg.norm(Rz, 2)))
    return worst


def is_self_adjoint_fraction(R: RationalMatrixFraction, tol: Tolerances = DEFAULT, details=False):
    """Whether ``R(z) = R(conj z)^*``.

    The authoritative test is the coefficient identity ``P^v Q = Q^v P``;
    sampling at 16 pseudo-random points is run as a sanity check and
    reported with ``details=True``.
    """
    coef = _coefficient_residual(R)
    ok = coef <= tol.self_adjoint * max(1, R.P.degree + R.Q.degree + 1)
    if not details:
        return ok
    sampled = _sampled_residual(R)
    return ok, {"coefficient_residual": coef, "sampled_residual": sampled}
