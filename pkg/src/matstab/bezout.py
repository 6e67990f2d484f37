"""Block Bezoutians, their congruence with block Hankel matrices and
right-coprimeness tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (DiagonalNotZero, MatStabError, NonInvertibleLeading, NotSelfAdjoint,
                         SingularPolynomial)
from .markov import (Definiteness, RationalMatrixFraction, block_hankel, definiteness,
                     markov_parameters, split_proper)
from .matpoly import MatrixPolynomial, _term_scale, is_regular, spectrum
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "Bezoutian",
    "CongruenceResult",
    "CoprimeEvidence",
    "bezoutian",
    "hankel_congruence",
    "HankelInertia",
    "hankel_definiteness",
    "right_coprime",
    "common_zeros",
]


@dataclass(frozen=True)
class Bezoutian:
    """Block matrix ``D`` with ``sum_{a,b} z^a D_{a,b} u^b = N(z, u) / (z - u)``."""

    n1: int
    n2: int
    data: np.ndarray = field(repr=False)
    quadruple: tuple = field(repr=False, default=())

    @property
    def p(self):
        return self.quadruple[0].p

    def block(self, a, b):
        p = self.p
        return self.data[a * p:(a + 1) * p, b * p:(b + 1) * p]

    def __call__(self, z, u):
        """Evaluate the generating function at ``(z, u)``."""
        p = self.p
        zs = np.kron(z ** np.arange(self.n1), np.eye(p))
        us = np.kron(u ** np.arange(self.n2)[:, None], np.eye(p))
        return zs @ self.data @ us


def _padded(F, n):
    """Ascending coefficients of ``F`` padded with zero blocks to length ``n``."""
    out = np.zeros((n, F.p, F.p), dtype=complex)
    if not F.is_zero():
        out[:F.degree + 1] = F.ascending()
    return out


def bezoutian(Mt, M, L, Lt, tol: Tolerances = DEFAULT):
    """Block Bezoutian of the quadruple ``(Mt, M, L, Lt)``.

    The numerator ``N(z, u) = Mt(z) Lt(u) - M(z) L(u)`` must vanish on the
    diagonal, i.e. ``Mt Lt = M L`` as polynomials.  Writing
    ``N = sum N_{a,b} z^a u^b``, the blocks are

        D_{a,b} = sum_{t=0}^{b} N_{a+1+t, b-t},

    the unique solution of ``N_{a,b} = D_{a-1,b} - D_{a,b-1}``.

    Raises
    ------
    DiagonalNotZero
        If ``Mt Lt - M L`` is not the zero polynomial within tolerance.
    """
    p = Mt.p
    if not all(X.p == p for X in (M, L, Lt)):
        raise ValueError("all four polynomials must have the same size")
    diag = Mt @ Lt - M @ L
    scale = max((Mt @ Lt).norm(), (M @ L).norm(), 1.0)
    if not diag.is_zero() and diag.norm() > tol.self_adjoint * scale * 10:
        raise DiagonalNotZero(
            f"Mt(z)Lt(z) - M(z)L(z) has norm {diag.norm():.3e} (scale {scale:.3e})")

    n1 = max(M.degree, Mt.degree, 0)
    n2 = max(L.degree, Lt.degree, 0)
    Mt_a, M_a = _padded(Mt, n1 + 1), _padded(M, n1 + 1)
    L_a, Lt_a = _padded(L, n2 + 1), _padded(Lt, n2 + 1)
    # N[a, b] = Mt_a Lt_b - M_a L_b
    N = np.einsum("aij,bjk->abik", Mt_a, Lt_a) - np.einsum("aij,bjk->abik", M_a, L_a)

    D = np.zeros((n1, n2, p, p), dtype=complex)
    for a in range(n1):
        for b in range(n2):
            acc = np.zeros((p, p), dtype=complex)
            for t in range(b + 1):
                if a + 1 + t <= n1:
                    acc += N[a + 1 + t, b - t]
            D[a, b] = acc
    data = D.transpose(0, 2, 1, 3).reshape(n1 * p, n2 * p)
    return Bezoutian(n1, n2, data, (Mt, M, L, Lt))


def _anti_triangular(P, size):
    """Block matrix with ``(i, j)`` block ``P_{size-1-i-j}`` above the anti-diagonal.

    ``P_k`` is the coefficient of ``z^(m-k)``, so ``P_0`` is the leading one.
    """
    p = P.p
    c = P.coeffs
    T = np.zeros((size * p, size * p), dtype=complex)
    for i in range(size):
        for j in range(size - i):
            T[i * p:(i + 1) * p, j * p:(j + 1) * p] = c[size - 1 - i - j]
    return T


@dataclass(frozen=True)
class CongruenceResult:
    lhs: Bezoutian
    rhs: np.ndarray = field(repr=False)
    residual: float
    case: str
    middle: np.ndarray = field(repr=False)


def hankel_congruence(R: RationalMatrixFraction, tol: Tolerances = DEFAULT):
    """Check ``B_{P^v, Q^v}(P, Q) = T^* M T`` for a self-adjoint fraction.

    With ``R_p(z) = A z + B`` and ``m = deg P``, the middle factor is
    ``diag(-A, H_{m-1}(R))`` and ``T`` has ``m + 1`` block rows when
    ``A != 0``; otherwise it is ``H_{m-1}(R)`` with ``m`` block rows.
    ``T`` carries the coefficients of ``P`` on and above its block
    anti-diagonal, constant term in the corner.

    Returns
    -------
    CongruenceResult
        ``residual = ||lhs - rhs|| / (1 + ||rhs||)``.
    """
    if not R.is_self_adjoint():
        raise NotSelfAdjoint("congruence requires a self-adjoint fraction")
    m, p = R.m, R.p
    if m < 1:
        raise ValueError("congruence needs deg P >= 1")
    if R.Q.degree - m > 1:
        raise ValueError("congruence needs deg Q - deg P <= 1")
    Rp, _ = split_proper(R)
    A = Rp.coefficient(1)
    S = markov_parameters(R, N=2 * m)
    H = block_hankel(S, 0, m - 1, tol.definiteness, tol.hermitian).data
    lhs = bezoutian(R.P.vee, R.Q.vee, R.P, R.Q, tol)
    if np.linalg.norm(A) > tol.trim * max(1.0, R.Q.norm()):
        middle = np.zeros(((m + 1) * p, (m + 1) * p), dtype=complex)
        middle[:p, :p] = -A
        middle[p:, p:] = H
        T = _anti_triangular(R.P, m + 1)
        case = "a"
    else:
        middle = H
        T = _anti_triangular(R.P, m)
        case = "b"
    rhs = T.conj().T @ middle @ T
    residual = float(np.linalg.norm(lhs.data - rhs) / (1.0 + np.linalg.norm(rhs)))
    return CongruenceResult(lhs, rhs, residual, case, middle)


def _compose_affine(F, a, c):
    """``F(a z + c)`` by Horner's rule."""
    lin = MatrixPolynomial(np.array([a * np.eye(F.p), c * np.eye(F.p)]))
    out = MatrixPolynomial.constant(F.coeffs[0])
    for C in F.coeffs[1:]:
        out = out @ lin + MatrixPolynomial.constant(C)
    return out


def _recentred(R: RationalMatrixFraction):
    """``R(a z + c)`` with the zeros of ``det P`` centred and scaled to unit size.

    With real ``c`` and ``a > 0`` the substitution keeps self-adjointness,
    the HN property and coprimeness, and it changes the Bezoutian only by a
    congruence and a positive factor.  Poles clustered away from the origin
    otherwise make the Bezoutian strongly graded.
    """
    m, p = R.m, R.p
    if m < 1:
        return R
    c = float(-np.trace(R.P.coeffs[1]).real / (m * p))
    P1 = _compose_affine(R.P, 1.0, c)
    norms = [np.linalg.norm(P1.coeffs[k], 2) ** (1.0 / k) for k in range(1, m + 1)]
    a = max(norms)
    if not np.isfinite(a) or a <= 1e-8 * max(1.0, abs(c)):
        # every zero sits at the centre (up to round-off); shifting is enough
        a = 1.0
    scale = a ** (-m)
    P2 = _compose_affine(R.P, a, c) * scale
    Q2 = _compose_affine(R.Q, a, c) * scale if not R.Q.is_zero() else R.Q
    return RationalMatrixFraction(Q2, P2, R.tol)


def _best_bezoutian(R: RationalMatrixFraction, tol: Tolerances):
    """Equilibrated Bezoutian of ``R`` or of its recentred form, whichever
    separates its eigenvalues from zero more clearly.

    Recentring helps when the poles cluster away from the origin; when they
    spread over several decades the original variable is better graded.
    """
    best = None
    for Rc in (R, _recentred(R)):
        lhs = bezoutian(Rc.P.vee, Rc.Q.vee, Rc.P, Rc.Q, tol)
        res = definiteness(lhs.data, tol.definiteness, max(tol.hermitian, 1e-6), equilibrate=True)
        score = res.margin / res.threshold if res.threshold > 0 else np.inf
        if best is None or score > best[0]:
            best = (score, Rc, lhs, res)
    return best[1:]


@dataclass(frozen=True)
class HankelInertia:
    """Definiteness of ``H_{deg P - 1}(R)`` read off a congruent matrix.

    ``method`` is ``"bezoutian"`` when the class was decided on the
    equilibrated Bezoutian and ``"hankel"`` when the Hankel matrix itself
    was classified.  ``hankel`` holds the Hankel matrix and its own spectrum
    either way.
    """

    cls: Definiteness
    margin: float
    method: str
    hankel: object = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False, default=None)

    @property
    def size(self):
        return self.hankel.size


def _counts(eig, thr):
    return int(np.sum(eig > thr)), int(np.sum(eig < -thr)), int(np.sum(np.abs(eig) <= thr))


def _class_from_counts(pos, neg, zero, size):
    if size == 0:
        return Definiteness.EMPTY
    if pos == size:
        return Definiteness.POS_DEF
    if neg == size:
        return Definiteness.NEG_DEF
    if pos and neg:
        return Definiteness.INDEFINITE
    if pos:
        return Definiteness.POS_SEMIDEF
    if neg:
        return Definiteness.NEG_SEMIDEF
    return Definiteness.ZERO


def hankel_definiteness(R: RationalMatrixFraction, tol: Tolerances = DEFAULT):
    """Classify ``H_{m-1}(R)``, ``m = deg P``, through the Bezoutian congruence.

    The Hankel matrix of a fraction with many poles is strongly graded: its
    smallest eigenvalues shrink geometrically with the block size even after
    diagonal scaling.  The Bezoutian ``B_{P^v, Q^v}(P, Q)`` is congruent to
    ``H_{m-1}(R)`` (or to ``diag(-A, H_{m-1}(R))`` when ``R`` has a linear
    part ``A z``), is formed directly from the coefficients and is far better
    conditioned once equilibrated.  Its inertia, minus that of ``-A``, is the
    inertia of the Hankel matrix.

    Falls back to classifying the Hankel matrix directly when the congruence
    does not apply (``R`` not self-adjoint, ``m = 0`` or
    ``deg Q - deg P > 1``).
    """
    m, p = R.m, R.p
    S = markov_parameters(R, N=max(2 * m, 0) + 2)
    H = block_hankel(S, 0, m - 1, tol.definiteness, tol.hermitian)
    usable = m >= 1 and (R.Q.is_zero() or R.Q.degree - m <= 1) and R.is_self_adjoint()
    if not usable:
        return HankelInertia(H.cls, H.margin, "hankel", H, H.eigenvalues)
    try:
        Rc, lhs, res = _best_bezoutian(R, tol)
    except MatStabError:
        return HankelInertia(H.cls, H.margin, "hankel", H, H.eigenvalues)
    eig = np.sort(res.eigenvalues)
    pos, neg, zero = _counts(eig, res.threshold)
    if lhs.n1 > m:
        # case a: remove the inertia of the -A block
        Rp, _ = split_proper(Rc)
        mA = -Rp.coefficient(1)
        eA = np.linalg.eigvalsh((mA + mA.conj().T) / 2)
        a_pos, a_neg, a_zero = _counts(eA, tol.definiteness * max(1.0, float(np.max(np.abs(eA)))))
        pos, neg, zero = pos - a_pos, neg - a_neg, zero - a_zero
        # the zero eigenvalues owed to -A are the smallest in magnitude
        mags = np.sort(np.abs(eig))[a_zero:]
    else:
        mags = np.abs(eig)
    size = m * p
    if min(pos, neg, zero) < 0 or pos + neg + zero != size:
        return HankelInertia(H.cls, H.margin, "hankel", H, H.eigenvalues)
    margin = float(mags.min()) if len(mags) else np.inf
    return HankelInertia(_class_from_counts(pos, neg, zero, size), margin, "bezoutian", H, eig)


@dataclass(frozen=True)
class CoprimeEvidence:
    """How a coprimeness decision was reached."""

    method: str
    rank: int
    size: int
    gap: float
    details: dict = field(default_factory=dict)


def _rank_at(M, scale, tol: Tolerances, p):
    """Numerical rank of ``M`` with the threshold tied to ``scale``."""
    sv = np.linalg.svd(M, compute_uv=False)
    thr = tol.rank * p * max(scale, sv[0] if len(sv) else 0.0, np.finfo(float).tiny)
    return int(np.sum(sv > thr)), sv, thr


def _pbh(Q, P, tol: Tolerances):
    """``[P(lam); Q(lam)]`` has full column rank at every zero of ``P``."""
    p = P.p
    worst_rank, worst_gap = p, np.inf
    deficient = []
    for lam, _ in spectrum(P, tol):
        stacked = np.vstack([P(lam), Q(lam)])
        scale = _term_scale(P, lam) + _term_scale(Q, lam)
        rank, sv, thr = _rank_at(stacked, scale, tol, p)
        gap = sv[-1] / thr if thr > 0 else np.inf
        if rank < p:
            deficient.append(complex(lam))
        if rank < worst_rank or (rank == worst_rank and gap < worst_gap):
            worst_rank, worst_gap = rank, gap
    return worst_rank, float(worst_gap), deficient


def _hankel_route(R: RationalMatrixFraction, tol: Tolerances):
    Rc, _, cls = _best_bezoutian(R, tol)
    res = hankel_congruence(Rc, tol)
    # T is invertible (P monic), so the Bezoutian has the rank of the middle
    # factor.  It is Hermitian here, so its rank is counted with the same
    # zero rule (and on the same variable) as its inertia; a definite
    # Bezoutian is then never rank deficient
    mags = np.abs(cls.eigenvalues)
    kept = mags[mags > cls.threshold]
    rank = int(kept.size)
    gap = float(kept.min() / cls.threshold) if kept.size and cls.threshold > 0 else np.inf
    return rank, res.middle.shape[0], gap, res


def right_coprime(Q, P, tol: Tolerances = DEFAULT, cross_check=False):
    """Decide whether ``Q`` and ``P`` are right coprime.

    When ``R = Q P^-1`` is self-adjoint, ``|deg Q - deg P| <= 1`` and ``Q`` is
    regular, the decision is the full-rank test on the middle factor of the
    Bezoutian congruence.  Otherwise (or when the block Hankel route cannot be
    set up) it checks that ``[P(lam); Q(lam)]`` keeps full column rank at
    every zero ``lam`` of ``P``; a common right divisor that is not
    unimodular would lower that rank at one of its zeros.

    Parameters
    ----------
    Q, P : MatrixPolynomial
        At least one of them must be regular.
    cross_check : bool
        Run the pointwise test as well and record its verdict.

    Returns
    -------
    coprime : bool
    evidence : CoprimeEvidence
        ``gap`` is the smallest retained singular value (eigenvalue
        magnitude on the Bezoutian route) divided by the zero threshold;
        values near 1 mean a fragile decision.
    """
    details = {}
    try:
        R = RationalMatrixFraction(Q, P, tol)
    except NonInvertibleLeading:
        R = None
    use_hankel = (R is not None and R.m >= 1 and abs(R.Q.degree - R.m) <= 1
                  and is_regular(R.Q) and R.is_self_adjoint())
    if use_hankel:
        try:
            rank, size, gap, res = _hankel_route(R, tol)
        except MatStabError as exc:
            details["hankel_route_error"] = str(exc)
            use_hankel = False
        else:
            details["congruence_residual"] = res.residual
            details["case"] = res.case
            ok = rank == size
            evidence = CoprimeEvidence("bezout-hankel", rank, size, gap, details)
    if not use_hankel:
        # the pointwise test needs a regular polynomial to enumerate zeros;
        # coprimeness is symmetric, so either one will do
        if is_regular(P):
            first, second = P, Q
        elif is_regular(Q):
            first, second = Q, P
        else:
            raise SingularPolynomial("neither polynomial is regular")
        rank, gap, deficient = _pbh(second, first, tol)
        details["rank_deficient_at"] = deficient
        ok = rank == P.p
        evidence = CoprimeEvidence("pointwise-rank", rank, P.p, gap, details)
    elif cross_check:
        rank2, _, deficient = _pbh(R.Q, R.P, tol)
        details["pointwise_verdict"] = rank2 == R.p
        details["rank_deficient_at"] = deficient
    return ok, evidence


def common_zeros(F, G, tol: Tolerances = DEFAULT):
    """Zeros of ``F`` at which ``G`` is singular as well.

    Raises
    ------
    SingularPolynomial
        If ``F`` is not regular.
    """
    out = []
    for lam, _ in spectrum(F, tol):
        rank, _, _ = _rank_at(G(lam), _term_scale(G, lam), tol, G.p)
        if rank < G.p:
            out.append(complex(lam))
    return out
