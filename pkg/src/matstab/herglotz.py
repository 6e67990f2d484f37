"""Herglotz-Nevanlinna classification of self-adjoint rational matrix fractions.

A self-adjoint ``R = Q P^-1`` is Herglotz-Nevanlinna (HN) when
``Im R(z) >= 0`` on the upper half-plane.  Block Hankel tests give a
sufficient condition (strict) and a necessary one (non-strict); between them
lies a gap that :func:`classify_hn` reports as ``Inconclusive``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ._numerics import asymmetry, hermitian_part
from .bezout import hankel_definiteness, right_coprime
from .exceptions import ComplexSpectrum, MatStabError, NotSelfAdjoint, NotSimple
from .markov import (
    Definiteness,
    RationalMatrixFraction,
    block_hankel,
    definiteness,
    markov_parameters,
    split_proper,
)
from .matpoly import is_regular, is_simple, local_radius, local_taylor, spectrum
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "HNStatus",
    "Check",
    "HNVerdict",
    "Pole",
    "PartialFraction",
    "WHWResult",
    "hn_necessary",
    "hn_sufficient",
    "classify_hn",
    "partial_fraction",
    "reconstruct_residual",
    "default_grid",
    "sample_imag_positivity",
    "whw_identity_check",
]


class HNStatus(enum.Enum):
    CERTIFIED = "HN_certified"
    NOT_HN = "NotHN_certified"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Check:
    """One named condition with its outcome.

    ``margin`` is the smallest ``|eigenvalue|`` for definiteness checks and
    ``nan`` where no margin applies.
    """

    name: str
    passed: bool
    margin: float = float("nan")
    detail: str = ""


@dataclass(frozen=True)
class HNVerdict:
    status: HNStatus
    checks: tuple = ()
    consequences: tuple = ()
    advisory: dict = field(default_factory=dict)

    @property
    def certified(self):
        return self.status is HNStatus.CERTIFIED

    @property
    def consequences_hold(self):
        return all(c.passed for c in self.consequences)

    def check(self, name):
        for c in self.checks + self.consequences:
            if c.name == name:
                return c
        raise KeyError(name)


def _require_self_adjoint(R):
    if not R.is_self_adjoint():
        raise NotSelfAdjoint("R(z) = R(conj z)^* fails on the coefficient test")


def _hankels(R, tol):
    m = R.m
    S = markov_parameters(R, N=max(2 * m, 0))
    h_slope = block_hankel(S, -2, 0, tol.definiteness, tol.hermitian)
    h_main = hankel_definiteness(R, tol)
    return S, h_slope, h_main


def _cls_detail(H):
    return f"{H.cls.value}, size {H.size}"


def hn_necessary(R: RationalMatrixFraction, tol: Tolerances = DEFAULT):
    """Conditions every HN fraction satisfies; a failure refutes HN.

    ``H_{-2,0} >= 0``, ``H_{deg P - 1} <= 0`` and ``|deg Q - deg P| <= 1``;
    when ``Q, P`` are right coprime and ``Q`` is regular, additionally
    ``H_{deg P - 1} < 0``.

    Raises
    ------
    NotSelfAdjoint
    """
    _require_self_adjoint(R)
    _, h_slope, h_main = _hankels(R, tol)
    gap = R.Q.degree - R.m if not R.Q.is_zero() else None
    checks = [
        Check("H_-2,0 >= 0", h_slope.cls.nonnegative, h_slope.margin, _cls_detail(h_slope)),
        Check("H_m-1 <= 0", h_main.cls.nonpositive, h_main.margin, _cls_detail(h_main)),
        Check("|deg Q - deg P| <= 1", gap is None or abs(gap) <= 1,
              detail=f"deg Q - deg P = {gap}" if gap is not None else "Q = 0"),
    ]
    if not R.Q.is_zero() and is_regular(R.Q):
        try:
            coprime, ev = right_coprime(R.Q, R.P, tol)
        except MatStabError:
            coprime = False
        if coprime:
            checks.append(Check("H_m-1 < 0 (coprime, Q regular)", h_main.cls.negative_definite,
                                h_main.margin, _cls_detail(h_main)))
    return checks


def _consequences(R, tol):
    out = []
    gap = R.Q.degree - R.m if not R.Q.is_zero() else 0
    out.append(Check("|deg Q - deg P| <= 1", abs(gap) <= 1, detail=f"deg Q - deg P = {gap}"))
    try:
        simple, evidence = is_simple(R.P, tol)
        out.append(Check("P simple", simple, detail=", ".join(
            f"{e.value:.6g}: mult {e.multiplicity} nullity {e.nullity}" for e in evidence)))
        spec = spectrum(R.P, tol)
        worst = max((abs(lam.imag) / max(1.0, abs(lam)) for lam, _ in spec), default=0.0)
        out.append(Check("sigma(P) real", worst <= tol.real, worst))
    except MatStabError as exc:
        out.append(Check("P simple", False, detail=str(exc)))
        out.append(Check("sigma(P) real", False, detail=str(exc)))
    try:
        coprime, ev = right_coprime(R.Q, R.P, tol)
        out.append(Check("Q, P right coprime", coprime, ev.gap, ev.method))
    except MatStabError as exc:
        out.append(Check("Q, P right coprime", False, detail=str(exc)))
    return tuple(out)


def hn_sufficient(R: RationalMatrixFraction, tol: Tolerances = DEFAULT):
    """Strict block Hankel test certifying the HN property.

    ``H_{-2,0} >= 0``, ``H_{deg P - 1} < 0`` and ``deg Q - deg P <= 1``
    together imply HN.  On success the implied facts (two-sided degree
    bound, ``P`` simple with real spectrum, ``Q, P`` right coprime) are
    re-verified numerically and attached as ``consequences``.

    Raises
    ------
    NotSelfAdjoint
    """
    _require_self_adjoint(R)
    _, h_slope, h_main = _hankels(R, tol)
    gap = R.Q.degree - R.m if not R.Q.is_zero() else None
    checks = (
        Check("H_-2,0 >= 0", h_slope.cls.nonnegative, h_slope.margin, _cls_detail(h_slope)),
        Check("H_m-1 < 0", h_main.cls.negative_definite, h_main.margin, _cls_detail(h_main)),
        Check("deg Q - deg P <= 1", gap is None or gap <= 1,
              detail=f"deg Q - deg P = {gap}" if gap is not None else "Q = 0"),
    )
    if all(c.passed for c in checks):
        return HNVerdict(HNStatus.CERTIFIED, checks, _consequences(R, tol))
    return HNVerdict(HNStatus.INCONCLUSIVE, checks)


def classify_hn(R: RationalMatrixFraction, tol: Tolerances = DEFAULT, grid=10):
    """Combine the sufficient and the necessary test.

    ``HN_certified`` if the strict test passes, ``NotHN_certified`` if a
    necessary condition fails, ``Inconclusive`` otherwise.  In the last case
    a sampled scan of ``Im R`` on the upper half-plane is attached as
    advice; it never changes the verdict.
    """
    verdict = hn_sufficient(R, tol)
    if verdict.certified:
        return verdict
    necessary = tuple(hn_necessary(R, tol))
    if not all(c.passed for c in necessary):
        return HNVerdict(HNStatus.NOT_HN, verdict.checks + necessary)
    min_eig, worst = sample_imag_positivity(R, grid)
    advisory = {"sampled_min_imag_eig": min_eig, "sampled_worst_point": worst}
    return HNVerdict(HNStatus.INCONCLUSIVE, verdict.checks + necessary, advisory=advisory)


# -- partial fractions ----------------------------------------------------

@dataclass(frozen=True)
class Pole:
    value: float
    mass: np.ndarray = field(repr=False)
    multiplicity: int
    asymmetry: float = 0.0
    zero_mass: bool = False


@dataclass(frozen=True)
class PartialFraction:
    """``R(z) = A z + B + sum_j E_j / (lambda_j - z)``."""

    A: np.ndarray
    B: np.ndarray
    poles: tuple

    def __call__(self, z):
        out = self.A * z + self.B
        for pole in self.poles:
            out = out + pole.mass / (pole.value - z)
        return out

    def mass_at(self, lam, atol=1e-6):
        for pole in self.poles:
            if abs(pole.value - lam) <= atol * max(1.0, abs(lam)):
                return pole.mass
        raise KeyError(lam)


def partial_fraction(R: RationalMatrixFraction, tol: Tolerances = DEFAULT):
    """Finite HN representation with masses from the adjugate of ``P``.

    For a zero ``lambda`` of ``P`` of multiplicity ``l``,

        E = -l Q(lambda) (adj P)^(l-1)(lambda) / (det P)^(l)(lambda),

    where the derivatives come from Taylor coefficients of ``adj P`` and
    ``det P`` about ``lambda``.  The masses are symmetrized and their
    original asymmetry is kept as a diagnostic.

    Raises
    ------
    NotSelfAdjoint, ComplexSpectrum, NotSimple
    """
    _require_self_adjoint(R)
    Rp, _ = split_proper(R)
    if Rp.degree > 1:
        raise ValueError("polynomial part has degree > 1; no such representation")
    A = hermitian_part(Rp.coefficient(1))
    B = hermitian_part(Rp.coefficient(0))
    spec = spectrum(R.P, tol)
    for lam, _ in spec:
        if abs(lam.imag) > tol.real * max(1.0, abs(lam)):
            raise ComplexSpectrum(f"zero {lam:.6g} of P is not real")
    simple, evidence = is_simple(R.P, tol)
    if not simple:
        bad = [e.value for e in evidence if not e.simple]
        raise NotSimple(f"P is not simple at {bad}")

    poles = []
    for lam, mult in spec:
        lam_r = complex(lam.real)
        radius = local_radius(spec, lam)
        adj_t = local_taylor(R.P, lam_r, radius, what="adj")
        det_t = local_taylor(R.P, lam_r, radius, what="det")
        # the factorials of the derivative formula cancel against l
        E = -R.Q(lam_r) @ adj_t[mult - 1] / det_t[mult]
        asym = asymmetry(E)
        E = hermitian_part(E)
        zero = np.linalg.norm(E, 2) <= tol.rank * max(1.0, np.linalg.norm(R.Q(lam_r), 2))
        poles.append(Pole(float(lam.real), E, mult, asym, bool(zero)))
    return PartialFraction(A, B, tuple(poles))


def _sample_points(R, count, seed=0):
    rng = np.random.default_rng(seed)
    rho = _rho(R)
    x = rng.uniform(-2 * rho, 2 * rho, count)
    y = rng.uniform(0.1 * rho, 2 * rho, count) * rng.choice([-1, 1], count)
    return x + 1j * y


def reconstruct_residual(R: RationalMatrixFraction, PF: PartialFraction, count=20):
    """``max ||R(z) - PF(z)|| / (1 + ||R(z)||)`` over points off the real axis."""
    worst = 0.0
    for z in _sample_points(R, count):
        Rz = R(z)
        worst = max(worst, np.linalg.norm(Rz - PF(z), 2) / (1.0 + np.linalg.norm(Rz, 2)))
    return float(worst)


# -- sampling ----------------------------------------------------------

def _rho(R):
    try:
        spec = spectrum(R.P)
        radius = max((abs(lam) for lam, _ in spec), default=0.0)
    except MatStabError:
        radius = R.P.norm()
    return 1.0 + radius


def default_grid(R: RationalMatrixFraction, n=10):
    """``n x n`` grid: real parts uniform in ``[-10 rho, 10 rho]``, imaginary
    parts log-spaced in ``[1e-2 rho, 10 rho]``, ``rho = 1 + max |zero of P|``."""
    rho = _rho(R)
    re = np.linspace(-10 * rho, 10 * rho, n)
    im = np.geomspace(1e-2 * rho, 10 * rho, n)
    return (re[:, None] + 1j * im[None, :]).ravel()


def sample_imag_positivity(R: RationalMatrixFraction, grid=10):
    """Smallest eigenvalue of ``Im R(z)`` over upper half-plane samples.

    ``grid`` is an integer (side of the default grid) or an array of points.
    Sampling can refute the HN property but never certify it.

    Returns
    -------
    min_eig : float
    worst_point : complex
    """
    pts = default_grid(R, grid) if np.isscalar(grid) else np.asarray(grid, dtype=complex).ravel()
    if np.any(pts.imag <= 0):
        raise ValueError("grid points must lie in the open upper half-plane")
    vals = R(pts)
    im = (vals - np.conj(np.swapaxes(vals, -1, -2))) / 2j
    eigs = np.linalg.eigvalsh(im)[:, 0]
    k = int(np.argmin(eigs))
    return float(eigs[k]), complex(pts[k])


# -- moment matrix identity --------------------------------------------------

@dataclass(frozen=True)
class WHWResult:
    residual: float
    moment_class: Definiteness
    moment_margin: float
    moments: np.ndarray = field(repr=False)
    positive_definite: bool = False
    pd_method: str = "cholesky"


def whw_identity_check(R: RationalMatrixFraction, tol: Tolerances = DEFAULT,
                       residual_tol=1e-8):
    """Verify ``W^* [t_{j+k}]_{j,k=0}^m W = diag(-H_{m-1}(R), I)``.

    Here ``t_j = -s_j`` for ``j < 2m``, ``t_{2m} = I + sum_{j<m} A_{m-j}^* s_{m+j}``
    with ``P = sum_k A_k z^(m-k)`` monic, and
    ``W = [[I, col(A_m, ..., A_1)], [0, I]]``.  Whether the moment matrix
    ``[t_{j+k}]`` is positive definite is reported alongside.  A Cholesky
    factorization of its diagonally scaled form decides first; if it breaks
    down, the identity itself is used: ``W`` is unit triangular, so the
    moment matrix is positive definite exactly when ``H_{m-1}(R)`` is
    negative definite, which is certified through the Bezoutian.
    """
    m, p = R.m, R.p
    A = R.P.coeffs
    S = markov_parameters(R, N=max(2 * m, 0))
    t = [-S.s(j) for j in range(2 * m)]
    last = np.eye(p, dtype=complex)
    for j in range(m):
        last = last + A[m - j].conj().T @ S.s(m + j)
    t.append(last)

    n = (m + 1) * p
    M = np.zeros((n, n), dtype=complex)
    for a in range(m + 1):
        for b in range(m + 1):
            M[a * p:(a + 1) * p, b * p:(b + 1) * p] = t[a + b]
    W = np.eye(n, dtype=complex)
    for k in range(m):
        W[k * p:(k + 1) * p, m * p:] = A[m - k]
    target = np.zeros((n, n), dtype=complex)
    if m:
        target[:m * p, :m * p] = -block_hankel(S, 0, m - 1, tol.definiteness, tol.hermitian).data
    target[m * p:, m * p:] = np.eye(p)
    lhs = W.conj().T @ M @ W
    residual = float(np.linalg.norm(lhs - target) / (1.0 + np.linalg.norm(target)))
    res = definiteness(M, tol.definiteness, max(tol.hermitian, 1e-6), equilibrate=True)
    # moment matrices are graded by powers of the poles, so an eigenvalue
    # threshold misreads them; Cholesky decides definiteness backward-stably
    d = np.sqrt(np.abs(np.diag(M)).real)
    d[d == 0] = 1.0
    try:
        np.linalg.cholesky(hermitian_part(M / d[:, None] / d[None, :]))
        return WHWResult(residual, res.cls, res.margin, M, True, "cholesky")
    except np.linalg.LinAlgError:
        pass
    pd = False
    if m and residual <= residual_tol and R.is_self_adjoint():
        pd = hankel_definiteness(R, tol).cls is Definiteness.NEG_DEF
    return WHWResult(residual, res.cls, res.margin, M, pd, "congruence")
