"""Hurwitz stability of monic matrix polynomials.

``F(z) = F_e(z^2) + z F_o(z^2)`` is tested through the fractions

    R_F = -F_o F_e^-1,   R_{z,F} = z F_o F_e^-1,
    Rt_F = F_e F_o^-1,   Rt_{z,F} = -F_e (z F_o)^-1,

either by negative definiteness of block Hankel matrices of their Markov
parameters or by their Herglotz-Nevanlinna property.  Every verdict can be
cross-checked against the eigenvalues of ``F`` (:func:`oracle_stability`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .bezout import _rank_at, common_zeros, hankel_definiteness, right_coprime
from .exceptions import (
    IrregularEvenPart,
    IrregularOddPart,
    MatStabError,
    NotCertifiedStable,
    NotMonic,
    WrongParity,
)
from .herglotz import HNStatus, classify_hn
from .markov import (
    Definiteness,
    RationalMatrixFraction,
    block_hankel,
    definiteness,
    markov_parameters,
    split_proper,
)
from .matpoly import (MatrixPolynomial, _term_scale, even_odd_split, is_regular, is_simple,
                      spectrum)
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "Verdict",
    "Condition",
    "StabilityReport",
    "OracleResult",
    "PartProperties",
    "Analysis",
    "build_rf",
    "build_rzf",
    "build_rf_tilde",
    "build_rzf_tilde",
    "markov_criterion_even",
    "markov_criterion_odd",
    "alt_criterion_odd",
    "alt_criterion_even",
    "hn_criterion",
    "hn_criterion_tilde",
    "combined_corollary",
    "stable_part_properties",
    "oracle_stability",
    "random_structured",
    "analyze",
    "CRITERIA",
]


class Verdict(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


PASS, FAIL, UNSURE = "pass", "fail", "unsure"


@dataclass(frozen=True)
class Condition:
    """One condition of a criterion: ``pass``, ``fail`` or ``unsure``."""

    name: str
    status: str
    margin: float = float("nan")
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "status": self.status,
                "margin": float(self.margin) if np.isfinite(self.margin) else None,
                "detail": self.detail}


@dataclass(frozen=True)
class OracleResult:
    verdict: Verdict
    max_real: float
    spectrum: object = field(repr=False)


@dataclass
class StabilityReport:
    """Outcome of one criterion.

    ``applicable`` is false when the criterion's preconditions fail; the
    verdict is then ``Inconclusive`` and ``reason`` says why.
    """

    criterion: str
    verdict: Verdict
    conditions: list = field(default_factory=list)
    applicable: bool = True
    reason: str = ""
    oracle: OracleResult | None = None
    tolerances: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def agrees_with_oracle(self):
        if self.oracle is None or self.verdict is Verdict.INCONCLUSIVE:
            return None
        return self.verdict is self.oracle.verdict


def _combine(conditions):
    states = [c.status for c in conditions]
    if all(s == PASS for s in states):
        return Verdict.STABLE
    if any(s == FAIL for s in states):
        return Verdict.UNSTABLE
    return Verdict.INCONCLUSIVE


# -- fraction builders -----------------------------------------------------

def _parts(F):
    if not F.is_monic():
        raise NotMonic("F must be monic")
    return even_odd_split(F)


def _need_regular(X, exc, label):
    if X.is_zero() or not is_regular(X):
        raise exc(f"{label} is not regular")


def build_rf(F, tol: Tolerances = DEFAULT):
    """``R_F = -F_o F_e^-1``."""
    Fe, Fo = _parts(F)
    _need_regular(Fe, IrregularEvenPart, "F_e")
    return RationalMatrixFraction(-1.0 * Fo, Fe, tol)


def build_rzf(F, tol: Tolerances = DEFAULT):
    """``R_{z,F} = z F_o F_e^-1``."""
    Fe, Fo = _parts(F)
    _need_regular(Fe, IrregularEvenPart, "F_e")
    return RationalMatrixFraction(Fo.shift(1), Fe, tol)


def build_rf_tilde(F, tol: Tolerances = DEFAULT):
    """``Rt_F = F_e F_o^-1``."""
    Fe, Fo = _parts(F)
    _need_regular(Fo, IrregularOddPart, "F_o")
    return RationalMatrixFraction(Fe, Fo, tol)


def build_rzf_tilde(F, tol: Tolerances = DEFAULT):
    """``Rt_{z,F} = -F_e (z F_o)^-1``."""
    Fe, Fo = _parts(F)
    _need_regular(Fo, IrregularOddPart, "F_o")
    return RationalMatrixFraction(-1.0 * Fe, Fo.shift(1), tol)


# -- condition helpers -------------------------------------------------------

def _hankel_negdef(name, R, k, tol):
    """``H_k(R) < 0``: pass when strictly negative, fail on a positive eigenvalue."""
    if k == R.m - 1:
        H = hankel_definiteness(R, tol)
    else:
        S = markov_parameters(R, N=max(2 * k, 0) + 2)
        H = block_hankel(S, 0, k, tol.definiteness, tol.hermitian)
    if H.cls.negative_definite:
        status = PASS
    elif H.cls.nonpositive:
        status = UNSURE
    else:
        status = FAIL
    return Condition(name, status, H.margin, f"{H.cls.value}, size {H.size}")


def _limit_negdef(name, R, tol):
    """``lim_{z -> oo} R(z) < 0`` for a proper fraction."""
    Rp, _ = split_proper(R)
    if Rp.degree >= 1:
        return Condition(name, FAIL, detail="R is not proper; the limit is infinite")
    L = Rp.coefficient(0)
    res = definiteness(L, tol.definiteness, tol.hermitian)
    if res.cls is Definiteness.NEG_DEF:
        status = PASS
    elif res.cls.nonpositive:
        status = UNSURE
    else:
        status = FAIL
    eig = ", ".join(f"{e:.6g}" for e in res.eigenvalues)
    return Condition(name, status, res.margin, f"{res.cls.value}; eigenvalues [{eig}]")


def _hn_condition(name, R, tol, grid):
    v = classify_hn(R, tol, grid)
    status = {HNStatus.CERTIFIED: PASS, HNStatus.NOT_HN: FAIL}.get(v.status, UNSURE)
    margins = [c.margin for c in v.checks if not np.isnan(c.margin) and "H_m-1" in c.name]
    failed = [c.name for c in v.checks if not c.passed]
    detail = v.status.value + (f"; failed: {', '.join(failed)}" if failed else "")
    return Condition(name, status, min(margins) if margins else float("nan"), detail), v


def _coprime_condition(name, Q, P, tol):
    ok, ev = right_coprime(Q, P, tol)
    return Condition(name, PASS if ok else FAIL, ev.gap, f"{ev.method}, rank {ev.rank}/{ev.size}")


def _negative_real_zeros(name, X, tol):
    spec = spectrum(X, tol)
    bad, unsure = [], []
    for lam, _ in spec:
        scale = max(1.0, abs(lam))
        if abs(lam.imag) > tol.real * scale or lam.real > tol.oracle * scale:
            bad.append(lam)
        elif lam.real >= -tol.oracle * scale:
            unsure.append(lam)
    status = FAIL if bad else (UNSURE if unsure else PASS)
    zeros = ", ".join(f"{lam.real:.6g}" if abs(lam.imag) < 1e-12 else f"{lam:.6g}" for lam, _ in spec)
    return Condition(name, status, detail=f"zeros [{zeros}]")


def _regular_condition(name, X):
    ok = not X.is_zero() and is_regular(X)
    return Condition(name, PASS if ok else FAIL)


def _parity(F, want):
    n = F.degree
    if n < 1:
        raise WrongParity("F must have degree >= 1")
    if (n % 2 == 0) != (want == "even"):
        raise WrongParity(f"criterion needs {want} degree, got {n}")
    return n // 2


def _not_self_adjoint(criterion, label):
    return StabilityReport(criterion, Verdict.INCONCLUSIVE, applicable=False,
                           reason=f"{label} is not self-adjoint")


def _finish(criterion, conditions, tol, **extras):
    return StabilityReport(criterion, _combine(conditions), conditions,
                           tolerances=tol.as_dict(), extras=extras)


# -- criteria --------------------------------------------------------------

def markov_criterion_even(F, tol: Tolerances = DEFAULT):
    """Even degree ``2m``: stable iff ``H_{m-1}(R_F) < 0`` and ``H_{m-1}(R_{z,F}) < 0``.

    Requires ``R_F`` self-adjoint.
    """
    name = "markov-even"
    m = _parity(F, "even")
    R, Rz = build_rf(F, tol), build_rzf(F, tol)
    if not R.is_self_adjoint():
        return _not_self_adjoint(name, "R_F")
    conds = [_hankel_negdef("H_m-1(R_F) < 0", R, m - 1, tol),
             _hankel_negdef("H_m-1(R_zF) < 0", Rz, m - 1, tol)]
    return _finish(name, conds, tol)


def markov_criterion_odd(F, tol: Tolerances = DEFAULT):
    """Odd degree ``2m+1``: stable iff ``H_{m-1}(Rt_F) < 0`` and ``H_m(Rt_{z,F}) < 0``.

    Requires ``Rt_F`` self-adjoint.
    """
    name = "markov-odd"
    m = _parity(F, "odd")
    R, Rz = build_rf_tilde(F, tol), build_rzf_tilde(F, tol)
    if not R.is_self_adjoint():
        return _not_self_adjoint(name, "Rt_F")
    conds = [_hankel_negdef("H_m-1(Rt_F) < 0", R, m - 1, tol),
             _hankel_negdef("H_m(Rt_zF) < 0", Rz, m, tol)]
    return _finish(name, conds, tol)


def alt_criterion_odd(F, tol: Tolerances = DEFAULT):
    """Odd degree ``2m+1`` with ``F_e`` regular: ``H_{m-1}(R_F)``,
    ``H_{m-1}(R_{z,F})`` and ``lim R_F`` all negative definite."""
    name = "alt-odd"
    m = _parity(F, "odd")
    R, Rz = build_rf(F, tol), build_rzf(F, tol)
    if not R.is_self_adjoint():
        return _not_self_adjoint(name, "R_F")
    conds = [_hankel_negdef("H_m-1(R_F) < 0", R, m - 1, tol),
             _hankel_negdef("H_m-1(R_zF) < 0", Rz, m - 1, tol),
             _limit_negdef("lim R_F < 0", R, tol)]
    return _finish(name, conds, tol)


def alt_criterion_even(F, tol: Tolerances = DEFAULT):
    """Even degree ``2m`` with ``F_o`` regular: ``H_{m-2}(Rt_F)``,
    ``H_{m-1}(Rt_{z,F})`` and ``lim Rt_{z,F}`` all negative definite.

    ``H_{-1}`` (``m = 1``) is empty and holds vacuously.
    """
    name = "alt-even"
    m = _parity(F, "even")
    R, Rz = build_rf_tilde(F, tol), build_rzf_tilde(F, tol)
    if not R.is_self_adjoint():
        return _not_self_adjoint(name, "Rt_F")
    conds = [_hankel_negdef("H_m-2(Rt_F) < 0", R, m - 2, tol),
             _hankel_negdef("H_m-1(Rt_zF) < 0", Rz, m - 1, tol),
             _limit_negdef("lim Rt_zF < 0", Rz, tol)]
    return _finish(name, conds, tol)


def hn_criterion(F, tol: Tolerances = DEFAULT, grid=10):
    """Stable iff ``R_F`` is HN, ``F_e, F_o`` are right coprime, the zeros of
    ``F_e`` are negative real, ``F_o`` is regular (even degree) and
    ``lim R_F < 0`` (odd degree).  ``F_e`` is then simple."""
    name = "hn"
    n = F.degree
    if n < 1:
        raise WrongParity("F must have degree >= 1")
    Fe, Fo = _parts(F)
    R = build_rf(F, tol)
    if not R.is_self_adjoint():
        return _not_self_adjoint(name, "R_F")
    hn, verdict = _hn_condition("R_F is HN", R, tol, grid)
    conds = [hn,
             _coprime_condition("F_e, F_o right coprime", Fo, Fe, tol),
             _negative_real_zeros("zeros of F_e negative real", Fe, tol)]
    if n % 2 == 0:
        conds.append(_regular_condition("F_o regular", Fo))
    else:
        conds.append(_limit_negdef("lim R_F < 0", R, tol))
    report = _finish(name, conds, tol, hn_verdict=verdict)
    if report.verdict is Verdict.STABLE:
        report.extras["F_e simple"] = is_simple(Fe, tol)[0]
    return report


def hn_criterion_tilde(F, tol: Tolerances = DEFAULT, grid=10):
    """Stable iff ``Rt_{z,F}`` is HN, ``F_e, F_o`` are right coprime, the
    zeros of ``F_o`` are negative real, ``0`` is not a zero of ``F_e`` and
    ``lim Rt_{z,F} < 0`` (even degree).  ``F_o`` is then simple."""
    name = "hn-tilde"
    n = F.degree
    if n < 1:
        raise WrongParity("F must have degree >= 1")
    Fe, Fo = _parts(F)
    R = build_rzf_tilde(F, tol)
    if not R.is_self_adjoint():
        return _not_self_adjoint(name, "Rt_zF")
    hn, verdict = _hn_condition("Rt_zF is HN", R, tol, grid)
    rank0, sv0, _ = _rank_at(Fe(0.0), _term_scale(Fe, 0.0), tol, F.p)
    conds = [hn,
             _coprime_condition("F_e, F_o right coprime", Fe, Fo, tol),
             _negative_real_zeros("zeros of F_o negative real", Fo, tol),
             Condition("0 not a zero of F_e", PASS if rank0 == F.p else FAIL,
                       float(sv0[-1]), f"rank F_e(0) = {rank0}")]
    if n % 2 == 0:
        conds.append(_limit_negdef("lim Rt_zF < 0", R, tol))
    report = _finish(name, conds, tol, hn_verdict=verdict)
    if report.verdict is Verdict.STABLE:
        report.extras["F_o simple"] = is_simple(Fo, tol)[0]
    return report


def combined_corollary(F, tol: Tolerances = DEFAULT, grid=10):
    """Both fractions of the parity-matched pair HN, ``F_e, z F_o`` right
    coprime and the other part regular."""
    name = "corollary"
    n = F.degree
    if n < 1:
        raise WrongParity("F must have degree >= 1")
    Fe, Fo = _parts(F)
    if n % 2 == 0:
        R, Rz, labels = build_rf(F, tol), build_rzf(F, tol), ("R_F", "R_zF")
        other = _regular_condition("F_o regular", Fo)
    else:
        R, Rz, labels = build_rf_tilde(F, tol), build_rzf_tilde(F, tol), ("Rt_F", "Rt_zF")
        other = _regular_condition("F_e regular", Fe)
    for X, label in zip((R, Rz), labels):
        if not X.is_self_adjoint():
            return _not_self_adjoint(name, label)
    c1, v1 = _hn_condition(f"{labels[0]} is HN", R, tol, grid)
    c2, v2 = _hn_condition(f"{labels[1]} is HN", Rz, tol, grid)
    conds = [c1, c2, _coprime_condition("F_e, zF_o right coprime", Fo.shift(1), Fe, tol), other]
    return _finish(name, conds, tol, hn_verdicts=(v1, v2))


CRITERIA = {
    "markov-even": markov_criterion_even,
    "markov-odd": markov_criterion_odd,
    "alt-odd": alt_criterion_odd,
    "alt-even": alt_criterion_even,
    "hn": hn_criterion,
    "hn-tilde": hn_criterion_tilde,
    "corollary": combined_corollary,
}


# -- oracle and part properties ---------------------------------------------

def oracle_stability(F, tol: Tolerances = DEFAULT):
    """Stable iff every zero ``lam`` of ``F`` has ``Re lam < -tol (1 + |lam|)``.

    Raises
    ------
    SingularPolynomial
        If ``F`` is not regular.
    """
    spec = spectrum(F, tol)
    ok = all(lam.real < -tol.oracle * (1.0 + abs(lam)) for lam, _ in spec)
    return OracleResult(Verdict.STABLE if ok else Verdict.UNSTABLE, spec.max_real(), spec)


@dataclass(frozen=True)
class PartProperties:
    coprime: bool
    fe_simple: bool
    fo_simple: bool
    fe_negative_real: bool
    fo_negative_real: bool
    common_zeros: tuple

    @property
    def all_hold(self):
        return (self.coprime and self.fe_simple and self.fo_simple
                and self.fe_negative_real and self.fo_negative_real)


def stable_part_properties(F, tol: Tolerances = DEFAULT, verdict=None):
    """Check that the parts of a stable ``F`` are right coprime, simple and
    have only negative real zeros.

    Shared zeros of ``F_e`` and ``F_o`` are listed but are not a failure;
    they can occur for stable matrix polynomials.

    Parameters
    ----------
    verdict : Verdict, optional
        A verdict already obtained for ``F``; :func:`analyze` runs otherwise.

    Raises
    ------
    NotCertifiedStable
    """
    if verdict is None:
        verdict = analyze(F, tol, oracle=False).verdict
    if verdict is not Verdict.STABLE:
        raise NotCertifiedStable(f"F is not certified stable (verdict {verdict.value})")
    Fe, Fo = even_odd_split(F)
    coprime, _ = right_coprime(Fo, Fe, tol) if is_regular(Fe) else right_coprime(Fe, Fo, tol)
    neg_e = _negative_real_zeros("", Fe, tol).status == PASS
    neg_o = _negative_real_zeros("", Fo, tol).status == PASS
    common = tuple(common_zeros(Fe, Fo, tol))
    return PartProperties(coprime, is_simple(Fe, tol)[0], is_simple(Fo, tol)[0],
                          neg_e, neg_o, common)


# -- generator -------------------------------------------------------------

def _random_roots(rng, n, kind):
    """Roots of a real monic degree-``n`` polynomial for the requested region."""
    roots = []
    while len(roots) < n:
        if n - len(roots) >= 2 and rng.random() < 0.5:
            re, im = -rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)
            roots += [complex(re, im), complex(re, -im)]
        else:
            roots.append(complex(-rng.uniform(0.2, 3.0)))
    roots = np.array(roots)
    if kind == "unstable":
        k = rng.integers(n)
        if abs(roots[k].imag) > 0:
            mate = np.argmin(np.abs(roots - np.conj(roots[k])) + (np.arange(n) == k) * 1e9)
            roots[[k, mate]] = -roots[[k, mate]].real + 1j * roots[[k, mate]].imag
        else:
            roots[k] = -roots[k]
    elif kind == "boundary":
        if n >= 2:
            w = rng.uniform(0.5, 2.0)
            roots[:2] = [1j * w, -1j * w]
        else:
            roots[0] = 0.0
    return roots


def random_structured(p, n, seed, kind="stable"):
    """``F = U diag(f_1, ..., f_p) U^*`` with ``U`` unitary and ``f_i`` real monic.

    The coefficients are Hermitian and commute, so ``R_F`` and the other
    fractions are self-adjoint whenever they exist.  ``kind`` selects the
    root region: ``stable`` (open left half-plane), ``unstable`` (one
    diagonal entry gets a root, or a conjugate pair, mirrored into the
    right half-plane) or ``boundary`` (a root pair on the imaginary axis).
    """
    if kind not in ("stable", "unstable", "boundary"):
        raise ValueError(f"unknown kind {kind!r}")
    if not (1 <= p <= 6 and 1 <= n <= 10):
        raise ValueError("need 1 <= p <= 6 and 1 <= n <= 10")
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    U, _ = np.linalg.qr(Z)
    bad = rng.integers(p)
    scalars = []
    for i in range(p):
        k = kind if (kind == "stable" or i == bad) else "stable"
        scalars.append(np.real(np.poly(_random_roots(rng, n, k))))
    D = MatrixPolynomial.diag(*scalars)
    c = U[None] @ D.coeffs @ U.conj().T[None]
    c = 0.5 * (c + np.conj(np.swapaxes(c, -1, -2)))
    c[0] = np.eye(p)
    return MatrixPolynomial(c)


# -- top level -------------------------------------------------------------

@dataclass
class Analysis:
    """All criteria run on one polynomial plus the eigenvalue oracle."""

    verdict: Verdict
    primary: str
    reports: dict
    oracle: OracleResult | None
    consistent: bool
    advisories: list = field(default_factory=list)


def _run(fn, F, tol, **kw):
    try:
        return fn(F, tol, **kw)
    except MatStabError as exc:
        return StabilityReport(fn.__name__, Verdict.INCONCLUSIVE, applicable=False,
                               reason=f"{type(exc).__name__}: {exc}")


_GROUPS = {
    "markov": {"even": ["markov-even"], "odd": ["markov-odd"]},
    "alt": {"even": ["alt-even"], "odd": ["alt-odd"]},
    "hn": {"even": ["hn", "hn-tilde"], "odd": ["hn", "hn-tilde"]},
}


def analyze(F, tol: Tolerances = DEFAULT, criterion="all", oracle=True, grid=10):
    """Run the parity-matched criteria and, optionally, the oracle.

    ``criterion`` is ``markov``, ``alt``, ``hn`` or ``all``.  The primary
    verdict comes from the block Hankel criterion for the degree's parity;
    when it is inconclusive the first decisive applicable criterion is used.
    ``consistent`` is false if decisive criteria disagree with each other or
    with the oracle.
    """
    if not F.is_monic():
        raise NotMonic("F must be monic")
    if F.degree < 1:
        raise WrongParity("F must have degree >= 1")
    parity = "even" if F.degree % 2 == 0 else "odd"
    if criterion == "all":
        names = [f"markov-{parity}", f"alt-{parity}", "hn", "hn-tilde", "corollary"]
    elif criterion in _GROUPS:
        names = _GROUPS[criterion][parity]
    else:
        raise ValueError(f"unknown criterion {criterion!r}")

    reports = {}
    for name in names:
        fn = CRITERIA[name]
        kw = {"grid": grid} if name in ("hn", "hn-tilde", "corollary") else {}
        rep = _run(fn, F, tol, **kw)
        rep.criterion = name
        reports[name] = rep

    orc = oracle_stability(F, tol) if oracle else None
    decisive = [r for r in reports.values() if r.applicable and r.verdict is not Verdict.INCONCLUSIVE]
    primary = names[0]
    verdict = reports[primary].verdict
    if verdict is Verdict.INCONCLUSIVE and decisive:
        primary = decisive[0].criterion
        verdict = decisive[0].verdict
    consistent = len({r.verdict for r in decisive}) <= 1
    if orc is not None:
        for r in reports.values():
            r.oracle = orc
        consistent = consistent and all(r.verdict is orc.verdict for r in decisive)

    advisories = []
    testable = {n: r.applicable for n, r in reports.items()}
    if "hn" in testable and "hn-tilde" in testable and testable["hn"] != testable["hn-tilde"]:
        only = "hn" if testable["hn"] else "hn-tilde"
        if (parity == "odd") == (only == "hn-tilde"):
            advisories.append(
                "only one of the two HN criteria applies; such F cannot be Hurwitz stable")
    return Analysis(verdict, primary, reports, orc, consistent, advisories)
