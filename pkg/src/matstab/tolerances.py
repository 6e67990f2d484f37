"""Numerical tolerances used across the package.

Every decision that the exact theory takes for granted (is this matrix
singular? are these two roots the same?) is made against one of the
thresholds below.  A single :class:`Tolerances` instance is threaded
through the public functions so that a report can echo exactly what was
used.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace

ENV_TOL_DEF = "MATSTAB_TOL_DEF"


@dataclass(frozen=True)
class Tolerances:
    """Thresholds for the numerical decisions.

    Parameters
    ----------
    definiteness : float
        Hermitian eigenvalues with ``|e| <= definiteness * max(1, ||H||)``
        are treated as zero when classifying definiteness.
    rank : float
        Singular values below ``rank * sigma_max * p`` count as zero.
    trim : float
        Leading coefficient blocks with norm below ``trim`` times the largest
        block norm are dropped when determining degrees.
    cluster : float
        Base clustering radius (relative, floored at the same absolute value)
        for grouping computed roots into one multiple root.
    cluster_eta : float
        Assumed backward error of the eigensolver.  A group of ``k`` computed
        roots may be merged when its diameter is at most
        ``max(1, |c|) * cluster_eta**(1/k)``, which is how far a ``k``-fold
        defective root splits under such a perturbation.
    hermitian : float
        Relative asymmetry allowed before a matrix is rejected as non-Hermitian.
    self_adjoint : float
        Relative residual allowed in ``P^v Q = Q^v P``.
    real : float
        Relative imaginary part below which a root is considered real.
    oracle : float
        A root counts as stable when ``Re(lam) < -oracle * (1 + |lam|)``.
    """

    definiteness: float = 1e-9
    rank: float = 1e-8
    trim: float = 1e-12
    cluster: float = 1e-7
    cluster_eta: float = 1e-12
    hermitian: float = 1e-8
    self_adjoint: float = 1e-9
    real: float = 1e-7
    oracle: float = 1e-9

    def with_(self, **changes) -> "Tolerances":
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


def default_tolerances() -> Tolerances:
    """Defaults, honouring the ``MATSTAB_TOL_DEF`` environment override."""
    raw = os.environ.get(ENV_TOL_DEF)
    if raw:
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"{ENV_TOL_DEF}={raw!r} is not a number") from None
        if not value > 0:
            raise ValueError(f"{ENV_TOL_DEF} must be positive")
        return Tolerances(definiteness=value)
    return Tolerances()


DEFAULT = Tolerances()
