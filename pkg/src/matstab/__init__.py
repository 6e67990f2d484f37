"""Hurwitz stability of matrix polynomials through block Hankel matrices,
Bezoutians and Herglotz-Nevanlinna fractions.

The main entry point is :func:`analyze`, which splits a monic matrix
polynomial into its even and odd parts, runs the parity-matched criteria and
cross-checks them against an eigenvalue oracle::

    >>> from matstab import MatrixPolynomial, analyze
    >>> F = MatrixPolynomial.scalar([1.0, 3.0, 2.0])      # z^2 + 3z + 2
    >>> analyze(F).verdict.value
    'Stable'
"""

from .bezout import (Bezoutian, CoprimeEvidence, bezoutian, common_zeros, hankel_congruence,
                     hankel_definiteness, right_coprime)
from .exceptions import MatStabError
from .herglotz import (HNStatus, HNVerdict, PartialFraction, classify_hn, hn_necessary,
                       hn_sufficient, partial_fraction, whw_identity_check)
from .markov import (BlockHankel, Definiteness, RationalMatrixFraction, block_hankel,
                     definiteness, is_self_adjoint_fraction, markov_parameters)
from .matpoly import (MatrixPolynomial, ScalarPolynomial, adjugate_poly, determinant_poly,
                      even_odd_split, is_regular, is_simple, spectrum)
from .stability import (CRITERIA, Analysis, StabilityReport, Verdict, analyze,
                        oracle_stability, random_structured, stable_part_properties)
from .tolerances import DEFAULT, Tolerances, default_tolerances

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "Bezoutian",
    "BlockHankel",
    "CRITERIA",
    "CoprimeEvidence",
    "DEFAULT",
    "Definiteness",
    "HNStatus",
    "HNVerdict",
    "MatStabError",
    "MatrixPolynomial",
    "PartialFraction",
    "RationalMatrixFraction",
    "ScalarPolynomial",
    "StabilityReport",
    "Tolerances",
    "Verdict",
    "adjugate_poly",
    "analyze",
    "bezoutian",
    "block_hankel",
    "classify_hn",
    "common_zeros",
    "default_tolerances",
    "definiteness",
    "determinant_poly",
    "even_odd_split",
    "hankel_congruence",
    "hankel_definiteness",
    "hn_necessary",
    "hn_sufficient",
    "is_regular",
    "is_self_adjoint_fraction",
    "is_simple",
    "markov_parameters",
    "oracle_stability",
    "partial_fraction",
    "random_structured",
    "right_coprime",
    "spectrum",
    "stable_part_properties",
    "whw_identity_check",
]
