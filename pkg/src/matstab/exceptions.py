"""Exception hierarchy shared by all modules."""


class MatStabError(Exception):
    """Base class for all errors raised by :mod:`matstab`."""


class SingularPolynomial(MatStabError):
    """The matrix polynomial is not regular (``det F(z)`` vanishes identically)."""


class NonInvertibleLeading(MatStabError):
    """A division denominator has a singular leading coefficient."""


class InsufficientCoefficients(MatStabError):
    """A block Hankel matrix needs Markov parameters that were not computed."""


class NotHermitian(MatStabError):
    pass


class NotSelfAdjoint(MatStabError):
    """The rational matrix function does not satisfy ``R(z) = R(conj z)^*``."""


class DiagonalNotZero(MatStabError):
    """The Bezoutian numerator does not vanish on the diagonal ``z = u``."""


class ComplexSpectrum(MatStabError):
    pass


class NotSimple(MatStabError):
    pass


class WrongParity(MatStabError):
    pass


class IrregularEvenPart(SingularPolynomial):
    pass


class IrregularOddPart(SingularPolynomial):
    pass


class NotCertifiedStable(MatStabError):
    pass


class NotMonic(MatStabError):
    """The stability criteria need a monic matrix polynomial."""
