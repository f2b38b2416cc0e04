"""Exception hierarchy shared by every module of the package."""


class PentablockError(Exception):
    """Base class for all errors raised by :mod:`pentablock`."""


class InvalidInput(PentablockError, ValueError):
    """Non-finite entries, non-Hermitian input where Hermitian is required, etc."""


class ShapeError(PentablockError, ValueError):
    """Matrix has the wrong shape for the requested operation."""


class NotPSD(PentablockError, ValueError):
    """A Hermitian matrix has an eigenvalue below the allowed negative slack."""


class NotSimultaneouslyDiagonalizable(PentablockError, ValueError):
    """Family is not commuting, or some member is not normal."""


class PoleProximity(PentablockError, ArithmeticError):
    """Evaluation point is too close to a zero of ``1 - s z + p z**2``."""


class OutsideGamma(PentablockError, ValueError):
    """The pair (s, p) does not lie in the closed symmetrized bidisc."""


class NotOnBoundary(PentablockError, ValueError):
    """Point is not on the distinguished boundary of the pentablock."""


class NotCommuting(PentablockError, ValueError):
    """Operators of a tuple fail the commutativity precondition."""


class NotNormal(PentablockError, ValueError):
    """A normal operator was required."""


class NotContraction(PentablockError, ValueError):
    pass


class NotNumericalContraction(PentablockError, ValueError):
    pass


class InvalidModelData(PentablockError, ValueError):
    pass


class NotTruncatedIsometry(PentablockError, ValueError):
    pass


class DecompositionInconsistent(PentablockError, ArithmeticError):
    pass


class Unsupported(PentablockError, NotImplementedError):
    pass


class GridTooCoarse(PentablockError, ValueError):
    """Circle grid is too small to resolve the degrees in play without aliasing."""


class NotAnalytic(PentablockError, ValueError):
    pass


class InvalidFactor(PentablockError, ValueError):
    pass


class NotInvariant(PentablockError, ValueError):
    """Subspace ``Theta H^2`` is not invariant under the given multipliers."""
