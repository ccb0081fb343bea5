"""Exception hierarchy shared by all engines.

Exit-code mapping used by the CLI: precondition violations (bad input)
are ValueError subclasses, internal consistency failures (a cancellation
that must happen mathematically did not) are ArithmeticError subclasses.
"""


class DrxError(Exception):
    pass


class DimensionError(DrxError, ValueError):
    """The psi-degree does not match the cycle dimension 2g-3+n."""


class DegenerateLabels(DrxError, ValueError):
    """Too many zero ramification labels for the requested evaluation path."""


class NonDivisible(DrxError, ArithmeticError):
    """An exact polynomial division left a remainder.

    In the generating-function engine this means a denominator pole failed
    to cancel, i.e. the implementation or the input is wrong.
    """


class ZeroConstantTerm(DrxError, ArithmeticError):
    """Attempted to invert a series with vanishing constant term."""


class ResidualPole(DrxError, ArithmeticError):
    """A negative power of the perturbation parameter survived to the end."""


class ConventionMismatch(DrxError, ArithmeticError):
    """The default branch-point counting disagrees with the closed formulas
    while the alternate counting agrees."""


class EnergyBudgetExceeded(DrxError, ValueError):
    """A Fock-space computation needs partitions larger than the declared cap."""


class NonZeroTotalEnergy(DrxError, ValueError):
    """Operator energies do not sum to zero, so the expectation value is 0."""


class SingularSystem(DrxError, ValueError):
    """The interpolation grid does not determine the polynomial."""
