from typing import Optional


class OzfError(Exception):
    message = "Analysis failed"
    exit_code = 1

    def __init__(self, message: Optional[str] = None):
        if message is not None:
            self.message = message
        super().__init__(self.message)


class ConfigError(OzfError):
    message = "Invalid configuration"
    exit_code = 2


class DomainError(OzfError):
    message = "Value outside the operation's domain"


class InconclusiveWinding(OzfError):
    message = "Denominator too close to zero on the unit circle"


class UnstablePlant(OzfError):
    message = "Plant is not stable"
    exit_code = 2


class NotHyperdominant(OzfError):
    message = "Matrix is not doubly hyperdominant"
    exit_code = 2


class NotZeroExcess(OzfError):
    message = "Matrix does not have zero excess"
    exit_code = 2


class NotDoublyStochastic(OzfError):
    message = "Matrix is not doubly stochastic"
    exit_code = 2


class DecompositionStalled(OzfError):
    message = "No permutation fits the residual support"


class DimensionMismatch(OzfError):
    message = "Dimensions do not match"
    exit_code = 2


class InvalidOperator(OzfError):
    message = "Invalid periodic banded operator"
    exit_code = 2


class InvalidPermutation(OzfError):
    message = "Displacement vector does not define a bijection"
    exit_code = 2


class BandInfeasible(OzfError):
    message = "Entry has no in-band position"


class BudgetExceeded(OzfError):
    message = "Enumeration exceeds the configured cap"


class NotSimilarlyOrdered(OzfError):
    message = "Sequence pair is not similarly ordered"
    exit_code = 2


class NotMonotone(OzfError):
    message = "Nonlinearity is not monotone through the origin"
    exit_code = 2


class NotSector(OzfError):
    message = "Nonlinearity violates the sector condition"
    exit_code = 2


class GridTooCoarse(OzfError):
    message = "Frequency grid is too coarse for the multiplier bandwidth"
    exit_code = 2


class LPNumericalFailure(OzfError):
    message = "Simplex did not terminate"


class HorizonNotMultipleOfPeriod(OzfError):
    message = "Horizon must be a multiple of the period"
    exit_code = 2


class SlaterViolated(OzfError):
    message = "No witness makes every constraint form positive"


class WellPosednessUnverifiable(OzfError):
    message = "Loop well-posedness cannot be verified (g0 * C >= 1)"
    exit_code = 2


class BisectionFailure(OzfError):
    message = "Bisection did not bracket a root"
