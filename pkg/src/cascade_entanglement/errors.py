"""Exception types raised across the package."""


class SimulationError(Exception):
    """Base class for every error raised by this package."""


# parameter validation
class NonFiniteInput(SimulationError, ValueError):
    pass


class NegativeRate(SimulationError, ValueError):
    pass


class DegenerateDenominator(SimulationError, ValueError):
    pass


# closed-form engine
class LossyParams(SimulationError, ValueError):
    """The lossless closed forms were asked to handle a nonzero decay rate."""


class NonContractive(SimulationError, ValueError):
    """A disentangling factor with modulus >= 1 reached the squeeze inversion."""


# integrators
class StepTooLarge(SimulationError, RuntimeError):
    pass


class NonFiniteState(SimulationError, RuntimeError):
    pass


# Fock-space oracle
class DimensionTooSmall(SimulationError, ValueError):
    pass


class DimensionMismatch(SimulationError, ValueError):
    pass


class LeakageExceeded(SimulationError, RuntimeError):
    """Probability mass reached the top Fock layers; raise the truncation."""


class NormDrift(SimulationError, RuntimeError):
    pass


class TraceDrift(SimulationError, RuntimeError):
    pass


class NoAtomFactor(SimulationError, ValueError):
    pass


# scenario files
class ScenarioError(SimulationError, ValueError):
    pass


class UnknownKey(ScenarioError):
    pass


class MalformedValue(ScenarioError):
    pass


class ConstraintViolation(ScenarioError):
    pass
