"""Exception hierarchy shared by all modules."""


class CellPeriodicError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(CellPeriodicError, ValueError):
    """Invalid numerical configuration (grid size, tolerances, ...)."""


class DomainError(CellPeriodicError, ValueError):
    """An argument lies outside the domain where the model is defined."""


class PeriodicityViolation(CellPeriodicError, ValueError):
    """A function that must have zero mean over one period does not."""


class NearSingular(CellPeriodicError, ArithmeticError):
    """The decay rate is too small to resolve the periodic solution."""


class EnvelopeError(CellPeriodicError, ValueError):
    """Sub- and supersolution pairs are not strictly ordered."""


class ConstructionError(CellPeriodicError, RuntimeError):
    """A sub- or supersolution construction could not be completed."""


class MonotonicityBreach(CellPeriodicError, RuntimeError):
    """An iterate left the monotone chain by more than roundoff."""

    def __init__(self, message, iteration=None, violation=None):
        super().__init__(message)
        self.iteration = iteration
        self.violation = violation


class NonConvergence(CellPeriodicError, RuntimeError):
    """``max_iter`` was reached; ``report`` holds the partial result."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConditionViolated(CellPeriodicError, ValueError):
    """beta * mean(gamma) - sigma * mean(alpha) <= 0: no positive periodic solution."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class SingularityApproached(CellPeriodicError, RuntimeError):
    """The volume component fell to the floor during time stepping."""

    def __init__(self, message, time=None, state=None):
        super().__init__(message)
        self.time = time
        self.state = state
