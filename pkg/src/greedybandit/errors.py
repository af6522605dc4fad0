"""Exception types shared across the package."""


class GreedyBanditError(Exception):
    """Base class for all package errors."""


class InvalidActionError(GreedyBanditError, ValueError):
    """Action references unknown units, repeats a unit, or has a bad length."""


class InfeasibleError(GreedyBanditError, ValueError):
    """The requested action size cannot be satisfied (K > number of units)."""


class CapacityError(GreedyBanditError, RuntimeError):
    """An enumeration would exceed the configured subset cap."""


class DomainError(GreedyBanditError, ValueError):
    """A value fell outside the domain required by an operation, e.g. an
    outcome outside [0,1] fed to the Beta posterior update."""


class UninitializedStateError(GreedyBanditError, RuntimeError):
    """A Gaussian policy state was used before every arm had an observation."""


class MultipleSolutionsError(GreedyBanditError, RuntimeError):
    """Greedy admits several solutions under the true means (argmax ties).

    Carries the full set of greedy-reachable actions so the caller can switch
    to the minimum-reward convention.
    """

    def __init__(self, message, solutions):
        super().__init__(message)
        self.solutions = solutions
