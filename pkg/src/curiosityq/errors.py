"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function or constructor."""


class ImpossibleObservationError(DomainError):
    """An observation has zero predictive probability under the current model."""


class SupportMismatchError(DomainError):
    """A KL divergence was requested where the reference assigns zero mass."""


class ResourceError(RuntimeError):
    """A computation would exceed its configured node or retry budget."""


class ConvergenceError(RuntimeError):
    """An iterative solver did not reach its tolerance within the iteration cap."""
