"""Exception types shared across the package."""


class UsageError(ValueError):
    """Invalid arguments: wrong arity, shape mismatch, out-of-range parameter."""


class NumericalFailure(ArithmeticError):
    """A numerical routine did not converge or produced an out-of-range value."""


class InvalidGram(NumericalFailure):
    """A matrix passed as a Gram matrix has a clearly negative pivot."""


class DegenerateInput(UsageError):
    """Input is valid in shape but degenerate for the requested quantity."""


class DisconnectedHypergraph(UsageError):
    pass


class CapacityError(UsageError):
    """Request exceeds a documented exhaustive-search guard."""


class ConstructionBug(AssertionError):
    """An internally built object failed its own exhaustive verification."""
