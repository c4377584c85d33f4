"""Exception types shared across the package."""


class DataValidationError(ValueError):
    """Input data violates a structural invariant (ordering, positivity, ...)."""


class WarmupUndefined(ValueError):
    """An indicator was queried at a date inside its warm-up prefix."""


class UnknownTermError(KeyError):
    """A term was looked up that is not in the vocabulary."""


class DegenerateDenominatorError(ValueError):
    """A relative error metric has a zero denominator (constant target)."""
