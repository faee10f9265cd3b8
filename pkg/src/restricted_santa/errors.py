"""Exception types shared across the package."""


class Malformed(ValueError):
    """Input violates the instance/allocation/certificate schema.

    ``field`` names the first offending field; ``violations`` holds every
    ``(field, message)`` pair found when validation collected more than one.
    """

    def __init__(self, field: str, message: str, violations=None):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
        self.violations = list(violations) if violations else [(field, message)]


class TooLarge(RuntimeError):
    """An exhaustive routine refused to run past its size guard."""


class InvariantBreach(AssertionError):
    """Internal engine state became inconsistent. Always a bug."""
