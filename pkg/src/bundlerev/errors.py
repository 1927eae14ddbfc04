"""Exception types shared across the package."""


class BundleRevError(Exception):
    """Base class for all package errors."""


class DomainError(BundleRevError, ValueError):
    """An argument lies outside the domain of the function."""


class CapacityError(BundleRevError):
    """A convolution would exceed the configured support cap."""

    def __init__(self, needed, cap):
        self.needed = needed
        self.cap = cap
        super().__init__(
            f"convolution needs {needed} support points, exceeding cap={cap}"
        )


class DegenerateDistributionError(BundleRevError, ValueError):
    """All probability mass sits at zero, so no positive price sells."""


class BracketingError(BundleRevError, RuntimeError):
    """A root bracket shows no sign change. Indicates a bug, not bad input."""


class StructureError(BundleRevError, RuntimeError):
    """A ratio curve has more than one extremum on a segment, or a minimum inside it."""
