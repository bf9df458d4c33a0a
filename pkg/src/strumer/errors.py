"""Exception types shared across the package."""


class NumericalDivergenceError(RuntimeError):
    """Raised when an iterative solve produces non-finite or runaway iterates.

    Carries the diagnostics collected up to the failing iteration in
    ``diagnostics`` (may be ``None`` when the failure happens before the
    first iteration completes).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class ExtractionError(RuntimeError):
    """Raised when frequencies cannot be isolated from a recovered matrix."""
