"""Exception types raised across the package.

Every domain error derives from :class:`PathspexError` so the CLI can map
them to exit code 1 and print the class name.
"""


class PathspexError(Exception):
    """Base class for domain errors."""


class InvalidInput(PathspexError, ValueError):
    """A constructor or operation received parameters outside its domain."""


class NonConvergence(PathspexError):
    """Power iteration hit ``max_iter`` with the residual above tolerance."""

    def __init__(self, iterations, residual, tol):
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(residual {residual:.3e} > tol {tol:.1e})"
        )
        self.iterations = iterations
        self.residual = residual
        self.tol = tol


class TooLarge(PathspexError):
    """The host graph exceeds the exact-search budget."""


class MissingPart(PathspexError):
    """A path transformation referenced a part absent from the partition."""


class InvalidEdit(PathspexError):
    """An edit script deletes a non-edge, adds an existing edge, or a loop."""


class UnsupportedCase(PathspexError):
    """The theorem does not cover the requested (t, l) combination."""


class UnsupportedVariant(PathspexError):
    """No structured freeness predicate exists for this combination."""


class BudgetExceeded(PathspexError):
    """An exhaustive search was asked to go beyond its stated budget."""
