"""Exception types.

Every error carries a short machine-readable ``code`` (``"kernel-pole"``,
``"off-contour"``, ...) and, where it makes sense, the offending locations.
"""

from __future__ import annotations


class SoliboundError(Exception):
    code = "error"

    def __init__(self, message: str = "", *, code: str | None = None, locations=None):
        if code is not None:
            self.code = code
        self.locations = [] if locations is None else list(locations)
        super().__init__(f"{self.code}: {message}" if message else self.code)


class ParameterError(SoliboundError, ValueError):
    """A parameter record violates one of its invariants."""

    code = "invalid-parameters"


class DomainError(SoliboundError, ValueError):
    """Evaluation requested outside the domain of a formula."""

    code = "out-of-domain"


class PoleError(SoliboundError, ArithmeticError):
    """A closed-form expression hit a (numerical) pole."""

    code = "pole"


class ConvergenceError(SoliboundError, ArithmeticError):
    code = "tail-not-converged"


class NonFiniteError(SoliboundError, ArithmeticError):
    code = "non-finite-sample"
