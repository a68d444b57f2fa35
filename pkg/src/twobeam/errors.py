"""Exception types shared across the package."""

from __future__ import annotations


class TwobeamError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(TwobeamError, ValueError):
    """Vector or matrix dimensions do not agree."""


class DomainError(TwobeamError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ReciprocityError(TwobeamError, ValueError):
    """A reciprocal-only operation received non-reciprocal channels."""


class SolverError(TwobeamError, RuntimeError):
    """A numerical solver failed to produce a usable result."""


class ScenarioError(TwobeamError, ValueError):
    """A scenario document failed validation.

    Carries the offending field name so the CLI can report it.
    """

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"scenario field '{field}': {message}")
