"""Exception types shared across the package.

The CLI maps ``ValidationError`` to exit code 2 and ``NumericalFault`` to 3.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Inputs violate a documented precondition."""


class NumericalFault(RuntimeError):
    """A numerical procedure failed or produced an inconsistent result."""

    def __init__(self, module: str, message: str, residual: float | None = None):
        self.module = module
        self.residual = residual
        detail = f"[{module}] {message}"
        if residual is not None:
            detail += f" (residual={residual:.3e})"
        super().__init__(detail)
