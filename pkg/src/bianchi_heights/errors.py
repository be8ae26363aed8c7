from __future__ import annotations

from .ring import ArithmeticOverflowError

__all__ = ["ArithmeticOverflowError", "CostGuardError", "SpecError", "UnsaturatedBallError"]


class SpecError(ValueError):
    """Malformed or invalid group-spec input."""


class CostGuardError(RuntimeError):
    """A requested computation exceeds the configured desk-scale budget."""


class UnsaturatedBallError(RuntimeError):
    """A ball that must be complete hit its word-length cap while still growing."""
