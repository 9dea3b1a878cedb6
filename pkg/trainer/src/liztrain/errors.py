"""Exception hierarchy for the trainer.

Everything raised on purpose derives from TrainerError so callers can
catch one type at the boundary.  The split mirrors how things fail:
bad arguments or config values, unreadable input files, and training
runs whose loss stops being a number.
"""

from __future__ import annotations


class TrainerError(Exception):
    """Base class for all trainer failures."""


class ValidationError(TrainerError):
    """An argument, config field, or weight shape violates the contract."""


class FormatError(TrainerError):
    """A frame or config file does not parse as its declared format."""


class DivergenceError(TrainerError):
    """Training produced a non-finite loss and was aborted."""
