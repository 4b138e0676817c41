"""Exception types shared across the package."""

from __future__ import annotations


class RotorPerfError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(RotorPerfError, ValueError):
    """A physical parameter or coefficient violates its validity range."""


class FileFormatError(RotorPerfError, ValueError):
    """An input file does not match its documented schema."""


class UnknownKeyError(FileFormatError):
    """A vehicle description file contains a key outside the format."""

    def __init__(self, key: str):
        super().__init__(f"unknown key in vehicle file: {key!r}")
        self.key = key


class InfeasiblePowerError(RotorPerfError):
    """The demanded per-cell power exceeds what the cell can deliver.

    ``max_deliverable_w_per_ah`` is the largest feasible demand at the
    current cell state; ``time_s`` is set when the error arises inside a
    simulation.
    """

    def __init__(self, demanded_w_per_ah: float, max_deliverable_w_per_ah: float,
                 time_s: float | None = None):
        msg = (f"demanded {demanded_w_per_ah:.3f} W/Ah exceeds the "
               f"deliverable maximum {max_deliverable_w_per_ah:.3f} W/Ah")
        if time_s is not None:
            msg += f" at t = {time_s:.2f} s"
        super().__init__(msg)
        self.demanded_w_per_ah = demanded_w_per_ah
        self.max_deliverable_w_per_ah = max_deliverable_w_per_ah
        self.time_s = time_s


class CapacityUndefinedError(RotorPerfError):
    """Effective capacity requested for a discharge that never hit cutoff."""


class FitError(RotorPerfError):
    """Parameter identification could not produce a valid fit."""
