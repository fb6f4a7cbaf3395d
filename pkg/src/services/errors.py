"""
Errors Module
This module defines the exception hierarchy shared by every service.
"""

from typing import Any


class CartoError(Exception):
    """Base class of all domain errors."""


class SeriesError(CartoError):
    pass


class MapError(CartoError):
    pass


class LabelError(CartoError):
    pass


class MobileError(CartoError):
    pass


class BijectionError(CartoError):
    pass


class CapacityError(CartoError, ValueError):
    """A request exceeds a configured resource cap."""


class VerificationError(CartoError):
    """
    An invariant failed on a concrete instance.

    Attributes:
        check (str): Name of the failed check.
        witness (dict): JSON-ready description of the failing instance.
    """

    def __init__(self, check: str, witness: dict[str, Any] | None = None):
        super().__init__(f"verification failed: {check}")
        self.check = check
        self.witness = witness or {}
