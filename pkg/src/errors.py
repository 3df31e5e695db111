"""
Exception hierarchy shared by every hatsdetect package.
"""

from typing import Optional


class HatsError(Exception):
    """Root of all hatsdetect errors."""


class ConfigError(HatsError):
    """Invalid configuration value (CLI flag, config model, environment)."""


class DimensionMismatch(HatsError):
    pass


class ShapeMismatch(HatsError):
    pass


class RankDeficient(HatsError):
    """A Householder pivot column norm fell below the rank threshold."""


class Singular(HatsError):
    pass


class LevelOutOfRange(HatsError):
    pass


class NotDescendant(HatsError):
    pass


class TooLargeToEnumerate(HatsError):
    pass


class CapacityTooSmall(HatsError):
    """The memory bound cannot hold one root-to-goal path."""


class NoEvictable(HatsError):
    """ACTIVE is full and every node in it is protected."""


class EmptyBatch(HatsError):
    pass


class FormatViolation(HatsError):
    """Malformed model file; `offset` is the byte position of the violation."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class SizeMismatch(HatsError):
    pass


class MissingModel(HatsError):
    def __init__(self, message: str, num_antennas: Optional[int] = None):
        super().__init__(message)
        self.num_antennas = num_antennas


__all__ = [
    'HatsError', 'ConfigError', 'DimensionMismatch', 'ShapeMismatch', 'RankDeficient',
    'Singular', 'LevelOutOfRange', 'NotDescendant', 'TooLargeToEnumerate',
    'CapacityTooSmall', 'NoEvictable', 'EmptyBatch', 'FormatViolation', 'SizeMismatch',
    'MissingModel',
]
