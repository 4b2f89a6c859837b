"""Exception types shared across the package.

Argument problems raise ``ValueError`` (or a subclass); everything below
signals data or resource trouble and maps to CLI exit status 2, except
``BracketEscapeError`` which indicates a bad seed bracket (exit status 1).
"""


class UlamsigError(Exception):
    """Base class for non-argument errors raised by this package."""


class MemoryBudgetError(UlamsigError):
    """A sieve or grid would exceed the configured memory budget."""


class PointBudgetError(UlamsigError):
    """A scan grid would exceed the configured point budget."""


class ConstructionError(UlamsigError):
    """A synthetic-sequence scan exhausted its budget without finishing."""


class DataFormatError(UlamsigError):
    """An input file failed to parse or violated a format invariant."""


class BracketEscapeError(ValueError):
    """Peak refinement hit a bracket endpoint; the seed bracket is suspect."""
