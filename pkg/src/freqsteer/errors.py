"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
MissingInputError -> 3, NumericalError -> 4. Plain ValueError signals a
broken call contract (programming error) and is not given a reserved code.
"""


class FreqsteerError(Exception):
    pass


class ConfigError(FreqsteerError):
    """Malformed or contradictory configuration."""


class MissingInputError(FreqsteerError):
    """A required input file is absent, truncated, or unreadable."""


class NumericalError(FreqsteerError):
    """A numerical invariant failed at runtime (non-finite values,
    broken spectral symmetry, responsibility underflow, ...)."""
