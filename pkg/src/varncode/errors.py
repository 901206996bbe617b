"""Exception types shared across the package."""


class VarncodeError(Exception):
    """Base class for all package errors."""


class CostSpecError(VarncodeError):
    """Malformed cost specification (empty, nonpositive cost, bad DSL string)."""


class ProbInputError(VarncodeError):
    """Malformed probability input (negative entry, all zero, bad sum)."""


class NoRootError(VarncodeError):
    """The characteristic sum stays below 1 over its whole convergence region."""


class DivergentSpecError(VarncodeError):
    """The characteristic sum diverges everywhere it was asked to be evaluated."""


class DivergentTailError(VarncodeError):
    """The cost-weighted tail sum of the alphabet diverges at the characteristic root."""


class UnboundedProfileError(VarncodeError):
    """A bound needing max multiplicity K was requested but the profile is unbounded."""


class BetaInfiniteError(VarncodeError):
    """A bound needing finite beta was requested but beta is infinite."""


class InfiniteAlphabetError(VarncodeError):
    """A finite-alphabet-only quantity was requested for an infinite alphabet."""


class BinUnderflowError(VarncodeError):
    """A split bin's floating-point width collapsed to zero with positive mass left."""


class OracleTooLargeError(VarncodeError):
    """Instance exceeds the exhaustive oracle's size limits."""


class CapTooSmallError(VarncodeError):
    """No prefix-free code exists at or below the supplied cost cap."""
