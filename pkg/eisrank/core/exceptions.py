"""Error hierarchy shared by the services and the command line.

Every class derives from the builtin a caller would naturally catch (``ValueError`` for
bad input, ``RuntimeError`` for internal inconsistencies), so library users do not need
to import this module to handle failures.
"""
from typing import Optional


class EisrankError(Exception):
    """Base class for all eisrank failures."""


class InvalidInputError(EisrankError, ValueError):
    """A precondition on an argument does not hold."""


class InconsistentCongruenceError(InvalidInputError):
    """A system of congruences has no solution."""


class NonInvertibleError(InvalidInputError):
    """A denominator is not a unit in the residue ring."""


class RingMismatchError(InvalidInputError):
    """Two q-expansions over different coefficient rings were combined."""


class DegenerateCompositumError(InvalidInputError):
    """The compositum of a quadratic field with itself was requested."""


class NeedsConductorError(InvalidInputError):
    """A twist conductor cannot be derived and none was supplied."""


class HypothesisViolationError(InvalidInputError):
    """A residue pair (m, M) fails the density theorem hypotheses."""

    def __init__(self, clause: str, message: Optional[str] = None):
        self.clause = clause
        super().__init__(message or f"hypothesis violated: {clause}")


class ExceptionalCharacterError(EisrankError, ValueError):
    """A Bernoulli value was requested at the trivial character or at omega^-1."""


class ModelNotMinimalError(EisrankError, ValueError):
    """The smooth-point count at a multiplicative prime is neither l-1 nor l+1."""


class ReducibilityNotCertifiedError(EisrankError, ValueError):
    """The rank criterion was asked to run without a reducibility certificate."""


class BranchNotApplicableError(EisrankError, ValueError):
    """No branch of the root-number rank split applies."""


class DatasetError(EisrankError, ValueError):
    """A curve dataset row is malformed, duplicated or unknown."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ConsistencyError(EisrankError, RuntimeError):
    """An internal cross-check failed; the computation cannot be trusted."""
