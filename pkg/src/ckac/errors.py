"""Exception types shared across the package."""


class CkacError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CkacError):
    def __init__(self, message, pos=None):
        if pos is not None:
            message = "%s (at position %d)" % (message, pos)
        super().__init__(message)
        self.pos = pos


class StructureError(CkacError):
    """Malformed order relations, or an operation applied outside its domain
    (e.g. factorizing a pomset that is not series-communication-parallel)."""


class AmbiguityError(CkacError):
    """An event takes part in more than one communication edge."""


class CommTableError(CkacError):
    """A communication result is requested for a pair the table does not define."""


class UnsupportedOperatorError(CkacError):
    """The operator has no semantics in the requested interpretation."""


class UnsupportedInputError(CkacError):
    """The input is outside the decidable fragment of this procedure."""


class UnsupportedHypothesisError(CkacError):
    """Only grounded hypotheses are handled by the bounded closure."""


class UnsupportedStructureError(CkacError):
    """The automaton is neither fork-acyclic nor (solvably) well-nested."""


class PreconditionError(CkacError):
    """An explicit precondition of the operation was violated."""


class InputFormError(CkacError):
    """The value has the wrong shape (e.g. a pomset with communication edges
    passed to automaton acceptance)."""


class CapExceededError(CkacError):
    """State-space exploration exceeded the configured cap."""

    def __init__(self, message, count):
        super().__init__("%s (reached %d states)" % (message, count))
        self.count = count
