"""Exception hierarchy shared by all bmolab modules."""


class BmolabError(Exception):
    """Base class for all package errors."""


class ParseError(BmolabError):
    """Syntax error in a function-expression string.

    Carries the 0-based character position and the set of token kinds
    that would have been accepted there.
    """

    def __init__(self, message, position, expected=()):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.expected = tuple(expected)


class EvalDomainError(BmolabError):
    """Evaluation left the mathematical domain (log of a nonpositive
    number, division by zero, ...). Never silently produces NaN."""


class PreconditionError(BmolabError):
    """An operation was called outside its stated contract."""


class ThresholdCertificationError(PreconditionError):
    """No threshold certified on the scanned region; carries the witness
    cube whose oscillation broke the required bound."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
