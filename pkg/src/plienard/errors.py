"""Exception hierarchy shared by every plienard module."""

from __future__ import annotations


class PlienardError(Exception):
    """Base class for all errors raised by plienard."""


# -- expression language ---------------------------------------------------

class ExprError(PlienardError, ValueError):
    """Base for lexing, parsing and evaluation errors.

    ``offset`` is a byte offset into the UTF-8 encoded source, or ``None``
    when the error is not tied to a source position.
    """

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class LexError(ExprError):
    pass


class ParseError(ExprError):
    """Malformed expression: dangling operator, unbalanced paren, unknown call."""


class EvalError(ExprError):
    """Domain error during evaluation (log of non-positive, division by zero, ...)."""


class UnboundSymbol(ExprError):
    pass


# -- periodic core / operator ----------------------------------------------

class PeriodicityError(PlienardError, ValueError):
    """A sample or exponent field violates its periodic closure."""


class InconsistentChannels(PlienardError, ValueError):
    """Derivative channel does not match the value channel."""


class DomainError(PlienardError):
    """An iterate left the admissible range of a right-hand side."""

    def __init__(self, message: str, node: int | None = None):
        self.node = node
        super().__init__(message if node is None else f"{message} (node {node})")


class BracketFailure(PlienardError):
    """No sign change found while bracketing a monotone scalar equation."""


# -- continuation ----------------------------------------------------------

class NoBracket(PlienardError):
    """The averaged map has no sign change on the scan grid."""


class BoundaryZero(PlienardError):
    """The averaged map vanishes at an endpoint of the degree interval."""


class DegreeZero(PlienardError):
    """The Brouwer degree of the averaged map is zero; continuation refuses to start."""


class StepCollapse(PlienardError):
    """The continuation step underflowed its floor."""


class BoundaryHit(PlienardError):
    """A continuation iterate left the monitored a priori ball."""


# -- oracle ----------------------------------------------------------------

class MaxIter(PlienardError):
    pass


class SingularJacobian(PlienardError):
    pass


# -- lower/upper solutions and pipeline ------------------------------------

class BracketViolation(PlienardError):
    """A bracketed solve produced a solution outside [alpha, beta]."""


class PreconditionFailed(PlienardError):
    """A lower/upper solution candidate failed its verification gate."""


class NotFound(PlienardError):
    """No constant lower solution on the search grid."""


class TailCheckFailed(PlienardError):
    """Sampled g violates g < mean(h) above delta."""


class HypothesisFailure(PlienardError):
    pass


class ConfigError(PlienardError, ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} [{', '.join(where)}]"
        super().__init__(message)


class SelfCheckFailed(PlienardError):
    """A computed constant does not re-satisfy its defining relation."""


class ResidualCheckFailed(PlienardError):
    """A returned solution does not meet its certified residual bound."""
