"""A small arithmetic expression language for problem data.

Grammar (highest binding first)::

    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'
    power  := atom ['^' unary]            # right associative
    unary  := '-' unary | power           # unary minus binds looser than ^
    term   := unary (('*' | '/') unary)*  # left associative
    expr   := term (('+' | '-') term)*    # left associative

``pi`` is a predefined constant. ``e`` is deliberately *not* predefined;
write ``exp(1)``. There is no implicit multiplication: ``2x`` is an error.
Calls take exactly one argument and must name one of
``sin cos exp log abs sqrt``.
"""

from __future__ import annotations

import math
import re
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import EvalError, LexError, ParseError, UnboundSymbol

__all__ = [
    "Token", "Expr", "Const", "Var", "Param", "Neg", "BinOp", "Call",
    "tokenize", "parse", "parse_expr", "evaluate", "evaluate_array",
    "validate", "ValidationReport", "to_text", "symbols", "compile_expr",
    "FUNCTIONS", "CONSTANTS",
]

FUNCTIONS = ("sin", "cos", "exp", "log", "abs", "sqrt")
CONSTANTS = {"pi": math.pi}


@dataclass(frozen=True)
class Token:
    kind: str  # number | identifier | operator | paren | comma
    lexeme: str
    position: int  # byte offset into the UTF-8 source

    def __repr__(self) -> str:
        return f"{self.kind}:{self.lexeme}@{self.position}"


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<identifier>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<operator>[-+*/^])
  | (?P<paren>[()])
  | (?P<comma>,)
    """,
    re.VERBOSE,
)


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens; raises LexError on a foreign character."""
    tokens: list[Token] = []
    pos = 0
    byte_pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise LexError(f"unexpected character {source[pos]!r}", byte_pos)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            tokens.append(Token(kind, text, byte_pos))
        pos = m.end()
        byte_pos += len(text.encode("utf-8"))
    return tokens


# -- tree ------------------------------------------------------------------

class Expr:
    """Base class of the immutable expression tree."""

    __slots__ = ()

    def sexpr(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float
    name: str | None = None

    def sexpr(self) -> str:
        return self.name if self.name else repr(float(self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str
    offset: int | None = field(default=None, compare=False)

    def sexpr(self) -> str:
        return self.name


@dataclass(frozen=True)
class Param(Expr):
    name: str
    offset: int | None = field(default=None, compare=False)

    def sexpr(self) -> str:
        return f"${self.name}"


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr

    def sexpr(self) -> str:
        return f"(neg {self.child.sexpr()})"


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def sexpr(self) -> str:
        return f"({self.op} {self.left.sexpr()} {self.right.sexpr()})"


@dataclass(frozen=True)
class Call(Expr):
    name: str
    arg: Expr

    def sexpr(self) -> str:
        return f"({self.name} {self.arg.sexpr()})"


# -- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token], parameters: frozenset[str], end: int):
        self.tokens = tokens
        self.parameters = parameters
        self.i = 0
        self.end = end

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, kind: str, lexeme: str | None = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (lexeme is None or tok.lexeme == lexeme)

    def fail_here(self, what: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            return ParseError(f"unexpected end of input, expected {what}", self.end)
        return ParseError(f"unexpected {tok.kind} {tok.lexeme!r}, expected {what}", tok.position)

    def expr(self) -> Expr:
        node = self.term()
        while self.at("operator", "+") or self.at("operator", "-"):
            op = self.advance().lexeme
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.at("operator", "*") or self.at("operator", "/"):
            op = self.advance().lexeme
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.at("operator", "-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at("operator", "^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok is None or tok.kind in ("operator", "comma") or (tok.kind == "paren" and tok.lexeme == ")"):
            raise self.fail_here("an operand")
        self.advance()
        if tok.kind == "number":
            return Const(float(tok.lexeme))
        if tok.kind == "paren":  # "("
            inner = self.expr()
            if not self.at("paren", ")"):
                if self.peek() is None:
                    raise ParseError("unbalanced '('", tok.position)
                raise self.fail_here("')'")
            self.advance()
            return inner
        name = tok.lexeme
        if self.at("paren", "("):
            if name not in FUNCTIONS:
                raise ParseError(f"unknown function {name!r}", tok.position)
            open_tok = self.advance()
            arg = self.expr()
            if not self.at("paren", ")"):
                if self.peek() is None:
                    raise ParseError("unbalanced '('", open_tok.position)
                raise self.fail_here("')' (functions take one argument)")
            self.advance()
            return Call(name, arg)
        if name in FUNCTIONS:
            raise ParseError(f"function {name!r} needs a parenthesised argument", tok.position)
        if name in CONSTANTS:
            return Const(CONSTANTS[name], name)
        if name in self.parameters:
            return Param(name, tok.position)
        return Var(name, tok.position)


def parse(tokens: Iterable[Token], parameters: Iterable[str] = (), *, end: int | None = None) -> Expr:
    """Build an expression tree from a token stream.

    Identifiers listed in ``parameters`` become :class:`Param` nodes; every
    other free identifier becomes a :class:`Var`.
    """
    tokens = list(tokens)
    if end is None:
        end = tokens[-1].position + len(tokens[-1].lexeme.encode("utf-8")) if tokens else 0
    if not tokens:
        raise ParseError("empty expression", 0)
    p = _Parser(tokens, frozenset(parameters), end)
    node = p.expr()
    if p.peek() is not None:
        tok = p.peek()
        if tok.kind == "paren" and tok.lexeme == ")":
            raise ParseError("unbalanced ')'", tok.position)
        raise ParseError(f"unexpected {tok.kind} {tok.lexeme!r} after complete expression", tok.position)
    return node


def parse_expr(source: str, parameters: Iterable[str] = ()) -> Expr:
    return parse(tokenize(source), parameters, end=len(source.encode("utf-8")))


# -- printing --------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _NEG_PREC
    if isinstance(e, Const) and e.name is None and (e.value < 0 or math.copysign(1.0, e.value) < 0):
        return 0  # printed with its own parentheses
    return _ATOM_PREC


def to_text(e: Expr) -> str:
    """Canonical text that re-parses to a tree with identical evaluation."""
    if isinstance(e, Const):
        if e.name:
            return e.name
        s = repr(float(e.value))
        return f"({s})" if s.startswith("-") else s
    if isinstance(e, (Var, Param)):
        return e.name
    if isinstance(e, Call):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.child)
        if _prec(e.child) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    assert isinstance(e, BinOp)
    p = _PREC[e.op]
    left, right = to_text(e.left), to_text(e.right)
    if e.op == "^":
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) < _NEG_PREC:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    sep = f" {e.op} " if p == 1 else e.op
    return f"{left}{sep}{right}"


# -- symbols and validation ------------------------------------------------

def _walk(e: Expr):
    yield e
    if isinstance(e, Neg):
        yield from _walk(e.child)
    elif isinstance(e, BinOp):
        yield from _walk(e.left)
        yield from _walk(e.right)
    elif isinstance(e, Call):
        yield from _walk(e.arg)


def symbols(e: Expr) -> set[str]:
    """Names of all free variables and parameters in ``e``."""
    return {n.name for n in _walk(e) if isinstance(n, (Var, Param))}


@dataclass(frozen=True)
class ValidationReport:
    offenders: tuple[tuple[str, int | None], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.offenders

    def __bool__(self) -> bool:
        return self.ok

    def names(self) -> list[str]:
        return [name for name, _ in self.offenders]


def validate(e: Expr, allowed: Iterable[str]) -> ValidationReport:
    allowed = set(allowed)
    bad = tuple(
        (n.name, n.offset)
        for n in _walk(e)
        if isinstance(n, (Var, Param)) and n.name not in allowed
    )
    return ValidationReport(bad)


# -- scalar evaluation -----------------------------------------------------

def _pow(x: float, y: float) -> float:
    if x == 0.0 and y < 0.0:
        raise EvalError("zero raised to a negative power")
    if x < 0.0 and y != math.floor(y):
        raise EvalError("negative base with non-integer exponent")
    try:
        return math.pow(x, y)
    except OverflowError:
        raise EvalError("overflow in power") from None


def _call(name: str, x: float) -> float:
    if name == "log":
        if x <= 0.0:
            raise EvalError("log of non-positive value")
        return math.log(x)
    if name == "sqrt":
        if x < 0.0:
            raise EvalError("sqrt of negative value")
        return math.sqrt(x)
    if name == "exp":
        try:
            return math.exp(x)
        except OverflowError:
            raise EvalError("overflow in exp") from None
    if name == "abs":
        return abs(x)
    return getattr(math, name)(x)


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate ``e`` in IEEE double precision.

    Domain violations raise :class:`EvalError` instead of returning NaN.
    """
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, (Var, Param)):
        try:
            return float(bindings[e.name])
        except KeyError:
            raise UnboundSymbol(f"unbound symbol {e.name!r}", e.offset) from None
    if isinstance(e, Neg):
        return -evaluate(e.child, bindings)
    if isinstance(e, Call):
        return _call(e.name, evaluate(e.arg, bindings))
    a = evaluate(e.left, bindings)
    b = evaluate(e.right, bindings)
    if e.op == "+":
        r = a + b
    elif e.op == "-":
        r = a - b
    elif e.op == "*":
        r = a * b
    elif e.op == "/":
        if b == 0.0:
            raise EvalError("division by zero")
        r = a / b
    else:
        r = _pow(a, b)
    if math.isinf(r) and math.isfinite(a) and math.isfinite(b):
        raise EvalError(f"overflow in {e.op!r}")
    return r


# -- array evaluation ------------------------------------------------------

def _check(ok, message: str) -> None:
    if not np.all(ok):
        raise EvalError(message)


def compile_expr(e: Expr) -> Callable[..., np.ndarray]:
    """Compile ``e`` to a numpy function of keyword arrays.

    The compiled function enforces the same domain rules as
    :func:`evaluate`, applied elementwise; it broadcasts its arguments.
    """

    def build(node: Expr):
        if isinstance(node, Const):
            v = float(node.value)
            return lambda env: v
        if isinstance(node, (Var, Param)):
            name, off = node.name, node.offset

            def look(env):
                try:
                    return env[name]
                except KeyError:
                    raise UnboundSymbol(f"unbound symbol {name!r}", off) from None
            return look
        if isinstance(node, Neg):
            c = build(node.child)
            return lambda env: np.negative(c(env))
        if isinstance(node, Call):
            c = build(node.arg)
            fname = node.name

            def call(env):
                x = np.asarray(c(env), dtype=float)
                if fname == "log":
                    _check(x > 0.0, "log of non-positive value")
                    return np.log(x)
                if fname == "sqrt":
                    _check(x >= 0.0, "sqrt of negative value")
                    return np.sqrt(x)
                if fname == "exp":
                    with np.errstate(over="ignore"):
                        r = np.exp(x)
                    _check(np.isfinite(r) | ~np.isfinite(x), "overflow in exp")
                    return r
                return getattr(np, fname)(x)
            return call
        assert isinstance(node, BinOp)
        lf, rf, op = build(node.left), build(node.right), node.op

        def binop(env):
            a = np.asarray(lf(env), dtype=float)
            b = np.asarray(rf(env), dtype=float)
            with np.errstate(all="ignore"):
                if op == "+":
                    r = a + b
                elif op == "-":
                    r = a - b
                elif op == "*":
                    r = a * b
                elif op == "/":
                    _check(b != 0.0, "division by zero")
                    r = a / b
                else:
                    _check(~((a == 0.0) & (b < 0.0)), "zero raised to a negative power")
                    _check(~((a < 0.0) & (b != np.floor(b))), "negative base with non-integer exponent")
                    r = np.power(a, b)
            _check(np.isfinite(r) | ~(np.isfinite(a) & np.isfinite(b)), f"overflow in {op!r}")
            return r
        return binop

    fn = build(e)

    def run(**env):
        return fn(env)

    run.expr = e  # type: ignore[attr-defined]
    return run


def evaluate_array(e: Expr, bindings: Mapping[str, object]) -> np.ndarray:
    """Vectorised counterpart of :func:`evaluate`."""
    return np.asarray(compile_expr(e)(**bindings), dtype=float)
