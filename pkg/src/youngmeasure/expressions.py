"""Arithmetic expressions: tokenizer, parser, evaluator, printer.

Grammar (no implicit multiplication)::

    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := "-" factor | power
    power   := atom ("^" factor)?
    atom    := NUMBER | "pi" | "e" | VARIABLE | FUNC "(" expr ")" | "(" expr ")"

"^" is right-associative and binds tighter than unary minus; the other
binary operators are left-associative.  NUMBER is a decimal literal with
optional fraction and exponent part ("2", "0.5", "1e-3").  The variable
set is declared per expression: domain expressions use x (or x1..xd),
inverses and Jacobians use y (or y1..yl), probes use s.

Evaluation is strict about real arithmetic: log/sqrt outside their
domain, division by zero and fractional powers of negatives raise
:class:`EvaluationError` instead of producing NaN.  Evaluation accepts
floats or numpy arrays in the environment and returns the same kind.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import EvaluationError, ParseError

__all__ = [
    "Num", "Const", "Var", "Neg", "BinOp", "Call", "Node",
    "parse", "parse_expression", "domain_variables", "codomain_variables",
    "evaluate", "to_text", "free_variables", "is_constant",
    "FUNCTIONS", "CONSTANTS",
]


@dataclass(frozen=True, slots=True)
class Num:
    value: float  # non-negative; negative literals parse as Neg(Num)


@dataclass(frozen=True, slots=True)
class Const:
    name: str  # "pi" or "e"


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True, slots=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Const, Var, Neg, BinOp, Call]

CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs", "floor")

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.lastgroup is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_pos = len(text) - len(stripped)
            raise ParseError(
                f"unexpected character {text[bad_pos]!r}", _byte_offset(text, bad_pos)
            )
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), _byte_offset(text, m.start(kind))))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(text, len(text))))
    return tokens


def domain_variables(d: int) -> tuple[str, ...]:
    """Variable names for a d-dimensional domain: x for d=1, else x1..xd."""
    if d == 1:
        return ("x", "x1")
    return tuple(f"x{i}" for i in range(1, d + 1))


def codomain_variables(l: int) -> tuple[str, ...]:
    """Variable names for an l-dimensional codomain: y for l=1, else y1..yl."""
    if l == 1:
        return ("y", "y1")
    return tuple(f"y{i}" for i in range(1, l + 1))


class _Parser:
    def __init__(self, tokens, variables, index_limits):
        self.tokens = tokens
        self.i = 0
        self.variables = frozenset(variables)
        self.index_limits = dict(index_limits)

    @property
    def current(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, off = self.current
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", off)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        kind, text, off = self.current
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", off)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current[0] == "op" and self.current[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.current[0] == "op" and self.current[1] in "*/":
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.current[0] == "op" and self.current[1] == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.current[0] == "op" and self.current[1] == "^":
            self.advance()
            node = BinOp("^", node, self.factor())
        return node

    def atom(self) -> Node:
        kind, text, off = self.current
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "ident":
            self.advance()
            if text in CONSTANTS:
                return Const(text)
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in self.variables:
                return Var(text)
            m = re.fullmatch(r"([A-Za-z]+)(\d+)", text)
            if m and m.group(1) in self.index_limits:
                limit = self.index_limits[m.group(1)]
                raise ParseError(
                    f"variable {text!r} out of range: indices run 1..{limit}", off
                )
            raise ParseError(f"unknown identifier {text!r}", off)
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        shown = text if text else "end of input"
        raise ParseError(f"unexpected {shown!r}", off)


def parse(text: str, variables: Iterable[str], index_limits: Mapping[str, int] | None = None) -> Node:
    """Parse ``text`` over the given variable names.

    ``index_limits`` maps indexed-variable prefixes to their dimension so
    that e.g. "x3" with d=2 reports an out-of-range index rather than an
    unknown identifier.
    """
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(_tokenize(text), variables, index_limits or {}).parse()


def parse_expression(text: str, d: int) -> Node:
    """Parse an expression over a d-dimensional domain (variables x1..xd, alias x when d=1)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return parse(text, domain_variables(d), {"x": d})


def free_variables(node: Node) -> frozenset[str]:
    match node:
        case Var(name):
            return frozenset((name,))
        case Neg(operand):
            return free_variables(operand)
        case BinOp(_, left, right):
            return free_variables(left) | free_variables(right)
        case Call(_, arg):
            return free_variables(arg)
        case _:
            return frozenset()


def is_constant(node: Node) -> bool:
    return not free_variables(node)


def _is_integral(value) -> bool:
    return bool(np.all(np.equal(value, np.floor(value))))


def _eval(node: Node, env) -> float | np.ndarray:
    match node:
        case Num(value):
            return value
        case Const(name):
            return CONSTANTS[name]
        case Var(name):
            try:
                return env[name]
            except KeyError:
                raise EvaluationError(f"unbound variable {name!r}") from None
        case Neg(operand):
            return -_eval(operand, env)
        case BinOp(op, left, right):
            a = _eval(left, env)
            b = _eval(right, env)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if np.any(np.equal(b, 0.0)):
                    raise EvaluationError("division by zero")
                return a / b
            # op == "^"
            if np.any(np.less(a, 0.0) & ~np.equal(b, np.floor(b))):
                raise EvaluationError("fractional power of a negative base")
            if np.any(np.equal(a, 0.0) & np.less(b, 0.0)):
                raise EvaluationError("negative power of zero")
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                return np.power(a, b)
            return _scalar_pow(a, b)
        case Call(func, argnode):
            v = _eval(argnode, env)
            if func == "log":
                if np.any(np.less_equal(v, 0.0)):
                    raise EvaluationError("log of a non-positive value")
                return np.log(v) if isinstance(v, np.ndarray) else math.log(v)
            if func == "sqrt":
                if np.any(np.less(v, 0.0)):
                    raise EvaluationError("sqrt of a negative value")
                return np.sqrt(v) if isinstance(v, np.ndarray) else math.sqrt(v)
            if isinstance(v, np.ndarray):
                return _NUMPY_FUNCS[func](v)
            return _SCALAR_FUNCS[func](v)
    raise TypeError(f"not an expression node: {node!r}")


def _scalar_pow(a: float, b: float) -> float:
    try:
        return float(a) ** float(b)
    except OverflowError:
        return math.inf


def _scalar_exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


_SCALAR_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": _scalar_exp,
    "abs": abs,
    "floor": lambda v: float(math.floor(v)),
}

_NUMPY_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
    "floor": np.floor,
}


def evaluate(node: Node, env: Mapping[str, float | np.ndarray]) -> float | np.ndarray:
    """Evaluate ``node`` with variables bound by ``env``.

    Array values broadcast elementwise; a float environment yields a float.
    """
    with np.errstate(over="ignore", under="ignore"):
        result = _eval(node, env)
    if isinstance(result, np.ndarray):
        if np.any(np.isnan(result)):
            raise EvaluationError("evaluation produced NaN")
        return result
    result = float(result)
    if math.isnan(result):
        raise EvaluationError("evaluation produced NaN")
    return result


# Pretty printer.  Parenthesization is chosen so that parsing the output
# reproduces the input tree exactly, including association order.

_BIN_PREC = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_NEG_PREC = 30
_ATOM_PREC = 100


def _prec(node: Node) -> int:
    match node:
        case BinOp(op, _, _):
            return _BIN_PREC[op]
        case Neg(_):
            return _NEG_PREC
        case _:
            return _ATOM_PREC


def _wrap(node: Node, minimum: int) -> str:
    text = to_text(node)
    return f"({text})" if _prec(node) < minimum else text


def to_text(node: Node) -> str:
    """Render a tree to concrete syntax; ``parse`` of the result gives the tree back."""
    match node:
        case Num(value):
            # integer-valued literals render without the ".0" (kept below 2^53
            # so the digits are exact); everything else keeps full repr
            if value.is_integer() and abs(value) < 1e15:
                return str(int(value))
            return repr(value)
        case Const(name):
            return name
        case Var(name):
            return name
        case Neg(operand):
            return "-" + _wrap(operand, _NEG_PREC)
        case BinOp("^", left, right):
            return _wrap(left, _ATOM_PREC) + "^" + _wrap(right, _NEG_PREC)
        case BinOp(op, left, right):
            p = _BIN_PREC[op]
            return _wrap(left, p) + op + _wrap(right, p + 1)
        case Call(func, arg):
            return f"{func}({to_text(arg)})"
    raise TypeError(f"not an expression node: {node!r}")
