"""Arithmetic expressions in the single variable `x`.

Expressions are parsed by precedence climbing into immutable trees,
evaluated with numpy (scalars or arrays) and differentiated symbolically.

Precedence from low to high::

    + -    (left)
    * /    (left)
    unary -
    ^      (right; the exponent may carry its own unary minus)
    call, number, name, parenthesized expression
"""

from __future__ import annotations

import dataclasses
import enum
import math
import re
import typing as t

import numpy as np

from . import specialfn
from .error import (
    DomainError,
    NonDifferentiableError,
    ParseError,
    PsiFracError,
    UnknownIdentifierError,
)


__all__ = [
    "ExprNode",
    "NodeKind",
    "constant",
    "difference",
    "differentiate",
    "evaluate",
    "has_variable",
    "parse",
    "product",
    "quotient",
    "to_text",
]


MAX_TEXT_BYTES = 64 * 1024
VARIABLE_NAME = "x"

FUNCTIONS: t.Dict[str, int] = {
    "exp": 1,
    "ln": 1,
    "sin": 1,
    "cos": 1,
    "sqrt": 1,
    "pow": 2,
    "gamma": 1,
    "mlf": 2,
}
CONSTANTS: t.Dict[str, float] = {
    "pi": math.pi,
    "e": math.e,
}


class NodeKind(enum.Enum):

    CONSTANT = "constant"
    VARIABLE = "variable"
    UNARY = "unary"
    BINARY = "binary"
    CALL = "call"


@dataclasses.dataclass(frozen=True)
class ExprNode:
    """Node of an expression tree.

    `payload` is the numeric value of a constant, the operator symbol of
    unary and binary nodes, the function name of calls and `"x"` for the
    variable.
    """

    kind: NodeKind
    payload: t.Union[float, str]
    children: t.Tuple["ExprNode", ...] = ()

    def __str__(self) -> str:
        return to_text(self)


# --------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
    |(?P<name>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


class _Token(t.NamedTuple):
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> t.List[_Token]:
    byte_offsets = [0]
    for char in text:
        byte_offsets.append(byte_offsets[-1] + len(char.encode("utf-8")))

    tokens: t.List[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(
                byte_offsets[pos], f"unexpected character {text[pos]!r}"
            )
        kind = t.cast(str, match.lastgroup)
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), byte_offsets[pos]))
        pos = match.end()

    tokens.append(_Token("end", "", byte_offsets[-1]))
    return tokens


# --------------------------------------------------------------------------
# Parser

_LEFT, _RIGHT = "left", "right"
_BINARY_OPERATORS: t.Dict[str, t.Tuple[int, str]] = {
    "+": (1, _LEFT),
    "-": (1, _LEFT),
    "*": (2, _LEFT),
    "/": (2, _LEFT),
    "^": (4, _RIGHT),
}
_UNARY_PRECEDENCE = 3


class _Parser:

    def __init__(self, tokens: t.List[_Token]) -> None:
        self._tokens = tokens
        self._pos = 0

    @property
    def current(self) -> _Token:
        return self._tokens[self._pos]

    def advance(self) -> _Token:
        token = self._tokens[self._pos]
        if token.kind != "end":
            self._pos += 1
        return token

    def expect(self, text: str) -> _Token:
        token = self.current
        if token.text != text or token.kind != "op":
            raise ParseError(token.offset, f"expected '{text}'")
        return self.advance()

    def parse(self) -> ExprNode:
        node = self.parse_expression(0)
        token = self.current
        if token.kind != "end":
            raise ParseError(token.offset, f"unexpected token '{token.text}'")
        return node

    def parse_expression(self, min_precedence: int) -> ExprNode:
        lhs = self.parse_prefix()
        while True:
            token = self.current
            if token.kind != "op" or token.text not in _BINARY_OPERATORS:
                return lhs
            precedence, assoc = _BINARY_OPERATORS[token.text]
            if precedence < min_precedence:
                return lhs
            self.advance()
            next_min = precedence if assoc == _RIGHT else precedence + 1
            rhs = self.parse_expression(next_min)
            lhs = ExprNode(NodeKind.BINARY, token.text, (lhs, rhs))

    def parse_prefix(self) -> ExprNode:
        token = self.current
        if token.kind == "op" and token.text in ("-", "+"):
            self.advance()
            operand = self.parse_expression(_UNARY_PRECEDENCE)
            if token.text == "+":
                return operand
            return ExprNode(NodeKind.UNARY, "-", (operand,))
        return self.parse_atom()

    def parse_atom(self) -> ExprNode:
        token = self.current
        if token.kind == "number":
            self.advance()
            return constant(float(token.text))

        if token.kind == "name":
            self.advance()
            return self.parse_name(token)

        if token.kind == "op" and token.text == "(":
            self.advance()
            node = self.parse_expression(0)
            self.expect(")")
            return node

        if token.kind == "end":
            raise ParseError(token.offset, "expected expression")
        raise ParseError(
            token.offset, f"expected expression, got '{token.text}'"
        )

    def parse_name(self, token: _Token) -> ExprNode:
        name = token.text
        is_call = self.current.kind == "op" and self.current.text == "("

        if name in FUNCTIONS:
            if not is_call:
                raise ParseError(
                    self.current.offset, f"expected '(' after '{name}'"
                )
            self.advance()
            args = [self.parse_expression(0)]
            while self.current.kind == "op" and self.current.text == ",":
                self.advance()
                args.append(self.parse_expression(0))
            self.expect(")")
            arity = FUNCTIONS[name]
            if len(args) != arity:
                raise ParseError(
                    token.offset,
                    f"function '{name}' takes {arity} argument(s), "
                    f"got {len(args)}",
                )
            return ExprNode(NodeKind.CALL, name, tuple(args))

        if name == VARIABLE_NAME:
            node = ExprNode(NodeKind.VARIABLE, VARIABLE_NAME)
        elif name in CONSTANTS:
            node = constant(CONSTANTS[name])
        else:
            raise UnknownIdentifierError(token.offset, name)

        if is_call:
            raise ParseError(
                self.current.offset, f"'{name}' is not a function"
            )
        return node


def parse(text: str) -> ExprNode:
    """Parse an expression text.

    Args:
        text: Expression in the variable `x`, at most 64 KiB.

    Returns:
        Root of the parsed tree.

    Raises:
        ParseError: Raised on a syntax error, with the byte offset.
        UnknownIdentifierError: Raised if a name is neither `x`, a constant
            nor a function.
    """
    size = len(text.encode("utf-8"))
    if size > MAX_TEXT_BYTES:
        raise ParseError(MAX_TEXT_BYTES, "expression exceeds 64 KiB")
    return _Parser(_tokenize(text)).parse()


# --------------------------------------------------------------------------
# Evaluation

def _first_bad(values: np.ndarray, bad: np.ndarray) -> float:
    return float(np.broadcast_to(values, bad.shape)[bad].flat[0])


def _check(func: str, values: np.ndarray, bad: np.ndarray) -> None:
    if np.any(bad):
        raise DomainError(func, _first_bad(values, bad))


def _power(base: np.ndarray, exponent: np.ndarray, name: str) -> np.ndarray:
    base, exponent = np.broadcast_arrays(base, exponent)
    bad = (base < 0.0) & (exponent != np.floor(exponent))
    bad &= np.isfinite(exponent)
    _check(name, base, bad)
    return np.power(base, exponent)


_gamma_vec = np.vectorize(specialfn.gamma, otypes=[float])


def _call(name: str, args: t.List[np.ndarray]) -> np.ndarray:
    if name == "exp":
        return np.exp(args[0])
    if name == "ln":
        arg = args[0]
        _check("ln", arg, np.asarray(arg <= 0.0))
        return np.log(arg)
    if name == "sin":
        return np.sin(args[0])
    if name == "cos":
        return np.cos(args[0])
    if name == "sqrt":
        arg = args[0]
        _check("sqrt", arg, np.asarray(arg < 0.0))
        return np.sqrt(arg)
    if name == "pow":
        return _power(args[0], args[1], "pow")
    if name == "gamma":
        return _gamma_vec(args[0])
    if name == "mlf":
        orders = np.unique(np.asarray(args[0], dtype=float))
        if orders.size != 1:
            raise DomainError("mlf", None, "order must not depend on x")
        params = specialfn.MLParams(alpha=float(orders[0]))
        return np.asarray(specialfn.mittag_leffler(params, args[1]))
    raise DomainError(name, None, "unknown function")


def _eval(node: ExprNode, x: np.ndarray) -> np.ndarray:
    kind = node.kind
    if kind is NodeKind.CONSTANT:
        return np.float64(node.payload)
    if kind is NodeKind.VARIABLE:
        return x
    if kind is NodeKind.UNARY:
        return -_eval(node.children[0], x)
    if kind is NodeKind.BINARY:
        lhs = _eval(node.children[0], x)
        rhs = _eval(node.children[1], x)
        op = node.payload
        if op == "+":
            return lhs + rhs
        if op == "-":
            return lhs - rhs
        if op == "*":
            return lhs * rhs
        if op == "/":
            return lhs / rhs
        return _power(lhs, rhs, "^")
    return _call(
        t.cast(str, node.payload), [_eval(c, x) for c in node.children]
    )


def evaluate(
    node: ExprNode,
    x: t.Union[float, np.ndarray],
) -> t.Union[float, np.ndarray]:
    """Evaluate a tree at a scalar or elementwise over an array.

    Division by zero and overflow follow IEEE arithmetic; only the
    functions with a restricted real domain raise.

    Raises:
        DomainError: Raised if `ln`, `sqrt`, `^`/`pow` or `gamma` receive an
            argument outside their domain.
    """
    arr = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        result = _eval(node, arr)
    if arr.ndim == 0:
        return float(result)
    return np.array(np.broadcast_to(result, arr.shape), dtype=float)


# --------------------------------------------------------------------------
# Construction helpers with constant folding and 0/1 identities

_X = ExprNode(NodeKind.VARIABLE, VARIABLE_NAME)


def constant(value: float) -> ExprNode:
    return ExprNode(NodeKind.CONSTANT, float(value))


def _value(node: ExprNode) -> t.Optional[float]:
    if node.kind is NodeKind.CONSTANT:
        return t.cast(float, node.payload)
    return None


def _fold(node: ExprNode) -> ExprNode:
    if any(c.kind is not NodeKind.CONSTANT for c in node.children):
        return node
    try:
        value = evaluate(node, 0.0)
    except PsiFracError:
        return node
    if not math.isfinite(value):
        return node
    return constant(value)


def _neg(a: ExprNode) -> ExprNode:
    value = _value(a)
    if value is not None:
        return constant(-value)
    if a.kind is NodeKind.UNARY:
        return a.children[0]
    return ExprNode(NodeKind.UNARY, "-", (a,))


def _binary(op: str, a: ExprNode, b: ExprNode) -> ExprNode:
    va, vb = _value(a), _value(b)
    if op == "+":
        if va == 0.0:
            return b
        if vb == 0.0:
            return a
    elif op == "-":
        if vb == 0.0:
            return a
        if va == 0.0:
            return _neg(b)
    elif op == "*":
        if va == 0.0 or vb == 0.0:
            return constant(0.0)
        if va == 1.0:
            return b
        if vb == 1.0:
            return a
        if va == -1.0:
            return _neg(b)
        if vb == -1.0:
            return _neg(a)
    elif op == "/":
        if va == 0.0:
            return constant(0.0)
        if vb == 1.0:
            return a
    elif op == "^":
        if vb == 0.0:
            return constant(1.0)
        if vb == 1.0:
            return a
    return _fold(ExprNode(NodeKind.BINARY, op, (a, b)))


def _func(name: str, *args: ExprNode) -> ExprNode:
    return _fold(ExprNode(NodeKind.CALL, name, tuple(args)))


def product(a: ExprNode, b: ExprNode) -> ExprNode:
    return _binary("*", a, b)


def difference(a: ExprNode, b: ExprNode) -> ExprNode:
    return _binary("-", a, b)


def quotient(numerator: ExprNode, denominator: ExprNode) -> ExprNode:
    """Tree of `numerator / denominator` with constant folding."""
    return _binary("/", numerator, denominator)


def has_variable(node: ExprNode) -> bool:
    if node.kind is NodeKind.VARIABLE:
        return True
    return any(has_variable(c) for c in node.children)


# --------------------------------------------------------------------------
# Differentiation

def _diff_power(base: ExprNode, exponent: ExprNode) -> ExprNode:
    d_base = differentiate(base)
    if not has_variable(exponent):
        reduced = _binary("-", exponent, constant(1.0))
        return _binary(
            "*",
            _binary("*", exponent, _binary("^", base, reduced)),
            d_base,
        )

    d_exp = differentiate(exponent)
    value = _value(base)
    if value is not None:
        if value <= 0.0:
            raise NonDifferentiableError(
                "variable exponent of a nonpositive constant base"
            )
        return _binary(
            "*",
            _binary("*", _binary("^", base, exponent), _func("ln", base)),
            d_exp,
        )
    return _binary(
        "*",
        _binary("^", base, exponent),
        _binary(
            "+",
            _binary("*", d_exp, _func("ln", base)),
            _binary("/", _binary("*", exponent, d_base), base),
        ),
    )


def differentiate(node: ExprNode) -> ExprNode:
    """Derivative with respect to `x` as a new tree.

    Raises:
        NonDifferentiableError: Raised if `gamma` or `mlf` has an argument
            depending on `x`.
    """
    kind = node.kind
    if kind is NodeKind.CONSTANT:
        return constant(0.0)
    if kind is NodeKind.VARIABLE:
        return constant(1.0)
    if kind is NodeKind.UNARY:
        return _neg(differentiate(node.children[0]))

    if kind is NodeKind.BINARY:
        a, b = node.children
        op = node.payload
        if op in ("+", "-"):
            return _binary(t.cast(str, op), differentiate(a), differentiate(b))
        if op == "*":
            return _binary(
                "+",
                _binary("*", differentiate(a), b),
                _binary("*", a, differentiate(b)),
            )
        if op == "/":
            numer = _binary(
                "-",
                _binary("*", differentiate(a), b),
                _binary("*", a, differentiate(b)),
            )
            return _binary("/", numer, _binary("^", b, constant(2.0)))
        return _diff_power(a, b)

    name = node.payload
    if name in ("gamma", "mlf"):
        if any(has_variable(c) for c in node.children):
            raise NonDifferentiableError(
                f"'{name}' with an argument depending on x has no "
                "derivative rule"
            )
        return constant(0.0)
    if name == "pow":
        return _diff_power(*node.children)

    u = node.children[0]
    du = differentiate(u)
    if name == "exp":
        return _binary("*", _func("exp", u), du)
    if name == "ln":
        return _binary("/", du, u)
    if name == "sin":
        return _binary("*", _func("cos", u), du)
    if name == "cos":
        return _neg(_binary("*", _func("sin", u), du))
    # sqrt
    return _binary("/", du, _binary("*", constant(2.0), _func("sqrt", u)))


# --------------------------------------------------------------------------
# Printing

def _constant_text(value: float) -> str:
    if math.isnan(value):
        return "(0/0)"
    if math.isinf(value):
        return "(1/0)" if value > 0 else "(-1/0)"
    if value < 0.0 or (value == 0.0 and math.copysign(1.0, value) < 0):
        return f"(-{-value!r})"
    return repr(value)


def to_text(node: ExprNode) -> str:
    """Fully parenthesized text that parses back to an equivalent tree."""
    kind = node.kind
    if kind is NodeKind.CONSTANT:
        return _constant_text(t.cast(float, node.payload))
    if kind is NodeKind.VARIABLE:
        return VARIABLE_NAME
    if kind is NodeKind.UNARY:
        return f"(-{to_text(node.children[0])})"
    if kind is NodeKind.BINARY:
        a, b = node.children
        return f"({to_text(a)} {node.payload} {to_text(b)})"
    args = ", ".join(to_text(c) for c in node.children)
    return f"{node.payload}({args})"
