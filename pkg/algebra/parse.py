"""
Function Literal Parser
Recursive-descent grammar for rational functions in z and complex constants
"""
import re
from dataclasses import dataclass
from typing import List, Optional, Union

from algebra.ratfun import RatFun, rat_arith
from core.errors import ExprSemanticError, ExprSyntaxError, InvalidArgumentError

GRAMMAR = """\
expr   := term (('+' | '-') term)*
term   := unary (('*' | '/') unary)*
unary  := '-' unary | '+' unary | power
power  := atom ('^' ['-'] INTEGER | '^' '(' ['-'] INTEGER ')')?
atom   := NUMBER ['i'] | 'i' | 'z' | '(' expr ')'
"""

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


@dataclass(frozen=True)
class Token:
    kind: str  # number, imag, name, op, end
    text: str
    offset: int
    value: Optional[complex] = None


@dataclass(frozen=True)
class Literal:
    value: complex
    offset: int


@dataclass(frozen=True)
class Variable:
    offset: int


@dataclass(frozen=True)
class Negate:
    operand: "ExprAst"
    offset: int


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "ExprAst"
    right: "ExprAst"
    offset: int


@dataclass(frozen=True)
class Power:
    base: "ExprAst"
    exponent: int
    offset: int


ExprAst = Union[Literal, Variable, Negate, BinaryOp, Power]


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        match = _NUMBER.match(text, pos)
        if match:
            end = match.end()
            value = float(match.group(0))
            if end < len(text) and text[end] == "i":
                tokens.append(Token("number", text[pos:end + 1], pos, complex(0, value)))
                end += 1
            else:
                tokens.append(Token("number", match.group(0), pos, complex(value)))
            pos = end
            continue
        if ch in "zi":
            if pos + 1 < len(text) and (text[pos + 1].isalnum() or text[pos + 1] == "_"):
                raise ExprSyntaxError(f"unknown identifier starting with {ch!r}", pos, "'z' or 'i'")
            tokens.append(Token("name", ch, pos, 1j if ch == "i" else None))
            pos += 1
            continue
        if ch in "+-*/^()":
            tokens.append(Token("op", ch, pos))
            pos += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", pos)
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    """Precedence: ^ binds tighter than unary minus, then * and /, then + and -"""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def accept(self, text: str) -> Optional[Token]:
        if self.current.kind == "op" and self.current.text == text:
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        token = self.accept(text)
        if token is None:
            found = self.current.text or "end of input"
            raise ExprSyntaxError(f"unexpected {found!r}", self.current.offset, repr(text))
        return token

    def parse(self) -> ExprAst:
        if self.current.kind == "end":
            raise ExprSyntaxError("empty expression", 0, "an expression")
        node = self.expr()
        if self.current.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.current.text!r}", self.current.offset,
                                  "operator or end of input")
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance()
            node = BinaryOp(op.text, node, self.term(), op.offset)
        return node

    def term(self) -> ExprAst:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance()
            node = BinaryOp(op.text, node, self.unary(), op.offset)
        return node

    def unary(self) -> ExprAst:
        token = self.accept("-")
        if token is not None:
            return Negate(self.unary(), token.offset)
        if self.accept("+") is not None:
            return self.unary()
        return self.power()

    def power(self) -> ExprAst:
        base = self.atom()
        caret = self.accept("^")
        if caret is None:
            return base
        grouped = self.accept("(") is not None
        negative = self.accept("-") is not None
        token = self.current
        if token.kind != "number" or not re.fullmatch(r"\d+", token.text):
            raise ExprSyntaxError("exponent must be an integer literal", token.offset, "integer")
        self.advance()
        if grouped:
            self.expect(")")
        exponent = -int(token.text) if negative else int(token.text)
        return Power(base, exponent, caret.offset)

    def atom(self) -> ExprAst:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Literal(token.value, token.offset)
        if token.kind == "name":
            self.advance()
            if token.text == "z":
                return Variable(token.offset)
            return Literal(1j, token.offset)
        if self.accept("(") is not None:
            node = self.expr()
            self.expect(")")
            return node
        found = token.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", token.offset, "number, 'z', 'i' or '('")


def parse_ast(text: str) -> ExprAst:
    """Syntax tree of a function literal"""
    return _Parser(text).parse()


def lower(node: ExprAst) -> RatFun:
    """Fold a syntax tree into a normalized RatFun"""
    if isinstance(node, Literal):
        return RatFun.constant(node.value)
    if isinstance(node, Variable):
        return RatFun.identity()
    if isinstance(node, Negate):
        return -lower(node.operand)
    if isinstance(node, Power):
        base = lower(node.base)
        if node.exponent < 0 and base.is_zero:
            raise ExprSemanticError("zero raised to a negative power", node.offset)
        return rat_arith("ipow", base, node.exponent)
    left, right = lower(node.left), lower(node.right)
    if node.op == "+":
        return rat_arith("add", left, right)
    if node.op == "-":
        return rat_arith("sub", left, right)
    if node.op == "*":
        return rat_arith("mul", left, right)
    if right.is_zero:
        raise ExprSemanticError("division by an expression that folds to zero", node.offset)
    return rat_arith("div", left, right)


def parse_expr(text: str) -> RatFun:
    """
    Parse a function literal such as "(z^2+1)/(z-2)" or "2i*z - 1".

    Raises:
        ExprSyntaxError: malformed input, with offset and expected token
        ExprSemanticError: well-formed input without a rational value
    """
    return lower(parse_ast(text))


def parse_complex(text: str) -> complex:
    """Parse a constant such as "0.5", "-2i" or "1+0.5i"; "inf" gives the point at infinity"""
    stripped = text.strip()
    if stripped.lower() in ("inf", "infinity", "∞"):
        return float("inf")
    value = parse_expr(stripped)
    if not value.is_constant:
        raise InvalidArgumentError("parse_complex", f"{text!r} is not a constant")
    return value.constant_value()


def _format_real(value: float, precision: int) -> str:
    return format(value, f".{precision}g")


def _format_coefficient(value: complex, precision: int):
    """Returns (sign, body) where body renders |value| for real or imaginary values"""
    if value.imag == 0:
        sign = "-" if value.real < 0 else "+"
        return sign, _format_real(abs(value.real), precision), "real"
    if value.real == 0:
        sign = "-" if value.imag < 0 else "+"
        return sign, _format_real(abs(value.imag), precision) + "i", "imag"
    imag = value.imag
    body = f"({_format_real(value.real, precision)}{'-' if imag < 0 else '+'}{_format_real(abs(imag), precision)}i)"
    return "+", body, "complex"


def _format_poly(coeffs, precision: int) -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        value = complex(coeffs[k])
        if value == 0:
            continue
        sign, body, kind = _format_coefficient(value, precision)
        power = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
        if not power:
            text = body
        elif kind == "real" and body == "1":
            text = power
        else:
            text = f"{body}*{power}"
        terms.append((sign, text))
    if not terms:
        return "0"
    sign, text = terms[0]
    out = f"-{text}" if sign == "-" else text
    for sign, text in terms[1:]:
        out += f" {sign} {text}"
    return out


def format_expr(g: RatFun, precision: int = 15) -> str:
    """Canonical "(num)/(den)" rendering; the denominator is omitted when it is 1"""
    num = _format_poly(g.num.coeffs, precision)
    if g.den.degree == 0:
        return f"({num})"
    return f"({num})/({_format_poly(g.den.coeffs, precision)})"
