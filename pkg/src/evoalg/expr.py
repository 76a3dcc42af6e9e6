"""Tiny expression language for time-dependent family parameters.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := power (('*' | '/') power)*
    power  := unary ('^' power)?          # right-associative
    unary  := '-' unary | atom
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Unary minus binds tighter than ``^``, so ``-2^2`` is ``(-2)^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

FUNCTIONS = {
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sqrt": math.sqrt,
    "cbrt": None,  # filled below
}
CONSTANTS = {"pi": math.pi}


def _cbrt(x: float) -> float:
    if x == 0.0:
        return 0.0
    y = math.copysign(abs(x) ** (1.0 / 3.0), x)
    return y - (y * y * y - x) / (3.0 * y * y)


FUNCTIONS["cbrt"] = _cbrt


class ExprSyntaxError(ValueError):
    def __init__(self, offset: int, expected: tuple[str, ...], found: str):
        self.offset = offset
        self.expected = expected
        self.found = found
        super().__init__(
            f"syntax error at byte {offset}: expected {' or '.join(expected)}, found {found}"
        )


class UnknownIdentifier(ValueError):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at byte {offset}")


class EvalDomainError(ArithmeticError):
    def __init__(self, node: Expr, env: dict, reason: str):
        self.node = node
        self.env = dict(env)
        self.reason = reason
        at = ", ".join(f"{k}={v!r}" for k, v in sorted(self.env.items()))
        super().__init__(f"{reason} in {to_source(node)} at {at}")


# AST ------------------------------------------------------------------------


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Const(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


# tokenizer ------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(source)
    boff = 0  # byte offset of source[i]
    while i < n:
        c = source[i]
        if c.isspace():
            boff += len(c.encode())
            i += 1
            continue
        start, bstart = i, boff
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            while i < n and (source[i].isdigit() or source[i] == "."):
                i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    i = j
                    while i < n and source[i].isdigit():
                        i += 1
            text = source[start:i]
            if text.count(".") > 1:
                raise ExprSyntaxError(bstart, ("number",), repr(text))
            tokens.append(_Token("num", text, bstart))
        elif c.isalpha() or c == "_":
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            tokens.append(_Token("name", source[start:i], bstart))
        elif c in "+-*/^()":
            i += 1
            tokens.append(_Token("op", c, bstart))
        else:
            raise ExprSyntaxError(bstart, ("expression",), repr(c))
        boff = bstart + len(source[start:i].encode())
    tokens.append(_Token("end", "", boff))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: tuple[str, ...]):
        self.tokens = _tokenize(source)
        self.pos = 0
        self.variables = variables

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: tuple[str, ...]):
        tok = self.peek()
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(tok.offset, expected, found)

    def expect(self, op: str):
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            return self.next()
        self.fail((repr(op),))

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek().kind != "end":
            self.fail(("operator", "end of input"))
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.power()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            node = BinOp(op, node, self.power())
        return node

    def power(self) -> Expr:
        base = self.unary()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.next()
            return BinOp("^", base, self.power())
        return base

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.next()
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.next()
            name = tok.text
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if name in CONSTANTS:
                return Const(name)
            if name in self.variables:
                return Var(name)
            raise UnknownIdentifier(name, tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(("number", "name", "'('", "'-'"))


def parse(source: str, variables: tuple[str, ...] = ("t",)) -> Expr:
    return _Parser(source, variables).parse()


# printing -------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 4
    return 5


def _fmt_num(value: float) -> str:
    text = repr(value)
    return text[:-2] if text.endswith(".0") else text


def to_source(node: Expr) -> str:
    """Render ``node`` so that ``parse(to_source(node)) == node``."""
    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        inner = to_source(node.operand)
        return f"-{inner}" if _prec(node.operand) >= 4 else f"-({inner})"
    p = _PREC[node.op]
    left, right = to_source(node.left), to_source(node.right)
    if node.op == "^":
        left_paren = _prec(node.left) <= p
        right_paren = _prec(node.right) < p
    else:
        left_paren = _prec(node.left) < p
        right_paren = _prec(node.right) <= p
    if left_paren:
        left = f"({left})"
    if right_paren:
        right = f"({right})"
    return f"{left} {node.op} {right}"


# evaluation -----------------------------------------------------------------


def _checked(value: float, node: Expr, env: dict) -> float:
    if not math.isfinite(value):
        raise EvalDomainError(node, env, "non-finite result")
    return value


def _eval(node: Expr, env: dict) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        x = _eval(node.arg, env)
        if node.func == "log" and x <= 0:
            raise EvalDomainError(node, env, "log of a non-positive number")
        if node.func == "sqrt" and x < 0:
            raise EvalDomainError(node, env, "sqrt of a negative number")
        try:
            return _checked(FUNCTIONS[node.func](x), node, env)
        except OverflowError:
            raise EvalDomainError(node, env, "non-finite result") from None
        except ValueError as exc:
            raise EvalDomainError(node, env, str(exc)) from None
    a = _eval(node.left, env)
    b = _eval(node.right, env)
    op = node.op
    if op == "+":
        return _checked(a + b, node, env)
    if op == "-":
        return _checked(a - b, node, env)
    if op == "*":
        return _checked(a * b, node, env)
    if op == "/":
        if b == 0:
            raise EvalDomainError(node, env, "division by zero")
        return _checked(a / b, node, env)
    if a == 0 and b < 0:
        raise EvalDomainError(node, env, "zero raised to a negative power")
    if a < 0 and b != int(b):
        raise EvalDomainError(node, env, "negative base with fractional exponent")
    try:
        return _checked(math.pow(a, b), node, env)
    except OverflowError:
        raise EvalDomainError(node, env, "non-finite result") from None
    except ValueError as exc:
        raise EvalDomainError(node, env, str(exc)) from None


def evaluate(node: Expr, t: float | None = None, **env: float) -> float:
    """Evaluate ``node`` at ``t`` (and any other bound variables)."""
    if t is not None:
        env["t"] = t
    return _eval(node, {k: float(v) for k, v in env.items()})
