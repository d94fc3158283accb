"""Small arithmetic expression language for user-supplied data functions.

Grammar (precedence low to high):

    expr    := term (('+'|'-') term)*
    term    := unary (('*'|'/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative, binds above unary minus
    atom    := number | 'pi' | variable | func '(' expr (',' expr)* ')' | '(' expr ')'

Variables are ``x`` (1D) or ``x``/``y`` (2D). Functions: sin, cos, exp, abs,
sqrt, min, max. Evaluation is vectorized over numpy arrays and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Expression", "ExpressionError", "EvaluationError", "parse_expr"]


class ExpressionError(ValueError):
    """Syntax error; carries the byte offset of the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvaluationError(ValueError):
    """Raised when evaluation produces a non-finite value."""


_FUNCTIONS = {
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "exp": (1, np.exp),
    "abs": (1, np.abs),
    "sqrt": (1, np.sqrt),
    "min": (2, np.minimum),
    "max": (2, np.maximum),
}


@dataclass(frozen=True)
class _Token:
    kind: str  # num | name | op | lpar | rpar | comma | end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            try:
                float(text[i:j])
            except ValueError:
                raise ExpressionError(f"malformed number {text[i:j]!r}", i)
            tokens.append(_Token("num", text[i:j], i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], i))
            i = j
        elif c in "+-*/^":
            tokens.append(_Token("op", c, i))
            i += 1
        elif c == "(":
            tokens.append(_Token("lpar", c, i))
            i += 1
        elif c == ")":
            tokens.append(_Token("rpar", c, i))
            i += 1
        elif c == ",":
            tokens.append(_Token("comma", c, i))
            i += 1
        else:
            raise ExpressionError(f"unexpected character {c!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


# AST nodes are tuples: ("num", v) | ("var", name) | ("neg", a)
#                     | ("bin", op, a, b) | ("call", fname, args)


class _Parser:
    def __init__(self, tokens: list[_Token], variables: tuple[str, ...]):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ExpressionError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.offset)
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExpressionError(f"trailing input {tok.text!r}", tok.offset)
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = ("bin", op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            # right associative; exponent may carry a unary minus
            return ("bin", "^", base, self.unary())
        return base

    def atom(self):
        tok = self.advance()
        if tok.kind == "num":
            return ("num", float(tok.text))
        if tok.kind == "name":
            name = tok.text
            if name == "pi":
                return ("num", float(np.pi))
            if name in _FUNCTIONS:
                self.expect("lpar", "'(' after function name")
                args = [self.expr()]
                while self.peek().kind == "comma":
                    self.advance()
                    args.append(self.expr())
                self.expect("rpar", "')'")
                arity = _FUNCTIONS[name][0]
                if len(args) != arity:
                    raise ExpressionError(f"{name} takes {arity} argument(s), got {len(args)}", tok.offset)
                return ("call", name, tuple(args))
            if name in self.variables:
                return ("var", name)
            raise ExpressionError(f"unknown identifier {name!r}", tok.offset)
        if tok.kind == "lpar":
            node = self.expr()
            self.expect("rpar", "')'")
            return node
        raise ExpressionError(f"expected a value, found {tok.text or 'end of input'!r}", tok.offset)


def _evaluate(node, env: dict[str, np.ndarray]):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "var":
        return env[node[1]]
    if kind == "neg":
        return -_evaluate(node[1], env)
    if kind == "bin":
        _, op, a, b = node
        va, vb = _evaluate(a, env), _evaluate(b, env)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if op == "+":
                return va + vb
            if op == "-":
                return va - vb
            if op == "*":
                return va * vb
            if op == "/":
                return np.divide(va, vb)
            if op == "^":
                return np.power(va, vb)
    if kind == "call":
        _, fname, args = node
        fn = _FUNCTIONS[fname][1]
        with np.errstate(invalid="ignore", over="ignore"):
            return fn(*[_evaluate(a, env) for a in args])
    raise AssertionError(f"bad node {node!r}")


class Expression:
    """Parsed scalar expression over x (1D) or x, y (2D)."""

    def __init__(self, text: str, d: int = 1):
        if d not in (1, 2):
            raise ValueError(f"d must be 1 or 2, got {d}")
        if not text or not text.strip():
            raise ExpressionError("empty expression", 0)
        self.text = text
        self.d = d
        variables = ("x",) if d == 1 else ("x", "y")
        self._ast = _Parser(_tokenize(text), variables).parse()

    def __repr__(self):
        return f"Expression({self.text!r}, d={self.d})"

    def __call__(self, x, y=None) -> np.ndarray:
        """Evaluate at coordinates; non-finite results raise EvaluationError."""
        x = np.asarray(x, dtype=float)
        env = {"x": x}
        if self.d == 2:
            if y is None:
                raise ValueError("2D expression needs both x and y")
            env["y"] = np.asarray(y, dtype=float)
        out = np.asarray(_evaluate(self._ast, env), dtype=float)
        out = np.broadcast_to(out, x.shape).copy() if out.shape != x.shape else out
        bad = ~np.isfinite(out)
        if np.any(bad):
            i = int(np.argmax(bad.ravel()))
            where = x.ravel()[i] if self.d == 1 else (x.ravel()[i], env["y"].ravel()[i])
            raise EvaluationError(f"expression {self.text!r} is non-finite at {where}")
        return out

    def eval_scalar(self, x: float, y: float | None = None) -> float:
        return float(self(np.asarray([x]), None if y is None else np.asarray([y]))[0])


def parse_expr(text: str, d: int = 1) -> Expression:
    """Parse an expression; raises ExpressionError with a byte offset on bad input."""
    return Expression(text, d)
