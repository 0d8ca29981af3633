"""Scalar-field expressions for metric data.

Grammar (precedence low to high): ``+ -`` < ``* /`` < unary ``-`` < ``^``
(right associative). Atoms are real literals, ``x1``..``x4``, parenthesized
expressions and calls of ``sqrt``, ``exp``, ``sin``, ``cos``. The exponent
of ``^`` must be a constant expression.

Evaluation is generic over the value type: floats and :class:`~abfinsler.jet.Jet`
both work, which is how metric data gets its base derivatives.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .jet import Jet, JetDomainError

FUNCTIONS = ("sqrt", "exp", "sin", "cos")
MAX_VARS = 4


class ExprSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line, self.col = line, col


class ExprDomainError(ValueError):
    def __init__(self, msg: str, node: "Expr"):
        line, col = node.pos
        super().__init__(f"{msg} (in '{to_text(node)}' at line {line}, column {col})")
        self.node = node


@dataclass(frozen=True)
class Expr:
    pos: tuple[int, int] = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Num(Expr):
    value: float = 0.0


@dataclass(frozen=True)
class Var(Expr):
    index: int = 0  # zero-based; x1 -> 0


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr = None


@dataclass(frozen=True)
class BinOp(Expr):
    op: str = "+"
    left: Expr = None
    right: Expr = None


@dataclass(frozen=True)
class Call(Expr):
    func: str = "sqrt"
    arg: Expr = None


# tokenizer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks, i, line, lstart = [], 0, 1, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[i]!r}", line, i - lstart + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, lstart = line + 1, m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, i - lstart + 1))
        i = m.end()
    toks.append(_Tok("end", "", line, i - lstart + 1))
    return toks


# Pratt parser ---------------------------------------------------------------

_BINDING = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_BP = 30


class _Parser:
    def __init__(self, text: str, nvars: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.nvars = nvars

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            found = t.text or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", t.line, t.col)
        return t

    def parse(self, rbp: int = 0) -> Expr:
        t = self.next()
        left = self.nud(t)
        while True:
            nt = self.peek()
            lbp = _BINDING.get(nt.text, 0) if nt.kind == "op" else 0
            if lbp <= rbp:
                break
            self.next()
            left = self.led(nt, left)
        return left

    def nud(self, t: _Tok) -> Expr:
        pos = (t.line, t.col)
        if t.kind == "num":
            return Num(pos, float(t.text))
        if t.kind == "name":
            m = re.fullmatch(r"x([1-9])", t.text)
            if m:
                idx = int(m.group(1)) - 1
                if idx >= self.nvars:
                    raise ExprSyntaxError(
                        f"variable {t.text} exceeds chart dimension {self.nvars}", t.line, t.col
                    )
                return Var(pos, idx)
            if t.text in FUNCTIONS:
                if self.peek().text != "(":
                    nt = self.peek()
                    raise ExprSyntaxError(f"function {t.text} needs one argument", nt.line, nt.col)
                self.next()
                if self.peek().text == ")":
                    nt = self.peek()
                    raise ExprSyntaxError(f"function {t.text} takes exactly 1 argument, got 0", nt.line, nt.col)
                arg = self.parse(0)
                if self.peek().text == ",":
                    nt = self.peek()
                    raise ExprSyntaxError(f"function {t.text} takes exactly 1 argument", nt.line, nt.col)
                self.expect(")")
                return Call(pos, t.text, arg)
            raise ExprSyntaxError(f"unknown identifier {t.text!r}", t.line, t.col)
        if t.text == "(":
            e = self.parse(0)
            self.expect(")")
            return e
        if t.text == "-":
            return Neg(pos, self.parse(_UNARY_BP))
        if t.text == "+":
            return self.parse(_UNARY_BP)
        found = t.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", t.line, t.col)

    def led(self, t: _Tok, left: Expr) -> Expr:
        pos = (t.line, t.col)
        if t.text == "^":
            right = self.parse(_BINDING["^"] - 1)
            if _has_vars(right):
                raise ExprSyntaxError("exponent of '^' must be a constant expression", t.line, t.col)
            return BinOp(pos, "^", left, right)
        return BinOp(pos, t.text, left, self.parse(_BINDING[t.text]))


def _has_vars(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, Num):
        return False
    if isinstance(e, (Neg, Call)):
        return _has_vars(e.arg)
    return _has_vars(e.left) or _has_vars(e.right)


def parse(text: str, nvars: int = MAX_VARS) -> Expr:
    """Parse ``text`` into an expression tree over ``x1..x{nvars}``."""
    p = _Parser(text, nvars)
    e = p.parse(0)
    t = p.peek()
    if t.kind != "end":
        raise ExprSyntaxError(f"unexpected {t.text!r}", t.line, t.col)
    return e


def to_text(e: Expr) -> str:
    """Fully parenthesized rendering that parses back to the same tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return f"x{e.index + 1}"
    if isinstance(e, Neg):
        return f"(-{to_text(e.arg)})"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    return f"({to_text(e.left)} {e.op} {to_text(e.right)})"


def variables(e: Expr) -> set[int]:
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, Num):
        return set()
    if isinstance(e, (Neg, Call)):
        return variables(e.arg)
    return variables(e.left) | variables(e.right)


# evaluation -------------------------------------------------------------------

def _apply(func: str, v: Any, node: Expr) -> Any:
    if isinstance(v, Jet):
        try:
            return getattr(v, func)()
        except JetDomainError as exc:
            raise ExprDomainError(str(exc), node) from None
    if func == "sqrt" and v < 0:
        raise ExprDomainError(f"sqrt of negative value {v}", node)
    return getattr(math, func)(v)


def _const(e: Expr) -> float:
    return float(evaluate(e, ()))


def evaluate(e: Expr, xs: Sequence[Any], cache: dict | None = None) -> Any:
    """Evaluate on floats or jets; ``cache`` memoizes structurally equal subtrees."""
    if cache is not None:
        hit = cache.get(e)
        if hit is not None:
            return hit
    if isinstance(e, Num):
        out = e.value
    elif isinstance(e, Var):
        if e.index >= len(xs):
            raise ExprDomainError(f"variable x{e.index + 1} not supplied", e)
        out = xs[e.index]
    elif isinstance(e, Neg):
        out = -evaluate(e.arg, xs, cache)
    elif isinstance(e, Call):
        out = _apply(e.func, evaluate(e.arg, xs, cache), e)
    else:
        a = evaluate(e.left, xs, cache)
        if e.op == "^":
            r = _const(e.right)
            try:
                out = a ** r
            except JetDomainError as exc:
                raise ExprDomainError(str(exc), e) from None
            except (ZeroDivisionError, ValueError) as exc:
                raise ExprDomainError(str(exc), e) from None
            if isinstance(out, complex):
                raise ExprDomainError(f"real power {r} of negative value", e)
        else:
            b = evaluate(e.right, xs, cache)
            if e.op == "+":
                out = a + b
            elif e.op == "-":
                out = a - b
            elif e.op == "*":
                out = a * b
            else:
                if not isinstance(b, Jet) and b == 0:
                    raise ExprDomainError("division by zero", e)
                try:
                    out = a / b
                except JetDomainError as exc:
                    raise ExprDomainError(str(exc), e) from None
    if cache is not None:
        cache[e] = out
    return out


def eval_jet(e: Expr, x_jets: Sequence[Jet], cache: dict | None = None) -> Jet:
    """Jet-valued evaluation; constants are promoted to jets."""
    out = evaluate(e, x_jets, cache)
    if not isinstance(out, Jet):
        ref = x_jets[0]
        out = Jet.constant(out, ref.n, ref.deg_y, ref.deg_x)
    return out


def eval_float(e: Expr, x: Sequence[float]) -> float:
    return float(evaluate(e, [float(v) for v in x]))


def compile_all(texts: Mapping[str, str] | Sequence[str], nvars: int):
    if isinstance(texts, Mapping):
        return {k: parse(v, nvars) for k, v in texts.items()}
    return [parse(t, nvars) for t in texts]
