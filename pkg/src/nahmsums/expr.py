"""A small expression language for eta/theta quotients.

Grammar (whitespace ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)?
    atom   := INT | call | "(" expr ")"
    call   := eta(s) | theta5(j, s) | qpow(e) | nahm(path)
            | lattice(c, x) | altlattice(c, x)

Function arguments are rationals written ``p/q`` (optionally signed).
``lattice(c, x)`` is sum_{m in Z} q^(c (m + x)^2) and ``altlattice`` adds the
sign (-1)^m.  ``nahm(path)`` loads a triple JSON file and expands its Nahm sum.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .errors import ParseError
from .qseries import QSeries, eta, lattice_theta, nahm_sum, qpow, theta5
from .system import NahmTriple, parse_rational

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")

# each builder takes the parsed args and a target order
_FUNCS: dict[str, tuple[int, Callable]] = {
    "eta": (1, lambda a, o: eta(a[0], o)),
    "theta5": (2, lambda a, o: theta5(a[0], a[1], o)),
    "qpow": (1, lambda a, o: qpow(a[0])),
    "lattice": (2, lambda a, o: lattice_theta(a[0], a[1], o)),
    "altlattice": (2, lambda a, o: lattice_theta(a[0], a[1], o, alternating=True)),
}


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple

    def evaluate(self, order, base: Path | None = None) -> QSeries:
        if self.op == "int":
            return QSeries.constant(self.args[0])
        if self.op == "call":
            name, params = self.args
            if name == "nahm":
                path = Path(params)
                if base is not None and not path.is_absolute():
                    path = base / path
                return nahm_sum(NahmTriple.load(path), order)
            return _FUNCS[name][1](params, order)
        if self.op == "neg":
            return -self.args[0].evaluate(order, base)
        if self.op == "pow":
            return self.args[0].evaluate(order, base) ** self.args[1]
        lhs = self.args[0].evaluate(order, base)
        rhs = self.args[1].evaluate(order, base)
        return {"+": lhs.__add__, "-": lhs.__sub__, "*": lhs.__mul__, "/": lhs.__truediv__}[self.op](rhs)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> ParseError:
        return ParseError(f"{msg} at position {self.pos} in {self.text!r}")

    def peek(self) -> str | None:
        m = _TOKEN.match(self.text, self.pos)
        if not m or m.end() == self.pos or not m.group(0).strip():
            return None
        return m.group(1) or m.group(2) or m.group(3)

    def take(self) -> str:
        m = _TOKEN.match(self.text, self.pos)
        if not m or not m.group(0).strip():
            raise self.error("unexpected end of input")
        self.pos = m.end()
        return m.group(1) or m.group(2) or m.group(3)

    def expect(self, tok: str) -> None:
        got = self.take()
        if got != tok:
            raise self.error(f"expected {tok!r}, got {got!r}")

    def parse(self) -> Node:
        node = self.expr()
        if self.peek() is not None:
            raise self.error(f"trailing input {self.peek()!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            node = Node(op, (node, self.term()))
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            node = Node(op, (node, self.unary()))
        return node

    def unary(self) -> Node:
        if self.peek() == "-":
            self.take()
            return Node("neg", (self.unary(),))
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.peek() == "^":
            self.take()
            tok = self.take()
            if not tok.isdigit():
                raise self.error("exponent must be a non-negative integer")
            node = Node("pow", (node, int(tok)))
        return node

    def atom(self) -> Node:
        tok = self.take()
        if tok.isdigit():
            return Node("int", (int(tok),))
        if tok == "(":
            node = self.expr()
            self.expect(")")
            return node
        if tok == "nahm":
            self.expect("(")
            end = self.text.find(")", self.pos)
            if end < 0:
                raise self.error("unterminated nahm(...)")
            path = self.text[self.pos:end].strip()
            self.pos = end + 1
            if not path:
                raise self.error("nahm() needs a file path")
            return Node("call", ("nahm", path))
        if tok in _FUNCS:
            self.expect("(")
            end = self.text.find(")", self.pos)
            if end < 0:
                raise self.error(f"unterminated {tok}(...)")
            raw = [s.strip() for s in self.text[self.pos:end].split(",")]
            self.pos = end + 1
            if len(raw) != _FUNCS[tok][0]:
                raise self.error(f"{tok} takes {_FUNCS[tok][0]} argument(s)")
            try:
                params = tuple(parse_rational(s) for s in raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise self.error(f"bad argument list {raw}: {exc}") from None
            return Node("call", (tok, params))
        raise self.error(f"unexpected token {tok!r}")


def parse_expression(text: str) -> Node:
    return _Parser(text).parse()


def evaluate(text: str | Node, order, base: Path | None = None) -> QSeries:
    """Expand an expression so that it is known at least below ``order``.

    Leaves are built with a safety margin that grows until the result's
    propagated order reaches the target; the result is then truncated.
    """
    node = parse_expression(text) if isinstance(text, str) else text
    order = Fraction(order)
    margin = Fraction(2)
    for _ in range(8):
        series = node.evaluate(order + margin, base)
        if series.order >= order:
            return series.truncate(order)
        margin = 2 * margin + (order - series.order)
    raise ParseError(f"could not reach order {order} (got {series.order})")
