"""The .quon diagram language.

    document := stmt* ;
    stmt     := "dim" INT | "let" NAME "=" expr | "let" NAME "=" "braid:" wordtoken+
              | "check" expr "==" expr ["scalar" SCAL] | "eval" expr ;
    expr     := term { ";" term } ;     first-listed applied first (bottom to top)
    term     := atom { "|" atom } ;     horizontal juxtaposition, left wire first
    atom     := "id(" INT ")" | "cap" | "cup" | "bspider(" INT "," INT ")"
              | "wspider(" INT "," INT ")" | "F" | "F2" | "G" | "X" | "Y" | "Z"
              | "CNOT" | "ghz(" INT ")" | "max(" INT ")" | "bell+" | "bell-"
              | NAME | "(" expr ")" ;
    SCAL     := "d^(" FRACTION ")" | complex literal such as 0.5-1.5i

Spider arguments are (inputs, outputs).  ``#`` starts a comment.  The parser is
scannerless recursive descent and keeps source positions for error messages;
positions are excluded from equality so ``parse(render(doc)) == doc``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import GraphError, ParseError
from .numerics import Tensor
from .qudit_core import gate
from .quon_calculus import StrandWord, eval_word, parse_word
from . import spider_engine as se

# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Atom:
    kind: str  # id cap cup bspider wspider gate ghz max bell+ bell-
    args: tuple = ()


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Par:
    parts: tuple  # of Atom | Name | Seq


@dataclass(frozen=True)
class Seq:
    layers: tuple  # of Par


Expr = Union[Atom, Name, Par, Seq]


@dataclass(frozen=True)
class DPower:
    """d^(p/q)."""

    exponent: Fraction

    def value(self, d: int) -> complex:
        return complex(d ** float(self.exponent))


@dataclass(frozen=True)
class CLiteral:
    z: complex

    def value(self, d: int) -> complex:
        return self.z


Scalar = Union[DPower, CLiteral]


@dataclass(frozen=True)
class Dim:
    d: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Let:
    name: str
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class LetBraid:
    name: str
    tokens: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Check:
    lhs: Expr
    rhs: Expr
    scalar: Optional[Scalar] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Eval:
    expr: Expr
    line: int = field(default=0, compare=False)


Stmt = Union[Dim, Let, LetBraid, Check, Eval]


@dataclass(frozen=True)
class Document:
    stmts: tuple = ()

    @property
    def dim(self) -> Optional[int]:
        for s in self.stmts:
            if isinstance(s, Dim):
                return s.d
        return None

    @property
    def definitions(self) -> dict[str, Union[Expr, tuple[str, ...]]]:
        out: dict = {}
        for s in self.stmts:
            if isinstance(s, Let):
                out[s.name] = s.expr
            elif isinstance(s, LetBraid):
                out[s.name] = s.tokens
        return out

    @property
    def checks(self) -> list[Check]:
        return [s for s in self.stmts if isinstance(s, Check)]

    @property
    def evals(self) -> list[Eval]:
        return [s for s in self.stmts if isinstance(s, Eval)]


# ---------------------------------------------------------------------------
# parser

KEYWORDS = {"dim", "let", "check", "eval", "scalar", "braid"}
SIMPLE_ATOMS = ("cap", "cup", "F2", "F", "G", "X", "Y", "Z", "CNOT")
ARG_ATOMS = {"id": 1, "bspider": 2, "wspider": 2, "ghz": 1, "max": 1}
RESERVED = KEYWORDS | set(SIMPLE_ATOMS) | set(ARG_ATOMS) | {"bell"}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"\d+")
_SIGNED = re.compile(r"[+-]?\d+")
_WORD = re.compile(r"(?:b\d+'?|c\d+:[+-]?\d+)(?=\s|#|$)")
_NUM = r"(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
_COMPLEX = re.compile(rf"(?:[+-]?{_NUM}(?:[+-]{_NUM}?i)?|[+-]?{_NUM}?i)(?![\w.])")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.defined: set[str] = set()
        self.stmts: list = []

    # positions
    def where(self, pos: Optional[int] = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, expected, pos: Optional[int] = None):
        pos = self.pos if pos is None else pos
        while pos < len(self.text) and self.text[pos].isspace():
            pos += 1
        m = re.compile(r"\S+").match(self.text, pos)
        found = m.group(0) if m else "end of input"
        line, col = self.where(pos)
        raise ParseError(line, col, list(expected), found)

    def skip(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c.isspace():
                self.pos += 1
            elif c == "#":
                nl = self.text.find("\n", self.pos)
                self.pos = len(self.text) if nl < 0 else nl
            else:
                break

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek_lit(self, lit: str) -> bool:
        self.skip()
        return self.text.startswith(lit, self.pos)

    def lit(self, lit: str) -> None:
        if not self.peek_lit(lit):
            self.fail([repr(lit)])
        self.pos += len(lit)

    def regex(self, pat: re.Pattern, what: str) -> str:
        self.skip()
        m = pat.match(self.text, self.pos)
        if not m or not m.group(0):
            self.fail([what])
        self.pos = m.end()
        return m.group(0)

    def peek_ident(self) -> Optional[str]:
        self.skip()
        m = _IDENT.match(self.text, self.pos)
        return m.group(0) if m else None

    def integer(self) -> int:
        return int(self.regex(_INT, "INT"))

    # grammar
    def document(self) -> Document:
        while not self.at_end():
            self.stmts.append(self.stmt())
        return Document(tuple(self.stmts))

    def stmt(self) -> Stmt:
        start = self.pos
        line = self.where()[0]
        kw = self.peek_ident()
        if kw == "dim":
            self.pos += 3
            if any(isinstance(s, Dim) for s in self.stmts):
                self.fail(["let", "check", "eval"], start)
            d = self.integer()
            if d < 1:
                self.fail(["positive INT"])
            return Dim(d, line)
        if kw == "let":
            self.pos += 3
            name_pos = self.pos
            name = self.regex(_IDENT, "NAME")
            if name in RESERVED:
                self.fail(["NAME"], name_pos)
            if name in self.defined:
                self.fail(["unused NAME"], name_pos)
            self.lit("=")
            if self.peek_ident() == "braid" and self.text.startswith(":", self.pos + 5):
                self.pos += 6
                tokens = []
                while True:
                    self.skip()
                    m = _WORD.match(self.text, self.pos)
                    if not m:
                        break
                    tokens.append(m.group(0))
                    self.pos = m.end()
                if not tokens:
                    self.fail(["wordtoken"])
                self.defined.add(name)
                return LetBraid(name, tuple(tokens), line)
            expr = self.expr()
            self.defined.add(name)
            return Let(name, expr, line)
        if kw == "check":
            self.pos += 5
            lhs = self.expr()
            self.lit("==")
            rhs = self.expr()
            scalar = None
            if self.peek_ident() == "scalar":
                self.pos += 6
                scalar = self.scal()
            return Check(lhs, rhs, scalar, line)
        if kw == "eval":
            self.pos += 4
            return Eval(self.expr(), line)
        self.fail(["dim", "let", "check", "eval"])

    def expr(self) -> Expr:
        layers = [self.term()]
        while self.peek_lit(";"):
            self.pos += 1
            layers.append(self.term())
        return layers[0] if len(layers) == 1 else Seq(tuple(layers))

    def term(self) -> Expr:
        parts = [self.atom()]
        while self.peek_lit("|"):
            self.pos += 1
            parts.append(self.atom())
        return parts[0] if len(parts) == 1 else Par(tuple(parts))

    def atom(self) -> Expr:
        self.skip()
        if self.peek_lit("("):
            self.pos += 1
            e = self.expr()
            self.lit(")")
            return e
        start = self.pos
        ident = self.peek_ident()
        if ident is None:
            self.fail(["atom", "'('"])
        self.pos += len(ident)
        if ident in ARG_ATOMS and self.text.startswith("(", self.pos):
            self.pos += 1
            args = [self.integer()]
            for _ in range(ARG_ATOMS[ident] - 1):
                self.lit(",")
                args.append(self.integer())
            self.lit(")")
            return Atom(ident, tuple(args))
        if ident == "bell" and self.text[self.pos:self.pos + 1] in ("+", "-"):
            sign = self.text[self.pos]
            self.pos += 1
            return Atom("bell" + sign)
        if ident in ("cap", "cup"):
            return Atom(ident)
        if ident in SIMPLE_ATOMS:
            return Atom("gate", (ident,))
        if ident in RESERVED:
            self.fail(["atom"], start)
        if ident not in self.defined:
            self.fail(["defined NAME"], start)
        return Name(ident)

    def scal(self) -> Scalar:
        self.skip()
        if self.text.startswith("d^(", self.pos):
            self.pos += 3
            num = int(self.regex(_SIGNED, "SIGNEDINT"))
            den = 1
            if self.peek_lit("/"):
                self.pos += 1
                den = self.integer()
                if den == 0:
                    self.fail(["nonzero INT"])
            self.lit(")")
            return DPower(Fraction(num, den))
        m = _COMPLEX.match(self.text, self.pos)
        if not m or not m.group(0):
            self.fail(["d^(", "complex literal"])
        self.pos = m.end()
        return CLiteral(complex(m.group(0).replace("i", "j")))


def parse(text: str) -> Document:
    return _Parser(text).document()


# ---------------------------------------------------------------------------
# rendering


def render_expr(e: Expr, top: bool = True) -> str:
    if isinstance(e, Atom):
        if e.kind == "gate":
            return e.args[0]
        if e.args:
            return f"{e.kind}({','.join(str(a) for a in e.args)})"
        return e.kind
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Par):
        return " | ".join(render_expr(p, False) if not isinstance(p, (Par, Seq)) else f"({render_expr(p)})" for p in e.parts)
    if isinstance(e, Seq):
        body = " ; ".join(render_expr(t, False) if not isinstance(t, Seq) else f"({render_expr(t)})" for t in e.layers)
        return body if top else f"({body})"
    raise TypeError(e)


def render_scalar(s: Scalar) -> str:
    if isinstance(s, DPower):
        f = s.exponent
        return f"d^({f.numerator})" if f.denominator == 1 else f"d^({f.numerator}/{f.denominator})"
    z = s.z
    return f"{z.real!r}{z.imag:+}i"


def render(doc: Document) -> str:
    lines = []
    for s in doc.stmts:
        if isinstance(s, Dim):
            lines.append(f"dim {s.d}")
        elif isinstance(s, Let):
            lines.append(f"let {s.name} = {render_expr(s.expr)}")
        elif isinstance(s, LetBraid):
            lines.append(f"let {s.name} = braid: {' '.join(s.tokens)}")
        elif isinstance(s, Check):
            tail = f" scalar {render_scalar(s.scalar)}" if s.scalar is not None else ""
            lines.append(f"check {render_expr(s.lhs)} == {render_expr(s.rhs)}{tail}")
        elif isinstance(s, Eval):
            lines.append(f"eval {render_expr(s.expr)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# semantics


class Env:
    """Builds spider diagrams for the expressions of one document at one d."""

    def __init__(self, doc: Document, d: int):
        self.doc = doc
        self.d = d
        self.defs = doc.definitions
        self._cache: dict[str, se.SpiderDiagram] = {}

    def word(self, name: str) -> StrandWord:
        return parse_word(self.d, " ".join(self.defs[name]))

    def diagram(self, e: Expr) -> se.SpiderDiagram:
        d = self.d
        if isinstance(e, Seq):
            return se.compose_all(*(self.diagram(t) for t in e.layers))
        if isinstance(e, Par):
            return se.tensor_all(*(self.diagram(p) for p in e.parts))
        if isinstance(e, Name):
            if e.name not in self._cache:
                body = self.defs[e.name]
                if isinstance(body, tuple):
                    self._cache[e.name] = se.named_box(d, e.name, eval_word(self.word(e.name)))
                else:
                    self._cache[e.name] = self.diagram(body)
            return self._cache[e.name]
        return atom_diagram(d, e)

    def tensor(self, e: Expr) -> Tensor:
        return se.eval_tensor(self.diagram(e))


def atom_diagram(d: int, a: Atom) -> se.SpiderDiagram:
    k = a.kind
    if k == "id":
        return se.identity(d, a.args[0])
    if k == "cap":
        return se.black(d, 2, 0)
    if k == "cup":
        return se.black(d, 0, 2)
    if k == "bspider":
        return se.black(d, *a.args)
    if k == "wspider":
        return se.white(d, *a.args)
    if k == "gate":
        name = a.args[0]
        if name == "F":
            return se.fbox(d, 1)
        if name == "F2":
            return se.fbox(d, 2)
        return se.named_box(d, name, gate(d, name))
    if k == "ghz":
        return se.with_scalar(se.black(d, 0, a.args[0]), d ** -0.5)
    if k == "max":
        n = a.args[0]
        return se.with_scalar(se.white(d, 0, n), d ** ((1 - n) / 2))
    if k == "bell+":
        return se.with_scalar(se.black(d, 0, 2), d ** -0.5)
    if k == "bell-":
        return se.with_scalar(se.white(d, 0, 2), d ** -0.5)
    raise GraphError(f"unknown atom {k!r}")
