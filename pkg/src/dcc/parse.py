"""Recursive-descent parser for the concrete syntax.

Types::

    t ::= t -> t | t + t | t * t | t ^ l | unit | T[l](t) | W[l](t) | (t)

with ``^`` binding tightest, then ``*``, ``+`` and ``->``; binary forms
associate to the right.

Terms::

    e ::= fun x:t. e | case e of x. e | x. e | bind x = e in e
        | e @ l | e e | proj1 e | inj2 e | eta[l] e | weta[l] e | weaken e
        | () | x | (e, e) | (e)

Levels are lattice element names, ``!l`` names a blame, and ``l,!m``
(bracketed after ``^`` and ``@``) a joined index.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from dcc.lattice import Index, IndexLattice, UnknownElement
from dcc.syntax import (
    UNIT,
    Abs,
    App,
    Bind,
    Case,
    Fun,
    Inj,
    Open,
    Pair,
    Prod,
    Proj,
    Span,
    Strong,
    StrongRet,
    Sum,
    Taint,
    Term,
    Type,
    UnitV,
    Var,
    Weak,
    WeakRet,
    Weaken,
    all_vars,
    free_vars,
    fresh,
    subst,
)


class ParseError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{message} at bytes {span.start}-{span.end}")
        self.message = message
        self.span = span


class UnknownLevelName(ParseError):
    pass


KEYWORDS = {
    "fun", "case", "of", "bind", "in", "proj1", "proj2", "inj1", "inj2",
    "eta", "weta", "weaken", "unit",
}  # fmt: skip

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<arrow>->)
  | (?P<unitv>\(\s*\))
  | (?P<ident>[^\W\d]\w*'*)
  | (?P<sym>[()\[\],.:=|^@*+!])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    # byte offsets, as reported in spans
    offsets = [0]
    for ch in text:
        offsets.append(offsets[-1] + len(ch.encode("utf-8")))
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", Span(offsets[pos], offsets[pos + 1]))
        kind = m.lastgroup or ""
        if kind != "ws":
            tok = m.group()
            if kind == "sym" or kind == "arrow":
                kind = tok
            elif kind == "unitv":
                kind = "()"
            elif kind == "ident" and tok in KEYWORDS:
                kind = tok
            out.append(Token(kind, tok, offsets[m.start()], offsets[m.end()]))
        pos = m.end()
    out.append(Token("eof", "", offsets[-1], offsets[-1]))
    return out


class Parser:
    def __init__(self, text: str, lat: IndexLattice):
        self.toks = tokenize(text)
        self.pos = 0
        self.lat = lat

    # -- helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {self.tok.text or 'end of input'!r}", self.span_here())
        return self.advance()

    def span_here(self) -> Span:
        return Span(self.tok.start, self.tok.end)

    def span_from(self, start: int) -> Span:
        return Span(start, self.toks[self.pos - 1].end)

    def finish(self) -> None:
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self.tok.text!r}", self.span_here())

    # -- indices
    def index_list(self) -> Index:
        out = self.lat.bottom
        while True:
            out = self.lat.join(out, self.index_atom())
            if self.tok.kind != ",":
                return out
            self.advance()

    def index_atom(self) -> Index:
        start = self.tok.start
        blame = False
        if self.tok.kind == "!":
            self.advance()
            blame = True
        name = self.tok
        if name.kind != "ident":
            raise ParseError("expected a level name", self.span_here())
        self.advance()
        try:
            return self.lat.beta(name.text) if blame else self.lat.level(name.text)
        except UnknownElement:
            raise UnknownLevelName(f"unknown level {name.text!r}", self.span_from(start)) from None

    def postfix_index(self) -> Index:
        if self.tok.kind == "[":
            self.advance()
            idx = self.index_list()
            self.expect("]")
            return idx
        return self.index_atom()

    def bracket_index(self) -> Index:
        self.expect("[")
        idx = self.index_list()
        self.expect("]")
        return idx

    # -- types
    def type_(self) -> Type:
        left = self.type_sum()
        if self.tok.kind == "->":
            self.advance()
            return Fun(left, self.type_())
        return left

    def type_sum(self) -> Type:
        left = self.type_prod()
        if self.tok.kind == "+":
            self.advance()
            return Sum(left, self.type_sum())
        return left

    def type_prod(self) -> Type:
        left = self.type_open()
        if self.tok.kind == "*":
            self.advance()
            return Prod(left, self.type_prod())
        return left

    def type_open(self) -> Type:
        t = self.type_atom()
        while self.tok.kind == "^":
            self.advance()
            t = Open(t, self.postfix_index())
        return t

    def type_atom(self) -> Type:
        tok = self.tok
        if tok.kind == "unit":
            self.advance()
            return UNIT
        if tok.kind == "ident" and tok.text in ("T", "W") and self.peek().kind == "[":
            self.advance()
            idx = self.bracket_index()
            self.expect("(")
            body = self.type_()
            self.expect(")")
            return Strong(idx, body) if tok.text == "T" else Weak(idx, body)
        if tok.kind == "(":
            self.advance()
            t = self.type_()
            self.expect(")")
            return t
        raise ParseError(f"expected a type, found {tok.text or 'end of input'!r}", self.span_here())

    # -- terms
    def binder_name(self) -> str:
        tok = self.expect("ident")
        return tok.text

    def term(self) -> Term:
        start = self.tok.start
        kind = self.tok.kind
        if kind == "fun":
            self.advance()
            x = self.binder_name()
            self.expect(":")
            ann = self.type_()
            self.expect(".")
            body = self.term()
            return Abs(x, ann, body, span=self.span_from(start))
        if kind == "case":
            self.advance()
            scrut = self.term()
            self.expect("of")
            x = self.binder_name()
            self.expect(".")
            left = self.term()
            self.expect("|")
            y = self.binder_name()
            self.expect(".")
            right = self.term()
            if y != x:
                if x in free_vars(right):
                    z = fresh(x, all_vars(left) | all_vars(right) | {y})
                    left = subst(left, x, Var(z))
                    x = z
                right = subst(right, y, Var(x))
            return Case(scrut, x, left, right, span=self.span_from(start))
        if kind == "bind":
            self.advance()
            x = self.binder_name()
            self.expect("=")
            bound = self.term()
            self.expect("in")
            body = self.term()
            return Bind(x, bound, body, span=self.span_from(start))
        e = self.application()
        while self.tok.kind == "@":
            self.advance()
            e = Taint(e, self.postfix_index(), span=self.span_from(start))
        return e

    def application(self) -> Term:
        start = self.tok.start
        e = self.prefix()
        while self.starts_prefix():
            arg = self.prefix()
            e = App(e, arg, span=self.span_from(start))
        return e

    def starts_prefix(self) -> bool:
        return self.tok.kind in ("ident", "(", "()", "proj1", "proj2", "inj1", "inj2", "eta", "weta", "weaken")

    def prefix(self) -> Term:
        start = self.tok.start
        kind = self.tok.kind
        if kind in ("proj1", "proj2"):
            self.advance()
            return Proj(int(kind[-1]), self.prefix(), span=self.span_from(start))
        if kind in ("inj1", "inj2"):
            self.advance()
            return Inj(int(kind[-1]), self.prefix(), span=self.span_from(start))
        if kind in ("eta", "weta"):
            self.advance()
            idx = self.bracket_index()
            body = self.prefix()
            cls = StrongRet if kind == "eta" else WeakRet
            return cls(idx, body, span=self.span_from(start))
        if kind == "weaken":
            self.advance()
            return Weaken(self.prefix(), span=self.span_from(start))
        return self.atom()

    def atom(self) -> Term:
        start = self.tok.start
        tok = self.tok
        if tok.kind == "()":
            self.advance()
            return UnitV(span=self.span_from(start))
        if tok.kind == "ident":
            self.advance()
            return Var(tok.text, span=self.span_from(start))
        if tok.kind == "(":
            self.advance()
            e = self.term()
            if self.tok.kind == ",":
                self.advance()
                right = self.term()
                self.expect(")")
                return Pair(e, right, span=self.span_from(start))
            self.expect(")")
            return e
        raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", self.span_here())


def parse_type(text: str, lat: IndexLattice) -> Type:
    p = Parser(text, lat)
    t = p.type_()
    p.finish()
    return t


def parse_term(text: str, lat: IndexLattice) -> Term:
    p = Parser(text, lat)
    e = p.term()
    p.finish()
    return e
