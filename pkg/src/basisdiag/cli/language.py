"""Textual diagram language: parser and printer.

    term  := par (">>" par)*          sequential, read left to right (bottom to top)
    par   := atom ("||" atom)*        parallel; binds tighter than ">>"
    atom  := id(types) | swap(t, t) | delta(t) | gamma(t) | dualiser(t) | cap(t) | cup(t)
           | dag(term) | transp(term) | conj(term) | box(name : types -> types)
           | scalar(a+bi) | dim(obj) | spider(obj ; types -> types) | ( term )
    type  := name | name "*"

``#`` starts a comment that runs to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .. import diagram as dg
from ..diagram import BOUNDARY, Diagram, Generator, Kind, Port, WireType
from ..errors import BasisDiagError, ParseError

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<seq>>>)
  | (?P<par>\|\|)
  | (?P<arrow>->)
  | (?P<complex>[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:[+-](?:\d+(?:\.\d*)?|\.\d+)?(?:[eE][+-]?\d+)?i|i)?
                |[+-]?i(?![A-Za-z0-9_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),:;*])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "name" and text == "i":
            kind = "complex"
        if kind != "ws":
            tokens.append(Token(kind if kind != "punct" else text, text, line, pos - line_start + 1))
        for k, ch in enumerate(text):
            if ch == "\n":
                line += 1
                line_start = pos + k + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


ATOMS = ("id", "swap", "delta", "gamma", "dualiser", "cap", "cup", "dag", "transp", "conj",
         "box", "scalar", "dim", "spider")


def parse_complex(text: str) -> complex:
    t = text.replace(" ", "")
    if t.endswith("i"):
        t = t[:-1] + "j"
        if t in ("j", "+j", "-j"):
            t = t.replace("j", "1j")
        elif t[-2] in "+-":
            t = t[:-1] + "1j"
    return complex(t)


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, expected=(), tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col, expected)

    def eat(self, kind: str) -> Token:
        if self.tok.kind != kind:
            shown = self.tok.text or "end of input"
            self.fail(f"unexpected {shown!r}", (repr(kind),))
        t = self.tok
        self.i += 1
        return t

    def at(self, kind: str) -> bool:
        return self.tok.kind == kind

    def parse(self) -> Diagram:
        d = self.term()
        if not self.at("eof"):
            self.fail(f"unexpected {self.tok.text!r}", ("'>>'", "'||'", "end of input"))
        return d

    def term(self) -> Diagram:
        parts = [self.par()]
        while self.at("seq"):
            op = self.eat("seq")
            nxt = self.par()
            try:
                parts[0] = dg.then(parts[0], nxt)
            except BasisDiagError as e:
                raise ParseError(str(e), op.line, op.col) from None
        return parts[0]

    def par(self) -> Diagram:
        d = self.atom()
        while self.at("par"):
            self.eat("par")
            d = dg.tensor(d, self.atom())
        return d

    def wtype(self) -> WireType:
        name = self.eat("name").text
        if self.at("*"):
            self.eat("*")
            return WireType(name, True)
        return WireType(name, False)

    def types(self, stop: tuple[str, ...]) -> list[WireType]:
        out: list[WireType] = []
        if self.tok.kind in stop:
            return out
        out.append(self.wtype())
        while self.at(","):
            self.eat(",")
            out.append(self.wtype())
        return out

    def atom(self) -> Diagram:
        t = self.tok
        if t.kind == "(":
            self.eat("(")
            d = self.term()
            self.eat(")")
            return d
        if t.kind != "name" or t.text not in ATOMS:
            self.fail(f"unexpected {t.text or 'end of input'!r}", ("'('",) + tuple(repr(a) for a in ATOMS))
        head = self.eat("name").text
        self.eat("(")
        if head == "id":
            d = dg.identity(self.types((")",)))
        elif head == "swap":
            a = self.wtype()
            self.eat(",")
            d = dg.swap(a, self.wtype())
        elif head in ("delta", "gamma", "dualiser", "cap", "cup"):
            d = getattr(dg, head)(self.wtype())
        elif head in ("dag", "transp", "conj"):
            inner = self.term()
            d = {"dag": dg.dagger, "transp": dg.transpose, "conj": dg.conjugate}[head](inner)
        elif head == "box":
            name = self.eat("name").text
            self.eat(":")
            dom = self.types(("arrow",))
            self.eat("arrow")
            cod = self.types((")",))
            d = dg.box(name, dom, cod)
        elif head == "scalar":
            d = dg.scalar(parse_complex(self.eat("complex").text))
        elif head == "dim":
            d = dg.dimension(self.eat("name").text)
        else:  # spider
            obj = self.eat("name").text
            self.eat(";")
            ins = self.types(("arrow",))
            self.eat("arrow")
            outs = self.types((")",))
            bad = [w for w in ins + outs if w.object != obj]
            if bad:
                self.fail(f"spider on {obj} has a leg of type {bad[0]}", tok=t)
            d = dg.spider(obj, ins, outs)
        self.eat(")")
        return d


def parse(src: str) -> Diagram:
    """Parse the diagram language; errors carry line, column and the expected tokens."""
    return _Parser(src).parse()


# ------------------------------------------------------------------ printer


def format_complex(c: complex) -> str:
    c = complex(c)
    return f"{c.real:.12g}{c.imag:+.12g}i"


def generator_text(g: Generator) -> str:
    k = g.kind
    if k is Kind.BOX:
        dom = ", ".join(map(str, g.dom))
        cod = ", ".join(map(str, g.cod))
        core = f"box({g.name} : {dom} -> {cod})"
        wrap = {"plain": "{}", "dagger": "dag({})", "transpose": "transp({})",
                "conjugate": "conj({})"}[g.variant]
        return wrap.format(core)
    if k is Kind.SCALAR:
        return f"dim({g.wire.object})" if g.name == "dim" else f"scalar({format_complex(g.value)})"
    if k is Kind.SPIDER:
        ins = ", ".join(map(str, g.dom))
        outs = ", ".join(map(str, g.cod))
        return f"spider({g.wire.object} ; {ins} -> {outs})"
    base = {
        Kind.DELTA: "delta", Kind.DELTA_DAGGER: "delta", Kind.GAMMA: "gamma",
        Kind.GAMMA_DAGGER: "gamma", Kind.DUALISER: "dualiser", Kind.DUALISER_DAGGER: "dualiser",
        Kind.CAP: "cap", Kind.CUP: "cup",
    }[k]
    text = f"{base}({g.wire})"
    if k in (Kind.DELTA_DAGGER, Kind.GAMMA_DAGGER, Kind.DUALISER_DAGGER):
        text = f"dag({text})"
    return text


def _ids(types) -> list[str]:
    return [f"id({t})" for t in types]


def _layer(parts: list[str]) -> str:
    return " || ".join(parts) if parts else "id()"


def to_text(f: Diagram) -> str:
    """Linearise ``f`` into layers; wires are routed with adjacent swaps."""
    frontier: list[Port] = [Port(BOUNDARY, "in", i) for i in range(len(f.dom))]
    types = list(f.dom)
    layers: list[str] = []

    def route(target: list[Port]) -> None:
        # bubble the frontier into the order given by ``target``
        rank = {p: k for k, p in enumerate(target)}
        n = len(frontier)
        for _ in range(n):
            moved = False
            for j in range(n - 1):
                if rank[frontier[j]] > rank[frontier[j + 1]]:
                    parts = _ids(types[:j]) + [f"swap({types[j]}, {types[j + 1]})"] + _ids(types[j + 2:])
                    layers.append(_layer(parts))
                    frontier[j], frontier[j + 1] = frontier[j + 1], frontier[j]
                    types[j], types[j + 1] = types[j + 1], types[j]
                    moved = True
            if not moved:
                break

    for nid in dg.topological_order(f):
        g = f.nodes[nid]
        ins, outs = g.signature()
        sources = [f.partner(Port(nid, "in", i)) for i in range(len(ins))]
        if not sources:
            at = len(frontier)
        else:
            at = frontier.index(sources[0])
            if frontier[at:at + len(sources)] != sources:
                # gather the inputs just after the wires that stay to their left
                rest = [p for p in frontier if p not in sources]
                at = min(at, len(rest))
                route(rest[:at] + sources + rest[at:])
        layers.append(_layer(_ids(types[:at]) + [generator_text(g)] + _ids(types[at + len(ins):])))
        frontier[at: at + len(ins)] = [Port(nid, "out", i) for i in range(len(outs))]
        types[at: at + len(ins)] = list(outs)
    route([f.partner(Port(BOUNDARY, "out", i)) for i in range(len(f.cod))])
    if not layers:
        return _layer(_ids(types))
    return " >> ".join(f"({x})" if " || " in x and len(layers) > 1 else x for x in layers)
