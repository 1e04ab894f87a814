"""Open string diagrams as port graphs over oriented wire types.

A :class:`Diagram` is an immutable directed acyclic port graph.  Every port
(node port or boundary port) is the endpoint of exactly one edge, and every
edge carries a :class:`WireType` -- an object together with a flag telling
whether the wire is the object itself or its dual.  Symmetries and
identities are pure wiring, so two diagrams that differ only by symmetric
monoidal coherence produce the same port graph.

Composition reads like the pictures: ``compose(g, f)`` is ``g`` after ``f``;
:func:`then` is the left-to-right version used by the textual language.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .errors import InvalidDiagram, SignatureMismatch


@dataclass(frozen=True, order=True)
class WireType:
    object: str
    dualized: bool = False

    @property
    def dual(self) -> "WireType":
        return WireType(self.object, not self.dualized)

    def __str__(self) -> str:
        return self.object + ("*" if self.dualized else "")

    @classmethod
    def parse(cls, text: str) -> "WireType":
        text = text.strip()
        if text.endswith("*"):
            return cls(text[:-1].strip(), True)
        return cls(text, False)


TypeLike = Union[WireType, str]


def wire(x: TypeLike) -> WireType:
    return x if isinstance(x, WireType) else WireType.parse(x)


def wires(xs: Union[TypeLike, Iterable[TypeLike]]) -> tuple[WireType, ...]:
    if isinstance(xs, (WireType, str)):
        return (wire(xs),)
    return tuple(wire(x) for x in xs)


def dual_reversed(ts: Sequence[WireType]) -> tuple[WireType, ...]:
    return tuple(t.dual for t in reversed(ts))


class Kind(str, Enum):
    DELTA = "delta"
    DELTA_DAGGER = "delta_dagger"
    GAMMA = "gamma"
    GAMMA_DAGGER = "gamma_dagger"
    DUALISER = "dualiser"
    DUALISER_DAGGER = "dualiser_dagger"
    CAP = "cap"
    CUP = "cup"
    BOX = "box"
    SCALAR = "scalar"
    SPIDER = "spider"


#: Generators that belong to a basis structure (the spider fragment).
BASIS_KINDS = frozenset({
    Kind.DELTA, Kind.DELTA_DAGGER, Kind.GAMMA, Kind.GAMMA_DAGGER,
    Kind.DUALISER, Kind.DUALISER_DAGGER, Kind.CAP, Kind.CUP,
})

_DAGGER_KIND = {
    Kind.DELTA: Kind.DELTA_DAGGER, Kind.DELTA_DAGGER: Kind.DELTA,
    Kind.GAMMA: Kind.GAMMA_DAGGER, Kind.GAMMA_DAGGER: Kind.GAMMA,
    Kind.DUALISER: Kind.DUALISER_DAGGER, Kind.DUALISER_DAGGER: Kind.DUALISER,
}

# Box variants as (dagger bit, transpose bit); conjugate = dagger o transpose.
VARIANTS = {"plain": (0, 0), "dagger": (1, 0), "transpose": (0, 1), "conjugate": (1, 1)}
_VARIANT_NAME = {bits: name for name, bits in VARIANTS.items()}


def combine_variants(a: str, b: str) -> str:
    x, y = VARIANTS[a], VARIANTS[b]
    return _VARIANT_NAME[(x[0] ^ y[0], x[1] ^ y[1])]


@dataclass(frozen=True)
class Generator:
    """One node label.

    ``wire`` is the object a structural generator acts on (possibly a dual).
    Boxes carry their *plain* signature in ``dom``/``cod``; the node's
    actual ports follow from ``variant``.  Spiders carry their leg types in
    ``dom``/``cod`` and their base object in ``wire``.
    """

    kind: Kind
    wire: WireType | None = None
    name: str | None = None
    variant: str = "plain"
    dom: tuple[WireType, ...] = ()
    cod: tuple[WireType, ...] = ()
    value: complex = 0j

    def inputs(self) -> tuple[WireType, ...]:
        return self.signature()[0]

    def outputs(self) -> tuple[WireType, ...]:
        return self.signature()[1]

    def signature(self) -> tuple[tuple[WireType, ...], tuple[WireType, ...]]:
        k, x = self.kind, self.wire
        if k is Kind.DELTA:
            return (x,), (x, x)
        if k is Kind.DELTA_DAGGER:
            return (x, x), (x,)
        if k is Kind.GAMMA:
            return (x,), ()
        if k is Kind.GAMMA_DAGGER:
            return (), (x,)
        if k is Kind.DUALISER:
            return (x,), (x.dual,)
        if k is Kind.DUALISER_DAGGER:
            return (x.dual,), (x,)
        if k is Kind.CAP:
            return (x, x.dual), ()
        if k is Kind.CUP:
            return (), (x.dual, x)
        if k is Kind.SCALAR:
            return (), ()
        if k is Kind.SPIDER:
            return self.dom, self.cod
        # box
        d, c = self.dom, self.cod
        return {
            "plain": (d, c),
            "dagger": (c, d),
            "transpose": (dual_reversed(c), dual_reversed(d)),
            "conjugate": (dual_reversed(d), dual_reversed(c)),
        }[self.variant]

    def dagger(self) -> "Generator":
        k = self.kind
        if k in _DAGGER_KIND:
            return replace(self, kind=_DAGGER_KIND[k])
        if k is Kind.CAP:
            return Generator(Kind.CUP, self.wire.dual)
        if k is Kind.CUP:
            return Generator(Kind.CAP, self.wire.dual)
        if k is Kind.BOX:
            return replace(self, variant=combine_variants(self.variant, "dagger"))
        if k is Kind.SCALAR:
            return replace(self, value=complex(self.value).conjugate())
        return replace(self, dom=self.cod, cod=self.dom)

    def rotate(self) -> "Generator":
        """The 180-degree rotation (transpose); port order is reversed."""
        k, x = self.kind, self.wire
        if k in (Kind.DELTA, Kind.DELTA_DAGGER, Kind.GAMMA, Kind.GAMMA_DAGGER):
            return Generator(_DAGGER_KIND[k], x.dual)
        if k in (Kind.DUALISER, Kind.DUALISER_DAGGER, Kind.SCALAR):
            return self
        if k is Kind.CAP:
            return Generator(Kind.CUP, x.dual)
        if k is Kind.CUP:
            return Generator(Kind.CAP, x.dual)
        if k is Kind.BOX:
            return replace(self, variant=combine_variants(self.variant, "transpose"))
        return replace(self, dom=dual_reversed(self.cod), cod=dual_reversed(self.dom))

    def label(self) -> tuple:
        """Hashable, totally ordered description used for canonical keys."""
        v = complex(self.value)
        return (
            self.kind.value, str(self.wire or ""), self.name or "", self.variant,
            tuple(map(str, self.dom)), tuple(map(str, self.cod)),
            (round(v.real, 12), round(v.imag, 12)),
        )

    def __str__(self) -> str:
        k = self.kind
        if k is Kind.BOX:
            return f"{self.name}[{self.variant}]" if self.variant != "plain" else str(self.name)
        if k is Kind.SCALAR:
            if self.name == "dim":
                return f"dim({self.wire.object})"
            return f"scalar({complex(self.value)})"
        if k is Kind.SPIDER:
            ins = ",".join(map(str, self.dom))
            outs = ",".join(map(str, self.cod))
            return f"spider[{self.wire.object}]({ins}->{outs})"
        return f"{k.value}({self.wire})"


BOUNDARY = -1


class Port(NamedTuple):
    """A port of a node, or (``node == BOUNDARY``) of the diagram itself.

    Boundary ``in`` ports are the diagram's inputs and act as edge sources;
    boundary ``out`` ports are its outputs and act as edge targets.
    """

    node: int
    side: str
    index: int

    @property
    def is_source(self) -> bool:
        return (self.side == "out") != (self.node == BOUNDARY)

    def __str__(self) -> str:
        owner = "boundary" if self.node == BOUNDARY else f"node {self.node}"
        return f"{owner} {self.side}[{self.index}]"


class Edge(NamedTuple):
    src: Port
    tgt: Port
    wire: WireType


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class Diagram:
    dom: tuple[WireType, ...]
    cod: tuple[WireType, ...]
    nodes: Mapping[int, Generator] = field(default_factory=dict)
    edges: frozenset[Edge] = frozenset()

    @cached_property
    def _by_port(self) -> dict[Port, Edge]:
        table: dict[Port, Edge] = {}
        for e in self.edges:
            table[e.src] = e
            table[e.tgt] = e
        return table

    def edge_at(self, port: Port) -> Edge:
        return self._by_port[port]

    def partner(self, port: Port) -> Port:
        e = self._by_port[port]
        return e.tgt if e.src == port else e.src

    def node_ports(self, nid: int) -> list[Port]:
        g = self.nodes[nid]
        ins, outs = g.signature()
        return [Port(nid, "in", i) for i in range(len(ins))] + [
            Port(nid, "out", i) for i in range(len(outs))
        ]

    def port_type(self, port: Port) -> WireType:
        if port.node == BOUNDARY:
            return (self.dom if port.side == "in" else self.cod)[port.index]
        ins, outs = self.nodes[port.node].signature()
        return (ins if port.side == "in" else outs)[port.index]

    def neighbours(self, nid: int) -> set[int]:
        out = set()
        for p in self.node_ports(nid):
            q = self.partner(p)
            if q.node != BOUNDARY:
                out.add(q.node)
        return out

    @cached_property
    def fingerprint(self) -> int:
        return hash((self.dom, self.cod, tuple(sorted(self.nodes.items(), key=lambda kv: kv[0])),
                     self.edges))

    @property
    def signature(self) -> tuple[tuple[WireType, ...], tuple[WireType, ...]]:
        return self.dom, self.cod

    def next_id(self) -> int:
        return max(self.nodes, default=-1) + 1

    def __repr__(self) -> str:
        dom = ", ".join(map(str, self.dom))
        cod = ", ".join(map(str, self.cod))
        return f"Diagram([{dom}] -> [{cod}], {len(self.nodes)} nodes)"


# ---------------------------------------------------------------- builders


class DiagramBuilder:
    """Mutable helper for assembling a port graph edge by edge."""

    def __init__(self, dom: Iterable[TypeLike] = (), cod: Iterable[TypeLike] = ()):
        self.dom = list(wires(dom)) if dom else []
        self.cod = list(wires(cod)) if cod else []
        self.nodes: dict[int, Generator] = {}
        self.edges: list[Edge] = []

    def add(self, gen: Generator, nid: int | None = None) -> int:
        if nid is None:
            nid = max(self.nodes, default=-1) + 1
        self.nodes[nid] = gen
        return nid

    def connect(self, src: Port, tgt: Port, w: WireType) -> None:
        self.edges.append(Edge(src, tgt, w))

    def build(self, check: bool = True) -> Diagram:
        d = Diagram(tuple(self.dom), tuple(self.cod), dict(self.nodes), frozenset(self.edges))
        if check:
            problems = validate(d)
            if problems:
                raise InvalidDiagram(problems)
        return d


def identity(types: Union[TypeLike, Iterable[TypeLike]] = ()) -> Diagram:
    ts = wires(types)
    edges = frozenset(
        Edge(Port(BOUNDARY, "in", i), Port(BOUNDARY, "out", i), t) for i, t in enumerate(ts)
    )
    return Diagram(ts, ts, {}, edges)


def permutation(types: Iterable[TypeLike], perm: Sequence[int]) -> Diagram:
    """Wiring sending input ``i`` to output ``perm[i]``."""
    ts = wires(types)
    if sorted(perm) != list(range(len(ts))):
        raise ValueError(f"not a permutation: {perm}")
    cod = [None] * len(ts)
    for i, j in enumerate(perm):
        cod[j] = ts[i]
    edges = frozenset(
        Edge(Port(BOUNDARY, "in", i), Port(BOUNDARY, "out", perm[i]), ts[i]) for i in range(len(ts))
    )
    return Diagram(ts, tuple(cod), {}, edges)


def swap(x: TypeLike, y: TypeLike) -> Diagram:
    return permutation([x, y], [1, 0])


def from_generator(gen: Generator) -> Diagram:
    ins, outs = gen.signature()
    b = DiagramBuilder(ins, outs)
    n = b.add(gen, 0)
    for i, t in enumerate(ins):
        b.connect(Port(BOUNDARY, "in", i), Port(n, "in", i), t)
    for i, t in enumerate(outs):
        b.connect(Port(n, "out", i), Port(BOUNDARY, "out", i), t)
    return b.build(check=False)


def delta(x: TypeLike) -> Diagram:
    return from_generator(Generator(Kind.DELTA, wire(x)))


def delta_dagger(x: TypeLike) -> Diagram:
    return from_generator(Generator(Kind.DELTA_DAGGER, wire(x)))


def gamma(x: TypeLike) -> Diagram:
    return from_generator(Generator(Kind.GAMMA, wire(x)))


def gamma_dagger(x: TypeLike) -> Diagram:
    return from_generator(Generator(Kind.GAMMA_DAGGER, wire(x)))


def dualiser(x: TypeLike) -> Diagram:
    return from_generator(Generator(Kind.DUALISER, wire(x)))


def dualiser_dagger(x: TypeLike) -> Diagram:
    return from_generator(Generator(Kind.DUALISER_DAGGER, wire(x)))


def cap(x: TypeLike) -> Diagram:
    """The compact effect ``X (x) X* -> I``."""
    return from_generator(Generator(Kind.CAP, wire(x)))


def cup(x: TypeLike) -> Diagram:
    """The compact unit ``I -> X* (x) X``."""
    return from_generator(Generator(Kind.CUP, wire(x)))


def box(name: str, dom: Iterable[TypeLike] = (), cod: Iterable[TypeLike] = (),
        variant: str = "plain") -> Diagram:
    """A named box; ``dom``/``cod`` are the plain signature."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown box variant {variant!r}")
    return from_generator(Generator(Kind.BOX, None, name, variant,
                                    wires(dom) if dom else (), wires(cod) if cod else ()))


def scalar(value: complex) -> Diagram:
    return from_generator(Generator(Kind.SCALAR, value=complex(value)))


def spider(obj: str, ins: Iterable[TypeLike] = (), outs: Iterable[TypeLike] = ()) -> Diagram:
    return from_generator(Generator(Kind.SPIDER, WireType(obj), dom=wires(ins) if ins else (),
                                    cod=wires(outs) if outs else ()))


# ------------------------------------------------------------ composition


def _shift(d: Diagram, offset: int, dom_off: int = 0, cod_off: int = 0) -> tuple[dict, list]:
    def mv(p: Port) -> Port:
        if p.node == BOUNDARY:
            return Port(BOUNDARY, p.side, p.index + (dom_off if p.side == "in" else cod_off))
        return Port(p.node + offset, p.side, p.index)

    nodes = {n + offset: g for n, g in d.nodes.items()}
    edges = [Edge(mv(e.src), mv(e.tgt), e.wire) for e in d.edges]
    return nodes, edges


def compose(g: Diagram, f: Diagram) -> Diagram:
    """``g`` after ``f``: the outputs of ``f`` are fused to the inputs of ``g``."""
    if f.cod != g.dom:
        raise SignatureMismatch(
            f"cannot compose: [{', '.join(map(str, f.cod))}] vs [{', '.join(map(str, g.dom))}]"
        )
    offset = f.next_id()
    g_nodes, g_edges = _shift(g, offset)
    nodes = dict(f.nodes)
    nodes.update(g_nodes)
    into_out = {}  # f's output k -> source port inside f
    edges = []
    for e in f.edges:
        if e.tgt.node == BOUNDARY:
            into_out[e.tgt.index] = e.src
        else:
            edges.append(e)
    for e in g_edges:
        if e.src.node == BOUNDARY:
            edges.append(Edge(into_out[e.src.index], e.tgt, e.wire))
        else:
            edges.append(e)
    return Diagram(f.dom, g.cod, nodes, frozenset(edges))


def then(*ds: Diagram) -> Diagram:
    """Sequential composition in reading order: ``then(f, g) == compose(g, f)``."""
    if not ds:
        return identity()
    out = ds[0]
    for d in ds[1:]:
        out = compose(d, out)
    return out


def tensor(*ds: Diagram) -> Diagram:
    if not ds:
        return identity()
    out = ds[0]
    for g in ds[1:]:
        g_nodes, g_edges = _shift(g, out.next_id(), len(out.dom), len(out.cod))
        nodes = dict(out.nodes)
        nodes.update(g_nodes)
        out = Diagram(out.dom + g.dom, out.cod + g.cod, nodes, out.edges | frozenset(g_edges))
    return out


# ---------------------------------------------------------------- functors


def dagger(f: Diagram) -> Diagram:
    """Vertical reflection: inputs and outputs exchange, edges reverse."""

    def flip(p: Port) -> Port:
        return Port(p.node, "out" if p.side == "in" else "in", p.index)

    nodes = {n: g.dagger() for n, g in f.nodes.items()}
    edges = frozenset(Edge(flip(e.tgt), flip(e.src), e.wire) for e in f.edges)
    return Diagram(f.cod, f.dom, nodes, edges)


def transpose(f: Diagram) -> Diagram:
    """180-degree rotation, generator by generator.

    Agrees with the cup/cap construction of :func:`transpose_via_cups`; the
    generator-wise form is an involution on the nose.
    """
    n_in = {n: len(g.inputs()) for n, g in f.nodes.items()}
    n_out = {n: len(g.outputs()) for n, g in f.nodes.items()}

    def rot(p: Port) -> Port:
        if p.node == BOUNDARY:
            if p.side == "in":
                return Port(BOUNDARY, "out", len(f.dom) - 1 - p.index)
            return Port(BOUNDARY, "in", len(f.cod) - 1 - p.index)
        if p.side == "in":
            return Port(p.node, "out", n_in[p.node] - 1 - p.index)
        return Port(p.node, "in", n_out[p.node] - 1 - p.index)

    nodes = {n: g.rotate() for n, g in f.nodes.items()}
    edges = frozenset(Edge(rot(e.tgt), rot(e.src), e.wire.dual) for e in f.edges)
    return Diagram(dual_reversed(f.cod), dual_reversed(f.dom), nodes, edges)


def conjugate(f: Diagram) -> Diagram:
    """Horizontal reflection: ``dagger`` after ``transpose``."""
    return dagger(transpose(f))


def transpose_via_cups(f: Diagram) -> Diagram:
    """The transpose built literally from units and counits around ``f``.

    Each input ``A_i`` is bent down with a cup ``I -> A_i* (x) A_i`` and
    each output ``B_j`` is bent up with a cap ``B_j (x) B_j* -> I``.
    """
    n, m = len(f.dom), len(f.cod)
    offset = f.next_id()
    b = DiagramBuilder(dual_reversed(f.cod), dual_reversed(f.dom))
    for nid, g in f.nodes.items():
        b.add(g, nid)
    cups = {i: b.add(Generator(Kind.CUP, t), offset + i) for i, t in enumerate(f.dom)}
    caps = {j: b.add(Generator(Kind.CAP, t), offset + n + j) for j, t in enumerate(f.cod)}
    for e in f.edges:
        src, tgt = e.src, e.tgt
        if src.node == BOUNDARY:
            src = Port(cups[src.index], "out", 1)
        if tgt.node == BOUNDARY:
            tgt = Port(caps[tgt.index], "in", 0)
        b.connect(src, tgt, e.wire)
    for i, t in enumerate(f.dom):
        b.connect(Port(cups[i], "out", 0), Port(BOUNDARY, "out", n - 1 - i), t.dual)
    for j, t in enumerate(f.cod):
        b.connect(Port(BOUNDARY, "in", m - 1 - j), Port(caps[j], "in", 1), t.dual)
    return b.build()


# -------------------------------------------------------------- inspection


def boundary_signature(f: Diagram) -> tuple[tuple[WireType, ...], tuple[WireType, ...]]:
    return f.dom, f.cod


def _all_ports(f: Diagram) -> list[Port]:
    ports = [Port(BOUNDARY, "in", i) for i in range(len(f.dom))]
    ports += [Port(BOUNDARY, "out", i) for i in range(len(f.cod))]
    for n in f.nodes:
        ports += f.node_ports(n)
    return ports


def validate(f: Diagram) -> list[Violation]:
    """Check every port-graph invariant; an empty list means valid."""
    problems: list[Violation] = []
    expected = set(_all_ports(f))
    seen: dict[Port, int] = {}
    for e in f.edges:
        for p in (e.src, e.tgt):
            if p.node != BOUNDARY and p.node not in f.nodes:
                problems.append(Violation("unknown-node", f"edge endpoint {p} has no node"))
                continue
            if p not in expected:
                problems.append(Violation("unknown-port", f"{p} does not exist"))
                continue
            seen[p] = seen.get(p, 0) + 1
        if e.src in expected and not e.src.is_source:
            problems.append(Violation("direction", f"edge source {e.src} is an input-side port"))
        if e.tgt in expected and e.tgt.is_source:
            problems.append(Violation("direction", f"edge target {e.tgt} is an output-side port"))
        for p in (e.src, e.tgt):
            if p in expected and f.port_type(p) != e.wire:
                problems.append(Violation(
                    "type-clash", f"wire of type {e.wire} meets {p} of type {f.port_type(p)}"))
    for p in sorted(expected):
        count = seen.get(p, 0)
        if count == 0:
            problems.append(Violation("dangling-port", f"{p} is not connected"))
        elif count > 1:
            problems.append(Violation("duplicate-port", f"{p} is used by {count} edges"))
    if not problems and not is_acyclic(f):
        problems.append(Violation("cycle", "the node graph has a directed cycle"))
    return problems


def check(f: Diagram) -> Diagram:
    problems = validate(f)
    if problems:
        raise InvalidDiagram(problems)
    return f


def is_acyclic(f: Diagram) -> bool:
    indeg = {n: 0 for n in f.nodes}
    succ: dict[int, list[int]] = {n: [] for n in f.nodes}
    for e in f.edges:
        if e.src.node != BOUNDARY and e.tgt.node != BOUNDARY:
            succ[e.src.node].append(e.tgt.node)
            indeg[e.tgt.node] += 1
    queue = deque(n for n, k in indeg.items() if k == 0)
    seen = 0
    while queue:
        n = queue.popleft()
        seen += 1
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    return seen == len(f.nodes)


def topological_order(f: Diagram) -> list[int]:
    indeg = {n: 0 for n in f.nodes}
    succ: dict[int, list[int]] = {n: [] for n in f.nodes}
    for e in f.edges:
        if e.src.node != BOUNDARY and e.tgt.node != BOUNDARY:
            succ[e.src.node].append(e.tgt.node)
            indeg[e.tgt.node] += 1
    ready = sorted(n for n, k in indeg.items() if k == 0)
    order = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        for m in sorted(succ[n]):
            indeg[m] -= 1
            if indeg[m] == 0:
                ready.append(m)
        ready.sort()
    if len(order) != len(f.nodes):
        raise InvalidDiagram([Violation("cycle", "the node graph has a directed cycle")])
    return order


def components(f: Diagram) -> list[dict]:
    """Connected components of the undirected port graph.

    Each component is a dict with ``nodes`` (set of node ids), ``inputs``
    and ``outputs`` (sorted boundary indices).
    """
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def key(p: Port):
        return ("n", p.node) if p.node != BOUNDARY else ("b", p.side, p.index)

    for n in f.nodes:
        find(("n", n))
    for i in range(len(f.dom)):
        find(("b", "in", i))
    for i in range(len(f.cod)):
        find(("b", "out", i))
    for e in f.edges:
        a, b = find(key(e.src)), find(key(e.tgt))
        if a != b:
            parent[a] = b
    groups: dict = {}
    for x in list(parent):
        groups.setdefault(find(x), []).append(x)
    out = []
    for members in groups.values():
        comp = {"nodes": set(), "inputs": [], "outputs": []}
        for m in members:
            if m[0] == "n":
                comp["nodes"].add(m[1])
            elif m[1] == "in":
                comp["inputs"].append(m[2])
            else:
                comp["outputs"].append(m[2])
        comp["inputs"].sort()
        comp["outputs"].sort()
        out.append(comp)
    out.sort(key=lambda c: (min(c["nodes"], default=10**9), c["inputs"], c["outputs"]))
    return out


def is_connected(f: Diagram) -> bool:
    return len(components(f)) <= 1


# ----------------------------------------------------------- canonical form


def _partner_key(f: Diagram, q: Port, order: dict[int, int]) -> tuple:
    if q.node == BOUNDARY:
        return (0, q.side, q.index)
    if q.node in order:
        return (1, order[q.node], q.side, q.index)
    return (2, f.nodes[q.node].label(), q.side, q.index)


def _ranked_ports(f: Diagram, nid: int, order: dict[int, int]) -> list[Port]:
    """Ports of ``nid`` in canonical order.

    Spider legs on the same side are interchangeable, so they are sorted by
    what they connect to rather than by their stored position.
    """
    ports = f.node_ports(nid)
    if f.nodes[nid].kind is not Kind.SPIDER:
        return ports
    ins = [p for p in ports if p.side == "in"]
    outs = [p for p in ports if p.side == "out"]
    ins.sort(key=lambda p: (_partner_key(f, f.partner(p), order), p.index))
    outs.sort(key=lambda p: (_partner_key(f, f.partner(p), order), p.index))
    return ins + outs


def _bfs(f: Diagram, seeds: Iterable[int], order: dict[int, int], ranks: dict[Port, int]) -> None:
    queue = deque()
    for n in seeds:
        if n not in order:
            order[n] = len(order)
            queue.append(n)
    while queue:
        n = queue.popleft()
        ranked = _ranked_ports(f, n, order)
        counters = {"in": 0, "out": 0}
        for p in ranked:
            ranks[p] = counters[p.side]
            counters[p.side] += 1
        for p in ranked:
            q = f.partner(p)
            if q.node != BOUNDARY and q.node not in order:
                order[q.node] = len(order)
                queue.append(q.node)


def _encode(f: Diagram, order: dict[int, int], ranks: dict[Port, int], nodes: Iterable[int]):
    def cport(p: Port) -> tuple:
        if p.node == BOUNDARY:
            return (-1, p.side, p.index)
        return (order[p.node], p.side, ranks[p])

    members = sorted(nodes, key=lambda n: order[n])
    labels = []
    for n in members:
        g = f.nodes[n]
        if g.kind is Kind.SPIDER:
            ins, outs = ["?"] * len(g.dom), ["?"] * len(g.cod)
            for p in f.node_ports(n):
                (ins if p.side == "in" else outs)[ranks[p]] = str(f.port_type(p))
            labels.append((g.kind.value, str(g.wire), tuple(ins), tuple(outs)))
        else:
            labels.append(g.label())
    member_set = set(members)
    edges = sorted(
        (cport(e.src), cport(e.tgt), str(e.wire))
        for e in f.edges
        if e.src.node in member_set or e.tgt.node in member_set
    )
    return tuple(labels), tuple(edges)


def _canonical_numbering(f: Diagram) -> tuple[dict[int, int], dict[Port, int]]:
    order: dict[int, int] = {}
    ranks: dict[Port, int] = {}
    seeds = []
    for i in range(len(f.dom)):
        seeds.append(f.partner(Port(BOUNDARY, "in", i)).node)
    for i in range(len(f.cod)):
        seeds.append(f.partner(Port(BOUNDARY, "out", i)).node)
    _bfs(f, [s for s in seeds if s != BOUNDARY], order, ranks)
    rest = [c["nodes"] for c in components(f) if c["nodes"] and not (c["nodes"] & set(order))]
    best = []
    for comp in rest:
        candidates = []
        for start in sorted(comp):
            o: dict[int, int] = {}
            r: dict[Port, int] = {}
            _bfs(f, [start], o, r)
            candidates.append((_encode(f, o, r, comp), start))
        candidates.sort()
        best.append(candidates[0])
    best.sort()
    for _, start in best:
        _bfs(f, [start], order, ranks)
    return order, ranks


def canonical_key(f: Diagram) -> tuple:
    order, ranks = _canonical_numbering(f)
    labels, edges = _encode(f, order, ranks, f.nodes)
    boundary_edges = tuple(sorted(
        ((-1, e.src.side, e.src.index), (-1, e.tgt.side, e.tgt.index), str(e.wire))
        for e in f.edges if e.src.node == BOUNDARY and e.tgt.node == BOUNDARY
    ))
    return (tuple(map(str, f.dom)), tuple(map(str, f.cod)), labels, edges, boundary_edges)


def isomorphic(a: Diagram, b: Diagram) -> bool:
    """Equality up to re-identification of internal nodes."""
    return canonical_key(a) == canonical_key(b)


def canonicalize(f: Diagram) -> Diagram:
    """Renumber nodes canonically and sort spider legs into canonical order."""
    order, ranks = _canonical_numbering(f)

    def mv(p: Port) -> Port:
        if p.node == BOUNDARY:
            return p
        return Port(order[p.node], p.side, ranks.get(p, p.index))

    nodes = {}
    for n, g in f.nodes.items():
        if g.kind is Kind.SPIDER:
            ins, outs = list(g.dom), list(g.cod)
            for p in f.node_ports(n):
                t = f.port_type(p)
                (ins if p.side == "in" else outs)[ranks[p]] = t
            g = replace(g, dom=tuple(ins), cod=tuple(outs))
        nodes[order[n]] = g
    edges = frozenset(Edge(mv(e.src), mv(e.tgt), e.wire) for e in f.edges)
    return Diagram(f.dom, f.cod, nodes, edges)


def dimension(obj: str) -> Diagram:
    """The closed loop on ``obj`` as a symbolic scalar."""
    return from_generator(Generator(Kind.SCALAR, WireType(obj), name="dim"))
