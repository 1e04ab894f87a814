"""Rewrite rules, pattern matching and rule application."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .. import diagram as dg
from ..diagram import BOUNDARY, Diagram, Edge, Generator, Kind, Port, WireType
from ..errors import StaleMatch

# tags that imply others
TAG_IMPLIES = {"permutation": {"unitary"}, "phase": {"unitary"}}


def expand_tags(tags: Iterable[str]) -> set[str]:
    out = set(tags)
    for t in list(out):
        out |= TAG_IMPLIES.get(t, set())
    return out


@dataclass(frozen=True, eq=False)
class RewriteRule:
    """An equation ``lhs = rhs`` between open diagrams.

    Objects in the patterns are variables (any object, either orientation).
    Box names starting with ``$`` are variables too; ``box_tags`` lists the
    tag a host box must carry to bind such a variable.
    """

    name: str
    lhs: Diagram
    rhs: Diagram
    bidirectional: bool = True
    family: str = "compact"
    box_tags: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.lhs.signature != self.rhs.signature:
            raise ValueError(f"rule {self.name}: sides have different boundaries")
        for side, d in (("lhs", self.lhs), ("rhs", self.rhs)):
            if side == "rhs" and not self.bidirectional:
                continue
            if not d.nodes:
                raise ValueError(f"rule {self.name}: {side} used as a pattern has no nodes")
            if any(e.src.node == BOUNDARY and e.tgt.node == BOUNDARY for e in d.edges):
                raise ValueError(f"rule {self.name}: {side} used as a pattern has a bare wire")

    def side(self, direction: str) -> tuple[Diagram, Diagram]:
        if direction == "forward":
            return self.lhs, self.rhs
        if direction == "backward":
            if not self.bidirectional:
                raise ValueError(f"rule {self.name} is one-directional")
            return self.rhs, self.lhs
        raise ValueError(f"unknown direction {direction!r}")

    def directions(self) -> tuple[str, ...]:
        return ("forward", "backward") if self.bidirectional else ("forward",)


@dataclass(frozen=True)
class BoxBinding:
    name: str
    rel: str  # variant of the host box relative to the pattern box
    dom: tuple[WireType, ...]
    cod: tuple[WireType, ...]


@dataclass(frozen=True)
class Bindings:
    objects: tuple = ()  # sorted (var, (host object, flip)) pairs
    boxes: tuple = ()  # sorted (var, BoxBinding) pairs

    def obj(self) -> dict:
        return dict(self.objects)

    def box(self) -> dict:
        return dict(self.boxes)


@dataclass(frozen=True)
class Match:
    rule: str
    direction: str
    mapping: tuple  # sorted (pattern node, host node) pairs
    bindings: Bindings
    fingerprint: int

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(h for _, h in self.mapping))


@dataclass(frozen=True)
class Step:
    rule: str
    direction: str
    nodes: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.rule} {self.direction} @ {' '.join(map(str, self.nodes))}".rstrip()

    @classmethod
    def parse(cls, line: str) -> "Step":
        head, _, ids = line.partition("@")
        rule, direction = head.split()
        return cls(rule, direction, tuple(int(x) for x in ids.split()))


@dataclass
class ProofTrace:
    initial: Diagram
    final: Diagram
    steps: list[Step] = field(default_factory=list)
    tags: dict = field(default_factory=dict)
    dims: dict | None = None

    def lines(self) -> list[str]:
        return [str(s) for s in self.steps]

    def text(self) -> str:
        return "\n".join(self.lines())

    def rules_used(self) -> list[str]:
        return [s.rule for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


# ------------------------------------------------------------ unification


def _unify_type(pt: WireType, ht: WireType, objs: dict) -> bool:
    bound = objs.get(pt.object)
    if bound is None:
        objs[pt.object] = (ht.object, ht.dualized != pt.dualized)
        return True
    obj, flip = bound
    return ht.object == obj and ht.dualized == (pt.dualized != flip)


def _unify(pg: Generator, hg: Generator, objs: dict, boxes: dict,
           rule: RewriteRule, tags: Mapping[str, set]) -> bool:
    if pg.kind is not hg.kind:
        return False
    if pg.kind is Kind.SCALAR and complex(pg.value) != complex(hg.value):
        return False
    if pg.kind is Kind.BOX:
        if pg.name.startswith("$"):
            rel = dg.combine_variants(hg.variant, pg.variant)
            b = BoxBinding(hg.name, rel, hg.dom, hg.cod)
            prev = boxes.get(pg.name)
            if prev is not None and prev != b:
                return False
            need = rule.box_tags.get(pg.name)
            if need and need not in expand_tags(tags.get(hg.name, ())):
                return False
            boxes[pg.name] = b
        elif pg.name != hg.name or pg.variant != hg.variant:
            return False
    (pi, po), (hi, ho) = pg.signature(), hg.signature()
    if len(pi) != len(hi) or len(po) != len(ho):
        return False
    return all(_unify_type(p, h, objs) for p, h in zip(pi + po, hi + ho))


def _pattern_order(pat: Diagram) -> list[int]:
    order: list[int] = []
    for start in sorted(pat.nodes):
        if start in order:
            continue
        queue = [start]
        order.append(start)
        while queue:
            n = queue.pop(0)
            for m in sorted(pat.neighbours(n)):
                if m not in order:
                    order.append(m)
                    queue.append(m)
    return order


def find_matches(rule: RewriteRule, host: Diagram, direction: str = "forward",
                 tags: Mapping[str, Iterable[str]] | None = None, limit: int | None = None) -> list[Match]:
    """All injective, boundary-respecting embeddings of one side of ``rule`` in ``host``."""
    pat, _ = rule.side(direction)
    tags = {k: set(v) for k, v in (tags or {}).items()}
    order = _pattern_order(pat)
    host_ids = sorted(host.nodes)
    results: list[Match] = []

    def candidates(p: int, mapping: dict) -> list[int]:
        # follow an edge from an already-mapped neighbour when possible
        for port in pat.node_ports(p):
            q = pat.partner(port)
            if q.node != BOUNDARY and q.node in mapping:
                hq = Port(mapping[q.node], q.side, q.index)
                h = host.partner(hq)
                if h.node == BOUNDARY or h.side != port.side or h.index != port.index:
                    return []
                return [h.node]
        return host_ids

    def consistent(mapping: dict) -> bool:
        image = set(mapping.values())
        for e in pat.edges:
            s, t = e.src, e.tgt
            if s.node != BOUNDARY and t.node != BOUNDARY:
                hs = Port(mapping[s.node], s.side, s.index)
                if host.partner(hs) != Port(mapping[t.node], t.side, t.index):
                    return False
            elif s.node == BOUNDARY:
                ht = host.partner(Port(mapping[t.node], t.side, t.index))
                if ht.node in image:
                    return False
            else:
                hs = host.partner(Port(mapping[s.node], s.side, s.index))
                if hs.node in image:
                    return False
        return True

    def search(i: int, mapping: dict, objs: dict, boxes: dict) -> None:
        if limit is not None and len(results) >= limit:
            return
        if i == len(order):
            if not consistent(mapping):
                return
            m = Match(rule.name, direction, tuple(sorted(mapping.items())),
                      Bindings(tuple(sorted(objs.items())), tuple(sorted(boxes.items()))),
                      host.fingerprint)
            try:
                _rewrite(rule, m, host)
            except _Cyclic:
                return
            results.append(m)
            return
        p = order[i]
        used = set(mapping.values())
        for h in candidates(p, mapping):
            if h in used or h not in host.nodes:
                continue
            o2, b2 = dict(objs), dict(boxes)
            if not _unify(pat.nodes[p], host.nodes[h], o2, b2, rule, tags):
                continue
            mapping[p] = h
            search(i + 1, mapping, o2, b2)
            del mapping[p]

    search(0, {}, {}, {})
    results.sort(key=lambda m: (m.nodes, m.mapping))
    return results


# ------------------------------------------------------------ instantiation


def _subst_type(t: WireType, objs: Mapping) -> WireType:
    obj, flip = objs.get(t.object, (t.object, False))
    return WireType(obj, t.dualized != flip)


def instantiate_generator(g: Generator, b: Bindings) -> Generator:
    objs, boxes = b.obj(), b.box()
    if g.kind is Kind.BOX and g.name.startswith("$"):
        bb = boxes[g.name]
        return Generator(Kind.BOX, None, bb.name, dg.combine_variants(bb.rel, g.variant), bb.dom, bb.cod)
    return replace(
        g,
        wire=_subst_type(g.wire, objs) if g.wire is not None else None,
        dom=tuple(_subst_type(t, objs) for t in g.dom),
        cod=tuple(_subst_type(t, objs) for t in g.cod),
    )


def instantiate(d: Diagram, b: Bindings) -> Diagram:
    objs = b.obj()
    return Diagram(
        tuple(_subst_type(t, objs) for t in d.dom),
        tuple(_subst_type(t, objs) for t in d.cod),
        {n: instantiate_generator(g, b) for n, g in d.nodes.items()},
        frozenset(Edge(e.src, e.tgt, _subst_type(e.wire, objs)) for e in d.edges),
    )


# ------------------------------------------------------------ application


class _Cyclic(Exception):
    pass


def _rewrite(rule: RewriteRule, match: Match, host: Diagram) -> Diagram:
    pat, rep = rule.side(match.direction)
    mapping = dict(match.mapping)
    image = set(mapping.values())
    ext_in: dict[int, Port] = {}
    ext_out: dict[int, Port] = {}
    for e in pat.edges:
        if e.src.node == BOUNDARY:
            t = e.tgt
            ext_in[e.src.index] = host.partner(Port(mapping[t.node], t.side, t.index))
        if e.tgt.node == BOUNDARY:
            s = e.src
            ext_out[e.tgt.index] = host.partner(Port(mapping[s.node], s.side, s.index))
    rep = instantiate(rep, match.bindings)
    base = host.next_id()
    nodes = {n: g for n, g in host.nodes.items() if n not in image}
    for n, g in rep.nodes.items():
        nodes[base + n] = g
    edges = [e for e in host.edges if e.src.node not in image and e.tgt.node not in image]

    def mv(p: Port) -> Port:
        return Port(base + p.node, p.side, p.index)

    for e in rep.edges:
        src = ext_in[e.src.index] if e.src.node == BOUNDARY else mv(e.src)
        tgt = ext_out[e.tgt.index] if e.tgt.node == BOUNDARY else mv(e.tgt)
        edges.append(Edge(src, tgt, e.wire))
    out = Diagram(host.dom, host.cod, nodes, frozenset(edges))
    if not dg.is_acyclic(out):
        raise _Cyclic()
    return out


def apply(rule: RewriteRule, match: Match, host: Diagram) -> tuple[Diagram, Step]:
    """Replace the matched side of ``rule`` in ``host`` by the other side."""
    if match.fingerprint != host.fingerprint or match.rule != rule.name:
        raise StaleMatch(f"match for {match.rule} does not belong to this host")
    if any(h not in host.nodes for _, h in match.mapping):
        raise StaleMatch(f"match for {match.rule} refers to missing nodes")
    return _rewrite(rule, match, host), Step(rule.name, match.direction, match.nodes)
