"""Spider steps: every basis generator is a spider, and adjacent spiders fuse.

Each step is deterministic given the host and a node-id set, which is what
lets a trace be replayed.
"""
from __future__ import annotations

from collections import deque

from ..diagram import BASIS_KINDS, BOUNDARY, Diagram, Edge, Generator, Kind, Port, WireType
from ..errors import MixedObjects
from .core import Step

SPIDER_STEPS = ("spider-intro", "spider-fusion", "spider-identity", "spider-scalar", "scalar-merge")


def as_spider(g: Generator) -> Generator:
    ins, outs = g.signature()
    return Generator(Kind.SPIDER, WireType(g.wire.object), dom=ins, cod=outs)


def _rebuild(host: Diagram, nodes: dict, edges) -> Diagram:
    return Diagram(host.dom, host.cod, nodes, frozenset(edges))


def intro(host: Diagram, nid: int) -> Diagram:
    g = host.nodes[nid]
    if g.kind not in BASIS_KINDS:
        raise ValueError(f"node {nid} is not a basis generator")
    nodes = dict(host.nodes)
    nodes[nid] = as_spider(g)
    return _rebuild(host, nodes, host.edges)


def _reaches_avoiding(host: Diagram, a: int, b: int) -> bool:
    """Is there a directed path a -> ... -> b through some third node?"""
    succ: dict[int, set[int]] = {}
    for e in host.edges:
        if e.src.node != BOUNDARY and e.tgt.node != BOUNDARY:
            succ.setdefault(e.src.node, set()).add(e.tgt.node)
    start = [n for n in succ.get(a, ()) if n != b]
    seen = set(start)
    queue = deque(start)
    while queue:
        n = queue.popleft()
        if n == b:
            return True
        for m in succ.get(n, ()):
            if m not in seen:
                seen.add(m)
                queue.append(m)
    return False


def fusable_pairs(host: Diagram) -> list[tuple[int, int]]:
    """Spider pairs joined by at least one wire whose fusion keeps the graph acyclic."""
    pairs = set()
    for e in host.edges:
        a, b = e.src.node, e.tgt.node
        if a == BOUNDARY or b == BOUNDARY or a == b:
            continue
        if host.nodes[a].kind is Kind.SPIDER and host.nodes[b].kind is Kind.SPIDER:
            if not _reaches_avoiding(host, a, b):
                pairs.add((min(a, b), max(a, b)))
    return sorted(pairs)


def fuse(host: Diagram, a: int, b: int) -> Diagram:
    """Merge spider ``b`` into spider ``a`` along every wire between them."""
    ga, gb = host.nodes[a], host.nodes[b]
    if ga.kind is not Kind.SPIDER or gb.kind is not Kind.SPIDER:
        raise ValueError("only spiders fuse")
    if ga.wire != gb.wire:
        raise MixedObjects(f"cannot fuse spiders on {ga.wire} and {gb.wire}")
    pair = {a, b}
    inner = {e for e in host.edges if e.src.node in pair and e.tgt.node in pair}
    inner_ports = {p for e in inner for p in (e.src, e.tgt)}
    new_port: dict[Port, Port] = {}
    ins: list[WireType] = []
    outs: list[WireType] = []
    for n in (a, b):
        for p in host.node_ports(n):
            if p in inner_ports:
                continue
            side = ins if p.side == "in" else outs
            new_port[p] = Port(a, p.side, len(side))
            side.append(host.port_type(p))
    nodes = {n: g for n, g in host.nodes.items() if n not in pair}
    nodes[a] = Generator(Kind.SPIDER, ga.wire, dom=tuple(ins), cod=tuple(outs))
    edges = []
    for e in host.edges:
        if e in inner:
            continue
        edges.append(Edge(new_port.get(e.src, e.src), new_port.get(e.tgt, e.tgt), e.wire))
    return _rebuild(host, nodes, edges)


def identity_spiders(host: Diagram) -> list[int]:
    return sorted(
        n for n, g in host.nodes.items()
        if g.kind is Kind.SPIDER and len(g.dom) == 1 and len(g.cod) == 1 and g.dom == g.cod
    )


def drop_identity(host: Diagram, nid: int) -> Diagram:
    src = host.partner(Port(nid, "in", 0))
    tgt = host.partner(Port(nid, "out", 0))
    w = host.nodes[nid].dom[0]
    nodes = {n: g for n, g in host.nodes.items() if n != nid}
    edges = [e for e in host.edges if nid not in (e.src.node, e.tgt.node)]
    edges.append(Edge(src, tgt, w))
    return _rebuild(host, nodes, edges)


def closed_spiders(host: Diagram) -> list[int]:
    return sorted(n for n, g in host.nodes.items()
                  if g.kind is Kind.SPIDER and not g.dom and not g.cod)


def dim_scalar(obj: str, dims: dict[str, int] | None) -> Generator:
    if dims and obj in dims:
        return Generator(Kind.SCALAR, value=complex(dims[obj]))
    return Generator(Kind.SCALAR, WireType(obj), name="dim")


def close_circle(host: Diagram, nid: int, dims: dict[str, int] | None = None) -> Diagram:
    nodes = dict(host.nodes)
    nodes[nid] = dim_scalar(host.nodes[nid].wire.object, dims)
    return _rebuild(host, nodes, host.edges)


def numeric_scalars(host: Diagram) -> list[int]:
    return sorted(n for n, g in host.nodes.items() if g.kind is Kind.SCALAR and g.name is None)


def merge_scalars(host: Diagram, ids: tuple[int, ...]) -> Diagram:
    """Multiply numeric scalar nodes into the first one; a product of 1 disappears."""
    value = 1 + 0j
    for n in ids:
        value *= complex(host.nodes[n].value)
    nodes = {n: g for n, g in host.nodes.items() if n not in ids}
    if value != 1:
        nodes[ids[0]] = Generator(Kind.SCALAR, value=value)
    return _rebuild(host, nodes, host.edges)


def needs_merge(host: Diagram) -> tuple[int, ...] | None:
    ids = numeric_scalars(host)
    if len(ids) > 1 or (len(ids) == 1 and complex(host.nodes[ids[0]].value) == 1):
        return tuple(ids)
    return None


def apply_step(host: Diagram, step: Step, dims: dict[str, int] | None = None) -> Diagram:
    ids = step.nodes
    if step.rule == "spider-intro":
        return intro(host, ids[0])
    if step.rule == "spider-fusion":
        return fuse(host, ids[0], ids[1])
    if step.rule == "spider-identity":
        return drop_identity(host, ids[0])
    if step.rule == "spider-scalar":
        return close_circle(host, ids[0], dims)
    if step.rule == "scalar-merge":
        return merge_scalars(host, ids)
    raise KeyError(step.rule)
