"""DOT and plain-text renderings of a diagram."""
from __future__ import annotations

import json

from ..diagram import BOUNDARY, Diagram, Port
from .language import generator_text


def _port_name(p: Port) -> str:
    if p.node == BOUNDARY:
        return f"{p.side}{p.index}"
    return f"n{p.node}"


def _q(s: str) -> str:
    # json string escaping is a valid DOT quoted id
    return json.dumps(s)


def to_dot(f: Diagram, name: str = "diagram") -> str:
    """One graph node per generator and one terminal per boundary port.

    Edges follow the wire from producer to consumer; a dual wire keeps
    that layout but its arrowhead points the other way.
    """
    lines = [f"digraph {_q(name)} {{", "  rankdir=BT;", "  node [fontname=\"monospace\"];"]
    for i, t in enumerate(f.dom):
        lines.append(f"  in{i} [shape=plaintext, label={_q(f'in {i}: {t}')}];")
    for i, t in enumerate(f.cod):
        lines.append(f"  out{i} [shape=plaintext, label={_q(f'out {i}: {t}')}];")
    for nid in sorted(f.nodes):
        lines.append(f"  n{nid} [shape=box, label={_q(generator_text(f.nodes[nid]))}];")
    for e in sorted(f.edges, key=lambda e: (e.src, e.tgt)):
        attrs = [f"label={_q(str(e.wire))}"]
        if e.wire.dualized:
            attrs.append("dir=back")
        if e.src.node != BOUNDARY:
            attrs.append(f"taillabel={_q(str(e.src.index))}")
        if e.tgt.node != BOUNDARY:
            attrs.append(f"headlabel={_q(str(e.tgt.index))}")
        lines.append(f"  {_port_name(e.src)} -> {_port_name(e.tgt)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _end(p: Port) -> str:
    if p.node == BOUNDARY:
        return f"{p.side}{p.index}"
    return f"{p.node}.{p.side}{p.index}"


def to_ascii(f: Diagram) -> str:
    dom = ", ".join(map(str, f.dom)) or "I"
    cod = ", ".join(map(str, f.cod)) or "I"
    out = [f"{dom} -> {cod}  ({len(f.nodes)} nodes, {len(f.edges)} wires)", "nodes:"]
    for nid in sorted(f.nodes):
        out.append(f"  {nid:>3}  {generator_text(f.nodes[nid])}")
    out.append("wires:")
    for e in sorted(f.edges, key=lambda e: (e.src, e.tgt)):
        arrow = "<-" if e.wire.dualized else "->"
        out.append(f"  {_end(e.src):>10} {arrow} {_end(e.tgt):<10} {e.wire}")
    return "\n".join(out) + "\n"
