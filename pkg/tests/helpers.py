"""Shared fixtures-by-hand for the test suite."""
from __future__ import annotations

import random

import numpy as np

from basisdiag import diagram as dg
from basisdiag import hilb
from basisdiag import structures as st
from basisdiag.diagram import Kind, WireType
from basisdiag.rules import Bindings, BoxBinding, apply, find_matches, instantiate, registry
from basisdiag.rules.registry import _tagged_matrix

Q = "Q"
BASES = ("Z", "X", "Y")
S2 = 1 / np.sqrt(2)

# hand-written oracles, independent of the package
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * S2
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
S_GATE = np.diag([1, 1j])

# box names for the rewrite sampler: tag and wire orientation
TAGGED_BOXES = {"p": "permutation", "h": "phase", "u": "unitary", "m": None}


def _box_name(base: str, flip: bool) -> str:
    return base + ("d" if flip else "")


def sampler_interp(basis: str, seed: int) -> hilb.Interpretation:
    """Qubit ``Q`` in ``basis`` with boxes that honour their tags on either orientation."""
    interp = hilb.Interpretation({Q: st.builtin(basis)})
    for k, (base, tag) in enumerate(sorted(TAGGED_BOXES.items())):
        for flip in (False, True):
            s = interp.structure(WireType(Q, flip))
            name = _box_name(base, flip)
            interp.boxes[name] = _tagged_matrix(tag, s, seed + 7 * k + flip)
            if tag:
                interp.tags[name] = {tag}
    return interp


def _box_vars(side: dg.Diagram) -> dict:
    out = {}
    for g in side.nodes.values():
        if g.kind is Kind.BOX and g.name.startswith("$"):
            out[g.name] = (g.dom, g.cod)
    return out


def rule_instance(rule, direction: str, flip: bool, rng: random.Random) -> dg.Diagram:
    pattern, _ = rule.side(direction)
    objs = (("A", (Q, flip)),)
    boxes = []
    for var, (dom, cod) in sorted(_box_vars(pattern).items()):
        tag = rule.box_tags.get(var)
        if tag == "unitary":
            base = rng.choice(["u", "p", "h"])
        elif tag:
            base = {"permutation": "p", "phase": "h"}[tag]
        else:
            base = rng.choice(sorted(TAGGED_BOXES))

        def sub(ts):
            return tuple(WireType(Q, t.dualized != flip) for t in ts)

        boxes.append((var, BoxBinding(_box_name(base, flip), "plain", sub(dom), sub(cod))))
    return instantiate(pattern, Bindings(objs, tuple(boxes)))


def _dress(ts, rng: random.Random) -> dg.Diagram:
    # untagged boxes on some boundary wires so the match sits inside a context
    parts = []
    for t in ts:
        if rng.random() < 0.5:
            parts.append(dg.box(_box_name("m", t.dualized), [t], [t]))
        else:
            parts.append(dg.identity([t]))
    return dg.tensor(*parts) if parts else dg.identity()


def rewrite_host(seed: int):
    """A host holding one rule instance among random context, plus the rule and direction."""
    rng = random.Random(seed)
    rules = registry()
    rule = rules[seed % len(rules)]
    direction = rng.choice(rule.directions())
    flip = rng.random() < 0.5
    inst = rule_instance(rule, direction, flip, rng)
    ctx = hilb.random_diagram(seed, max_nodes=3, max_ports=4, connected=True, objects=(Q,))
    body = dg.tensor(ctx, inst) if rng.random() < 0.5 else dg.tensor(inst, ctx)
    host = dg.then(_dress(body.dom, rng), body, _dress(body.cod, rng))
    return rule, direction, host


def rewrite_applications(n: int, seed0: int = 0):
    """Yield ``n`` seeded (rule, direction, basis, before, after, interp) rewrite applications."""
    made = 0
    seed = seed0
    while made < n:
        rule, direction, host = rewrite_host(seed)
        basis = BASES[seed % 3]
        interp = sampler_interp(basis, seed)
        matches = find_matches(rule, host, direction, interp.tags)
        if matches:
            m = matches[random.Random(seed).randrange(len(matches))]
            after, _ = apply(rule, m, host)
            yield rule, direction, basis, host, after, interp
            made += 1
        seed += 1


def basis_diagram(seed: int) -> dg.Diagram:
    """Connected diagram of basis generators only, at most 8 nodes and 6 boundary ports."""
    return hilb.random_diagram(seed, max_nodes=8, max_ports=6, connected=True, objects=("A",))
