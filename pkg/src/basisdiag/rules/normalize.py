"""Normalization, trace replay and equality proofs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .. import diagram as dg
from ..diagram import Diagram
from ..errors import BudgetExhausted, SignatureMismatch
from . import spider
from .core import ProofTrace, Step, apply, find_matches
from .registry import get_rule, registry

DEFAULT_BUDGET = 10_000

# box rules tried before spider fusion; the first applicable one fires
BOX_PREPASS = (
    "permutation-cancellation", "phase-cancellation", "unitary-cancellation",
    "permutation-unit", "permutation-delete", "phase-slide",
)

# the Frobenius-free strategy: cancel, yank, then factorise copy/delete pairs
COMPACT_ORDER = (
    "dualiser-unitarity", "dualiser-unitarity-dual",
    "permutation-cancellation", "phase-cancellation", "unitary-cancellation",
    "snake-left", "snake-right", "factorisation-cap", "info-flow-left",
)

MODES = ("all", "no-frobenius")


@dataclass
class _Run:
    host: Diagram
    budget: int
    tags: Mapping[str, Iterable[str]]
    dims: dict | None
    trace: ProofTrace = None

    def __post_init__(self):
        self.trace = ProofTrace(self.host, self.host, [], dict(self.tags), self.dims)

    def record(self, new: Diagram, step: Step) -> None:
        if len(self.trace.steps) >= self.budget:
            raise BudgetExhausted(self.budget, self.trace)
        self.host = new
        self.trace.steps.append(step)
        self.trace.final = new

    def try_rule(self, name: str, direction: str = "forward") -> bool:
        rule = get_rule(name)
        ms = find_matches(rule, self.host, direction, self.tags, limit=1)
        if not ms:
            return False
        new, step = apply(rule, ms[0], self.host)
        self.record(new, step)
        return True

    def spider_step(self, name: str, ids: tuple[int, ...]) -> None:
        step = Step(name, "forward", tuple(sorted(ids)) if name != "spider-fusion" else ids)
        self.record(spider.apply_step(self.host, step, self.dims), step)


def _box_pass(run: _Run) -> bool:
    changed = False
    while any(run.try_rule(name) for name in BOX_PREPASS):
        changed = True
    return changed


def _spider_pass(run: _Run) -> bool:
    changed = False
    for nid in sorted(run.host.nodes):
        if run.host.nodes[nid].kind in dg.BASIS_KINDS:
            run.spider_step("spider-intro", (nid,))
            changed = True
    while True:
        pairs = spider.fusable_pairs(run.host)
        if pairs:
            run.spider_step("spider-fusion", pairs[0])
            changed = True
            continue
        ids = spider.identity_spiders(run.host)
        if ids:
            run.spider_step("spider-identity", (ids[0],))
            changed = True
            continue
        ids = spider.closed_spiders(run.host)
        if ids:
            run.spider_step("spider-scalar", (ids[0],))
            changed = True
            continue
        ids = spider.needs_merge(run.host)
        if ids:
            run.spider_step("scalar-merge", ids)
            changed = True
            continue
        return changed


def normalize(f: Diagram, mode: str = "all", budget: int = DEFAULT_BUDGET,
              tags: Mapping[str, Iterable[str]] | None = None,
              dims: dict[str, int] | None = None) -> tuple[Diagram, ProofTrace]:
    """Rewrite ``f`` to normal form; returns the canonical normal form and the trace.

    ``all`` fuses every basis generator into oriented spiders after
    cancelling tagged boxes.  ``no-frobenius`` uses only the compact,
    dualiser and box-cancellation rules.
    """
    if mode not in MODES:
        raise ValueError(f"unknown rule set {mode!r}; choose one of {MODES}")
    dg.check(f)
    run = _Run(f, budget, tags or {}, dims)
    if mode == "all":
        while True:
            a = _box_pass(run)
            b = _spider_pass(run)
            if not (a or b):
                break
    else:
        while any(run.try_rule(name) for name in COMPACT_ORDER):
            pass
    return dg.canonicalize(run.host), run.trace


def replay(trace: ProofTrace) -> Diagram:
    """Re-run ``trace`` from its initial diagram."""
    host = trace.initial
    for step in trace.steps:
        if step.rule in spider.SPIDER_STEPS:
            host = spider.apply_step(host, step, trace.dims)
            continue
        rule = get_rule(step.rule)
        ms = [m for m in find_matches(rule, host, step.direction, trace.tags) if m.nodes == step.nodes]
        if not ms:
            raise ValueError(f"step '{step}' does not apply during replay")
        host, _ = apply(rule, ms[0], host)
    return host


@dataclass
class Proof:
    lhs: ProofTrace
    rhs: ProofTrace
    normal_form: Diagram
    proved: bool = field(default=True, init=False)

    @property
    def steps(self) -> list[Step]:
        return self.lhs.steps + self.rhs.steps

    def rules_used(self) -> list[str]:
        return [s.rule for s in self.steps]

    def text(self) -> str:
        out = [str(s) for s in self.lhs.steps]
        if self.rhs.steps:
            out.append("# right-hand side")
            out += [str(s) for s in self.rhs.steps]
        return "\n".join(out)


@dataclass
class NotProved:
    lhs_normal_form: Diagram
    rhs_normal_form: Diagram
    lhs: ProofTrace | None = None
    rhs: ProofTrace | None = None
    proved: bool = field(default=False, init=False)

    def rules_used(self) -> list[str]:
        return []


def _enabled(mode: str):
    if mode == "all":
        return registry()
    return [r for r in registry() if r.family != "frobenius"]


def _one_step(f: Diagram, g: Diagram, mode: str, tags, budget: int) -> ProofTrace | None:
    """Look for a single registered rewrite turning ``f`` into ``g``."""
    target = dg.canonical_key(g)
    tried = 0
    for rule in _enabled(mode):
        for direction in rule.directions():
            for m in find_matches(rule, f, direction, tags):
                tried += 1
                if tried > budget:
                    raise BudgetExhausted(budget)
                new, step = apply(rule, m, f)
                if dg.canonical_key(new) == target:
                    return ProofTrace(f, new, [step], dict(tags or {}))
    return None


def prove_equal(f: Diagram, g: Diagram, budget: int = DEFAULT_BUDGET, rules: str = "all",
                tags: Mapping[str, Iterable[str]] | None = None,
                dims: dict[str, int] | None = None) -> Proof | NotProved:
    """Try to show ``f = g``: by isomorphism, by one rewrite, then by normal forms.

    Never claims inequality; failure is a :class:`NotProved` carrying both
    normal forms.
    """
    if f.signature != g.signature:
        raise SignatureMismatch("prove_equal needs diagrams with the same boundary")
    tags = tags or {}
    if dg.isomorphic(f, g):
        return Proof(ProofTrace(f, f, [], dict(tags), dims), ProofTrace(g, g, [], dict(tags), dims),
                     dg.canonicalize(f))
    direct = _one_step(f, g, rules, tags, budget)
    if direct is not None:
        return Proof(direct, ProofTrace(g, g, [], dict(tags), dims), dg.canonicalize(g))
    nf_f, tf = normalize(f, rules, budget, tags, dims)
    nf_g, tg = normalize(g, rules, budget, tags, dims)
    if dg.canonical_key(nf_f) == dg.canonical_key(nf_g):
        return Proof(tf, tg, nf_f)
    return NotProved(nf_f, nf_g, tf, tg)
