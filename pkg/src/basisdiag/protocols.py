"""Post-selected teleportation and state transfer, branch by branch.

All diagrams live on a single qubit object ``Q`` carrying the Z-basis
structure.  Classical outcomes are plain indices; each branch is the
effect form of one measurement outcome followed by its correction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import hilb
from . import structures as st
from .diagram import (
    Diagram, box, cap, cup, delta, delta_dagger, gamma, gamma_dagger, identity, tensor, then,
)
from .rules import NotProved, ProofTrace, prove_equal

Q = "Q"
TOL = 1e-9

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
PAULI["XZ"] = PAULI["X"] @ PAULI["Z"]

# outcome x -> Pauli applied by the receiver
TELEPORT_PAULIS = ("I", "X", "Z", "XZ")
PERMUTATIONS = ("I", "X")  # f_x, permutations of the Z basis
PHASES = ("I", "Z")  # g_y, phase maps of the Z basis

# correction for state-transfer branch (x, y) as (box, variant) pairs in order
# of application; frozen from the oracle search in derive_transfer_correction
TRANSFER_CORRECTIONS = {
    (x, y): ((f"f{x}", "dagger"), (f"g{y}", "plain")) for x in (0, 1) for y in (0, 1)
}


def protocol_interpretation(basis: str = "Z") -> hilb.Interpretation:
    """Qubit ``Q`` plus every correction box, tagged for the commutation rules."""
    boxes: dict[str, np.ndarray] = {}
    tags: dict[str, set[str]] = {}
    for x, p in enumerate(TELEPORT_PAULIS):
        boxes[f"U{x}"] = PAULI[p]
        tags[f"U{x}"] = {"unitary"}
    for x, p in enumerate(PERMUTATIONS):
        boxes[f"f{x}"] = PAULI[p]
        tags[f"f{x}"] = {"permutation"}
    for y, p in enumerate(PHASES):
        boxes[f"g{y}"] = PAULI[p]
        tags[f"g{y}"] = {"phase"}
    return hilb.Interpretation({Q: st.builtin(basis)}, boxes, tags)


@dataclass
class Branch:
    outcome: tuple[int, ...]
    diagram: Diagram
    corrections: list[str] = field(default_factory=list)


def _u(name: str, variant: str = "plain") -> Diagram:
    return box(name, [Q], [Q], variant)


def bell_state() -> Diagram:
    return then(gamma_dagger(Q), delta(Q))


def bell_effect() -> Diagram:
    return then(delta_dagger(Q), gamma(Q))


# ----------------------------------------------------------- teleportation


def teleport_projector(x: int) -> Diagram:
    """``P_x = (U_x (x) 1) delta gamma^dag gamma delta^dag (U_x^dag (x) 1)`` on (c, a)."""
    u = f"U{x}"
    return then(tensor(_u(u, "dagger"), identity(Q)), bell_effect(), bell_state(),
                tensor(_u(u), identity(Q)))


def teleport_branch(x: int, correct: bool = True) -> Diagram:
    u = f"U{x}"
    steps = [
        tensor(identity(Q), bell_state()),  # wires c, a, b
        tensor(_u(u, "dagger"), identity(Q), identity(Q)),
        tensor(bell_effect(), identity(Q)),
    ]
    if correct:
        steps.append(_u(u))
    return then(*steps)


def build_teleportation() -> list[Branch]:
    return [Branch((x,), teleport_branch(x), [f"U{x}"]) for x in range(4)]


def teleport_core(form: str = "frobenius") -> Diagram:
    """The branch with every correction the identity, boxes removed.

    ``compact`` draws the entangled pair and the effect as cup and cap.
    """
    if form == "compact":
        return then(tensor(identity(Q), cup(Q)), tensor(cap(Q), identity(Q)))
    return then(tensor(identity(Q), bell_state()), tensor(bell_effect(), identity(Q)))


# ----------------------------------------------------------- state transfer


def parity_projector(x: int) -> Diagram:
    """``pi_x = (1 (x) f_x) delta delta^dag (1 (x) f_x^dag)``."""
    f = f"f{x}"
    return then(tensor(identity(Q), _u(f, "dagger")), delta_dagger(Q), delta(Q),
                tensor(identity(Q), _u(f)))


def phase_projector(y: int) -> Diagram:
    g = f"g{y}"
    return then(_u(g, "dagger"), gamma(Q), gamma_dagger(Q), _u(g))


def transfer_branch(x: int, y: int, correct: bool = True) -> Diagram:
    steps = [
        tensor(identity(Q), gamma_dagger(Q)),  # ancilla b in |0> + |1>
        parity_projector(x),
        tensor(_u(f"g{y}", "dagger"), identity(Q)),
        tensor(gamma(Q), identity(Q)),
    ]
    if correct:
        steps += [_u(name, variant) for name, variant in TRANSFER_CORRECTIONS[(x, y)]]
    return then(*steps)


def build_state_transfer() -> list[Branch]:
    return [
        Branch((x, y), transfer_branch(x, y), [n for n, _ in TRANSFER_CORRECTIONS[(x, y)]])
        for x in (0, 1) for y in (0, 1)
    ]


def transfer_core() -> Diagram:
    return then(tensor(identity(Q), gamma_dagger(Q)), delta_dagger(Q), delta(Q),
                tensor(gamma(Q), identity(Q)))


def derive_transfer_correction(x: int, y: int, interp: hilb.Interpretation | None = None
                               ) -> tuple[str, str]:
    """Search "permutation, then phase" words for the unique one fixing branch (x, y).

    Returns the Pauli names ``(p, q)`` of the correction ``q . p`` whose
    product with the uncorrected branch is the identity with scalar 1.
    """
    interp = interp or protocol_interpretation()
    raw = hilb.evaluate_matrix(transfer_branch(x, y, correct=False), interp)
    hits = []
    for p in PERMUTATIONS:
        for q in PHASES:
            if hilb.equal(PAULI[q] @ PAULI[p].conj().T @ raw, np.eye(2), TOL):
                hits.append((p, q))
    if len(hits) != 1:
        raise RuntimeError(f"branch {(x, y)} has corrections {hits}")
    return hits[0]


# ---------------------------------------------------------------- verifying


@dataclass
class BranchResult:
    outcome: tuple[int, ...]
    equal_to_identity: bool | None
    scalar: complex | None
    residual: float | None
    proved: bool | None = None
    trace: ProofTrace | None = None

    @property
    def passed(self) -> bool:
        return self.equal_to_identity is not False and self.proved is not False


@dataclass
class VerificationReport:
    mode: str
    branches: list[BranchResult]
    completeness_constant: complex | None = None
    expected_completeness: complex | None = None
    completeness_residual: float | None = None

    @property
    def completeness_ok(self) -> bool:
        if self.expected_completeness is None:
            return True
        return (self.completeness_residual is not None and self.completeness_residual <= TOL
                and abs(self.completeness_constant - self.expected_completeness) <= TOL)

    @property
    def status(self) -> str:
        if not self.completeness_ok:
            return "fail"
        if all(b.passed for b in self.branches):
            return "pass"
        numeric_ok = all(b.equal_to_identity is not False for b in self.branches)
        if numeric_ok and any(b.proved is False for b in self.branches) and self.mode == "both":
            return "PARTIAL"
        return "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        def cx(c):
            return None if c is None else {"re": _fmt(c.real), "im": _fmt(c.imag)}

        return {
            "mode": self.mode,
            "status": self.status,
            "completeness_constant": cx(self.completeness_constant),
            "expected_completeness": cx(self.expected_completeness),
            "branches": [
                {
                    "outcome": list(b.outcome),
                    "equal_to_identity": b.equal_to_identity,
                    "scalar": cx(b.scalar),
                    "residual": None if b.residual is None else _fmt(b.residual),
                    "proved": b.proved,
                    "trace": None if b.trace is None else b.trace.lines(),
                }
                for b in self.branches
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"status: {self.status}", f"mode: {self.mode}"]
        if self.completeness_constant is not None:
            lines.append(f"completeness: {_cfmt(self.completeness_constant)}")
        for b in self.branches:
            lines.append("")
            lines.append(f"branch: {','.join(map(str, b.outcome))}")
            if b.equal_to_identity is not None:
                lines.append(f"  identity: {b.equal_to_identity}")
                lines.append(f"  scalar: {_cfmt(b.scalar)}")
                lines.append(f"  residual: {b.residual:.3e}")
            if b.proved is not None:
                lines.append(f"  proved: {b.proved}")
                for step in (b.trace.lines() if b.trace else []):
                    lines.append(f"    {step}")
        return "\n".join(lines)


def _fmt(x: float) -> float:
    return float(f"{x:.12g}") + 0.0


def _cfmt(c: complex) -> str:
    return f"{_fmt(c.real):.12g}{_fmt(c.imag):+.12g}i"


def completeness_constant(projectors: Sequence[Diagram], interp: hilb.Interpretation) -> tuple[complex, float]:
    total = sum(hilb.evaluate_matrix(p, interp) for p in projectors)
    ok, c = hilb.equal_upto_scalar(total, np.eye(total.shape[0]))
    return c, st.max_dev(total, c * np.eye(total.shape[0]))


def verify(branches: Iterable[Branch], interp: hilb.Interpretation | None = None,
           mode: str = "numeric", completeness: tuple[Sequence[Diagram], complex] | None = None,
           rules: str = "all") -> VerificationReport:
    """Check every branch against the identity wire, numerically and/or by rewriting."""
    if mode not in ("numeric", "diagrammatic", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    interp = interp or protocol_interpretation()
    results = []
    for br in branches:
        eq = c = res = proved = trace = None
        if mode in ("numeric", "both"):
            M = hilb.evaluate_matrix(br.diagram, interp)
            eye = np.eye(M.shape[0])
            ok, c = hilb.equal_upto_scalar(M, eye, TOL)
            res = st.max_dev(M, c * eye)
            eq = bool(ok and abs(abs(c) - 1) <= TOL)
        if mode in ("diagrammatic", "both"):
            target = identity(list(br.diagram.dom))
            outcome = prove_equal(br.diagram, target, rules=rules, tags=interp.tags)
            proved = not isinstance(outcome, NotProved)
            trace = outcome.lhs
        results.append(BranchResult(br.outcome, eq, c, res, proved, trace))
    report = VerificationReport(mode, results)
    if completeness is not None:
        projectors, expected = completeness
        report.completeness_constant, report.completeness_residual = completeness_constant(projectors, interp)
        report.expected_completeness = complex(expected)
    return report


def teleport_completeness() -> tuple[list[Diagram], complex]:
    return [teleport_projector(x) for x in range(4)], 2


def transfer_completeness() -> tuple[list[Diagram], complex]:
    return [parity_projector(x) for x in (0, 1)], 1


def verify_protocol(name: str, mode: str = "numeric", rules: str = "all") -> VerificationReport:
    if name == "teleport":
        return verify(build_teleportation(), mode=mode, completeness=teleport_completeness(), rules=rules)
    if name == "state-transfer":
        return verify(build_state_transfer(), mode=mode, completeness=transfer_completeness(), rules=rules)
    raise ValueError(f"unknown protocol {name!r}")


# ---------------------------------------------------------------- unifying


def unify(mode: str = "teleport_to_transfer") -> ProofTrace:
    """Rewrite one identity-correction core into the other."""
    a, b = teleport_core(), transfer_core()
    if mode == "transfer_to_teleport":
        a, b = b, a
    elif mode != "teleport_to_transfer":
        raise ValueError(f"unknown mode {mode!r}")
    proof = prove_equal(a, b)
    if isinstance(proof, NotProved):
        raise RuntimeError("the two cores did not unify")
    return proof.lhs
