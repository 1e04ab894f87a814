"""The registered equational laws, each certified against the tensor semantics."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .. import hilb
from .. import structures as st
from ..diagram import (
    Diagram, Kind, WireType, box, cap, cup, delta, delta_dagger, dualiser, dualiser_dagger,
    gamma, gamma_dagger, identity, swap, tensor, then,
)
from ..errors import CertificationError
from .core import Bindings, BoxBinding, RewriteRule, instantiate

A, AS = "A", "A*"
CERT_TOL = 1e-9
CERT_BASES = ("Z", "X", "Y")


def _f(name: str = "$f", variant: str = "plain") -> Diagram:
    return box(name, [A], [A], variant)


def _rules() -> list[RewriteRule]:
    R = RewriteRule
    idA, idAs = identity(A), identity(AS)
    f, fd, ft = _f(), _f(variant="dagger"), _f(variant="transpose")
    g, gd = _f("$g"), _f("$g", "dagger")
    copy, merge = delta(A), delta_dagger(A)
    return [
        # compact structure
        R("snake-left", then(tensor(idA, cup(A)), tensor(cap(A), idA)), idA, False, "compact"),
        R("snake-right", then(tensor(cup(A), idAs), tensor(idAs, cap(A))), idAs, False, "compact"),
        R("dual-object", cap(AS), then(swap(AS, A), cap(A)), False, "compact"),
        R("slide", then(cup(A), tensor(idAs, f)), then(cup(A), tensor(ft, idA)), True, "compact"),
        R("unitary-cancellation", then(f, fd), idA, False, "compact", {"$f": "unitary"}),
        # dualisers
        R("dualiser-unitarity", then(dualiser(A), dualiser_dagger(A)), idA, False, "dualiser"),
        R("dualiser-unitarity-dual", then(dualiser_dagger(A), dualiser(A)), idAs, False, "dualiser"),
        R("info-flow-left", then(gamma_dagger(A), copy),
          then(cup(A), tensor(dualiser_dagger(A), idA)), True, "dualiser"),
        R("info-flow-right", then(gamma_dagger(A), copy),
          then(cup(AS), tensor(idA, dualiser_dagger(A))), True, "dualiser"),
        R("factorisation-cap", then(merge, gamma(A)),
          then(tensor(idA, dualiser(A)), cap(A)), True, "dualiser"),
        R("factorisation-cap-dual", then(merge, gamma(A)),
          then(tensor(dualiser(A), idA), cap(AS)), True, "dualiser"),
        R("dualiser-copy", then(copy, tensor(dualiser(A), dualiser(A))),
          then(dualiser(A), delta(AS)), True, "dualiser"),
        R("dualiser-delete", then(dualiser(A), gamma(AS)), gamma(A), True, "dualiser"),
        # Frobenius package
        R("specialness", then(copy, merge), idA, False, "frobenius"),
        R("frobenius", then(tensor(idA, copy), tensor(merge, idA)), then(merge, copy), True, "frobenius"),
        R("frobenius-mirror", then(tensor(copy, idA), tensor(idA, merge)), then(merge, copy),
          True, "frobenius"),
        R("counit-left", then(copy, tensor(gamma(A), idA)), idA, False, "frobenius"),
        R("counit-right", then(copy, tensor(idA, gamma(A))), idA, False, "frobenius"),
        R("unit-left", then(tensor(gamma_dagger(A), idA), merge), idA, False, "frobenius"),
        R("unit-right", then(tensor(idA, gamma_dagger(A)), merge), idA, False, "frobenius"),
        R("coassociativity", then(copy, tensor(copy, idA)), then(copy, tensor(idA, copy)),
          True, "frobenius"),
        R("cocommutativity", then(copy, swap(A, A)), copy, True, "frobenius"),
        # permutations of the copyable basis
        R("permutation-copy", then(f, copy), then(copy, tensor(f, f)), True, "permutation",
          {"$f": "permutation"}),
        R("permutation-unit", then(gamma_dagger(A), f), gamma_dagger(A), False, "permutation",
          {"$f": "permutation"}),
        R("permutation-delete", then(f, gamma(A)), gamma(A), False, "permutation",
          {"$f": "permutation"}),
        R("permutation-cancellation", then(f, fd), idA, False, "permutation",
          {"$f": "permutation"}),
        # phase maps
        R("phase-slide", then(copy, tensor(g, idA)), then(copy, tensor(idA, g)), True, "phase",
          {"$g": "phase"}),
        R("phase-slide-dual", then(tensor(g, idA), merge), then(tensor(idA, g), merge), True,
          "phase", {"$g": "phase"}),
        R("phase-through", then(copy, tensor(g, idA)), then(g, copy), True, "phase",
          {"$g": "phase"}),
        R("phase-cancellation", then(g, gd), idA, False, "phase", {"$g": "phase"}),
    ]


# --------------------------------------------------------------- certificates


def _box_vars(rule: RewriteRule) -> dict[str, tuple]:
    out = {}
    for side in (rule.lhs, rule.rhs):
        for gen in side.nodes.values():
            if gen.kind is Kind.BOX and gen.name.startswith("$"):
                out[gen.name] = (gen.dom, gen.cod)
    return out


def _tagged_matrix(tag: str | None, s: st.BasisStructure, seed: int) -> np.ndarray:
    B = st.basis_vectors(s)
    if tag == "unitary":
        return hilb.random_unitary(s.dim, seed)
    if tag == "permutation":
        P = np.roll(np.eye(s.dim), 1, axis=0)
        return B @ P @ B.conj().T
    if tag == "phase":
        phases = np.exp(1j * np.linspace(0.7, 2.3, s.dim))
        return B @ np.diag(phases) @ B.conj().T
    return hilb.random_matrix((s.dim, s.dim), seed)


def certify(rule: RewriteRule, bases=CERT_BASES, seed: int = 11) -> float:
    """Largest deviation between the two sides over bases and orientations."""
    worst = 0.0
    boxvars = _box_vars(rule)
    for basis in bases:
        structure = st.builtin(basis)
        for flip in (False, True):
            objs = (("A", ("Q", flip)),)
            interp = hilb.Interpretation({"Q": structure})
            wire = WireType("Q", flip)
            bindings = []
            for k, (var, (dom, cod)) in enumerate(sorted(boxvars.items())):
                name = var[1:]
                sub = lambda ts: tuple(WireType("Q", t.dualized != flip) for t in ts)  # noqa: E731
                bindings.append((var, BoxBinding(name, "plain", sub(dom), sub(cod))))
                M = _tagged_matrix(rule.box_tags.get(var), interp.structure(wire), seed + k)
                interp.boxes[name] = M
            b = Bindings(objs, tuple(bindings))
            lhs = hilb.evaluate(instantiate(rule.lhs, b), interp)
            rhs = hilb.evaluate(instantiate(rule.rhs, b), interp)
            worst = max(worst, st.max_dev(lhs, rhs))
    return worst


def check_rules(rules: list[RewriteRule], tol: float = CERT_TOL) -> dict[str, float]:
    residuals = {}
    for r in rules:
        res = certify(r)
        if res > tol:
            raise CertificationError(f"rule {r.name} fails its certificate (residual {res:.3e})")
        residuals[r.name] = res
    return residuals


@lru_cache(maxsize=1)
def _certified() -> tuple[tuple[RewriteRule, ...], tuple]:
    rules = _rules()
    residuals = check_rules(rules)
    return tuple(rules), tuple(residuals.items())


def registry() -> list[RewriteRule]:
    """All registered rules; construction certifies every one of them."""
    return list(_certified()[0])


def certificates() -> dict[str, float]:
    return dict(_certified()[1])


def get_rule(name: str) -> RewriteRule:
    for r in registry():
        if r.name == name:
            return r
    raise KeyError(f"no rule named {name!r}")


FAMILIES = ("compact", "dualiser", "frobenius", "permutation", "phase")


def rules_in(*families: str) -> list[RewriteRule]:
    return [r for r in registry() if r.family in families]
