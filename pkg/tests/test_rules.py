from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from basisdiag import diagram as dg
from basisdiag import hilb
from basisdiag import structures as st
from basisdiag.errors import BudgetExhausted, CertificationError, SignatureMismatch, StaleMatch
from basisdiag.rules import (
    FAMILIES, NotProved, ProofTrace, RewriteRule, Step, apply, certify, check_rules, find_matches,
    get_rule, normalize, prove_equal, registry, replay,
)
from helpers import basis_diagram, rewrite_applications

seeds = hs.integers(min_value=0, max_value=10**6)
A = "A"
INTERPS = [hilb.Interpretation({A: st.builtin(b)}) for b in ("Z", "X", "Y")]


def test_registry_is_certified_and_covers_families():
    rules = registry()
    assert len({r.name for r in rules}) == len(rules)
    assert {r.family for r in rules} == set(FAMILIES)
    assert all(certify(r) <= 1e-9 for r in rules)


def test_false_rule_fails_certification():
    copy_vs_product = RewriteRule(
        "wrong", dg.delta(A), dg.then(dg.gamma(A), dg.tensor(dg.gamma_dagger(A), dg.gamma_dagger(A))),
        False, "frobenius")
    assert certify(copy_vs_product) > 1e-3
    with pytest.raises(CertificationError):
        check_rules([copy_vs_product])


def test_rule_sides_must_share_a_boundary():
    with pytest.raises(ValueError):
        RewriteRule("bad", dg.delta(A), dg.identity(A))


def test_snake_matches_and_rewrites_to_wire():
    host = dg.then(dg.tensor(dg.identity(A), dg.cup(A)), dg.tensor(dg.cap(A), dg.identity(A)))
    rule = get_rule("snake-left")
    ms = find_matches(rule, host, "forward")
    assert len(ms) == 1
    new, step = apply(rule, ms[0], host)
    assert dg.isomorphic(new, dg.identity(A))
    assert str(step) == "snake-left forward @ 0 1"


def test_matching_binds_dual_objects():
    host = dg.then(dg.delta("B*"), dg.delta_dagger("B*"))
    ms = find_matches(get_rule("specialness"), host, "forward")
    assert len(ms) == 1
    assert dict(ms[0].bindings.objects)["A"] == ("B", True)


def test_box_rules_need_tags():
    host = dg.then(dg.box("u", [A], [A]), dg.box("u", [A], [A], "dagger"))
    rule = get_rule("unitary-cancellation")
    assert find_matches(rule, host, "forward") == []
    assert len(find_matches(rule, host, "forward", {"u": {"unitary"}})) == 1
    # a permutation is unitary too
    assert len(find_matches(rule, host, "forward", {"u": {"permutation"}})) == 1


def test_stale_match_is_rejected():
    host = dg.then(dg.delta(A), dg.delta_dagger(A))
    rule = get_rule("specialness")
    m = find_matches(rule, host, "forward")[0]
    other = dg.tensor(host, dg.identity(A))
    with pytest.raises(StaleMatch):
        apply(rule, m, other)


def test_step_line_format_round_trips():
    s = Step("spider-fusion", "forward", (3, 7))
    assert Step.parse(str(s)) == s


def test_closed_loop_becomes_dimension():
    loop = dg.then(dg.cup(A), dg.dagger(dg.cup(A)))
    nf, _ = normalize(loop)
    assert dg.isomorphic(nf, dg.dimension(A))
    nf_num, _ = normalize(loop, dims={A: 2})
    assert [g.value for g in nf_num.nodes.values()] == [2]


def test_budget_is_enforced():
    f = basis_diagram(3)
    with pytest.raises(BudgetExhausted):
        normalize(f, budget=1)


def test_prove_equal_requires_matching_signatures():
    with pytest.raises(SignatureMismatch):
        prove_equal(dg.delta(A), dg.identity(A))


def test_prove_equal_frobenius_law():
    lhs = dg.then(dg.tensor(dg.identity(A), dg.delta(A)), dg.tensor(dg.delta_dagger(A), dg.identity(A)))
    rhs = dg.then(dg.delta_dagger(A), dg.delta(A))
    proof = prove_equal(lhs, rhs)
    assert proof.proved and proof.rules_used() == ["frobenius"]
    assert isinstance(prove_equal(lhs, rhs, rules="no-frobenius"), NotProved)


def test_information_flow_is_provable():
    f = dg.then(dg.gamma_dagger(A), dg.delta(A))
    g = dg.then(dg.cup(A), dg.tensor(dg.dualiser_dagger(A), dg.identity(A)))
    assert prove_equal(f, g).proved
    assert prove_equal(f, g, rules="no-frobenius").proved


def test_product_state_is_not_the_copy_state():
    f = dg.tensor(dg.gamma_dagger(A), dg.gamma_dagger(A))
    g = dg.then(dg.gamma_dagger(A), dg.delta(A))
    res = prove_equal(f, g)
    assert isinstance(res, NotProved)
    assert len(res.lhs_normal_form.nodes) == 2 and len(res.rhs_normal_form.nodes) == 1


def test_rewrite_applications_preserve_semantics():
    for rule, direction, basis, before, after, interp in rewrite_applications(60, seed0=1000):
        a, b = hilb.evaluate(before, interp), hilb.evaluate(after, interp)
        assert st.max_dev(a, b) <= 1e-9, (rule.name, direction, basis)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_normalize_preserves_semantics_and_replays(seed):
    f = basis_diagram(seed)
    nf, trace = normalize(f)
    for interp in INTERPS:
        assert np.allclose(hilb.evaluate(f, interp), hilb.evaluate(nf, interp), atol=1e-9)
    assert dg.isomorphic(replay(trace), nf)


def test_equal_signatures_share_normal_forms():
    by_sig = defaultdict(set)
    for seed in range(120):
        f = basis_diagram(seed)
        by_sig[f.signature].add(dg.canonical_key(normalize(f)[0]))
    assert all(len(keys) == 1 for keys in by_sig.values())


def test_normal_form_of_connected_basis_diagram_is_one_spider():
    for seed in range(40):
        f = basis_diagram(seed)
        nf, _ = normalize(f)
        if len(f.dom) == 1 and f.dom == f.cod:
            # a one-in one-out spider is the plain wire
            assert not nf.nodes
        else:
            assert len(nf.nodes) == 1


def test_trace_text_lists_steps():
    f = dg.then(dg.delta(A), dg.delta_dagger(A))
    _, trace = normalize(f)
    assert isinstance(trace, ProofTrace)
    assert trace.lines()[0] == "spider-intro forward @ 0"
    assert trace.rules_used().count("spider-fusion") == 1
