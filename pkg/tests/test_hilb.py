import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from basisdiag import diagram as dg
from basisdiag import hilb
from basisdiag import structures as st
from basisdiag.errors import ShapeMismatch, UnknownBox, UnknownObject
from helpers import HADAMARD, KET0, KET1, PAULI_X, S2

seeds = hs.integers(min_value=0, max_value=10**6)
BOXES = (("f", ("A",), ("A",)), ("g", ("A", "A"), ("A",)), ("h", ("A",), ("A*",)))


def random_interp(basis: str, seed: int) -> hilb.Interpretation:
    return hilb.Interpretation(
        {"A": st.builtin(basis)},
        {"f": hilb.random_matrix((2, 2), seed), "g": hilb.random_matrix((2, 2, 2), seed + 1),
         "h": hilb.random_matrix((2, 2), seed + 2)},
    )


def test_bell_state_oracle():
    z = hilb.qubit_interpretation("Z")
    bell = hilb.evaluate(dg.then(dg.gamma_dagger("A"), dg.delta("A")), z).reshape(-1)
    assert np.allclose(bell, np.kron(KET0, KET0) + np.kron(KET1, KET1))


def test_y_bell_state_is_the_odd_pairing():
    y = hilb.qubit_interpretation("Y")
    bell = hilb.evaluate(dg.then(dg.gamma_dagger("A"), dg.delta("A")), y).reshape(-1)
    assert np.allclose(bell, np.kron(KET0, KET0) - np.kron(KET1, KET1))


def test_cap_and_cup_use_the_ambient_pairing():
    for basis in ("Z", "X", "Y"):
        interp = hilb.qubit_interpretation(basis)
        assert np.allclose(hilb.evaluate(dg.cap("A"), interp), np.eye(2))
        assert np.allclose(hilb.evaluate(dg.cup("A"), interp), np.eye(2))


def test_sequential_is_matrix_product_and_parallel_is_kron():
    interp = hilb.qubit_interpretation("Z", f=HADAMARD, g=PAULI_X)
    f, g = dg.box("f", ["A"], ["A"]), dg.box("g", ["A"], ["A"])
    assert np.allclose(hilb.evaluate_matrix(dg.then(f, g), interp), PAULI_X @ HADAMARD)
    assert np.allclose(hilb.evaluate_matrix(dg.tensor(f, g), interp), np.kron(HADAMARD, PAULI_X))


def test_swap_permutes_factors():
    interp = hilb.qubit_interpretation("Z")
    sw = hilb.evaluate_matrix(dg.swap("A", "A"), interp)
    u, v = np.array([1, 2j]), np.array([3, -1])
    assert np.allclose(sw @ np.kron(u, v), np.kron(v, u))


def test_copy_state_in_x_basis():
    x = hilb.qubit_interpretation("X")
    plus = (KET0 + KET1) * S2
    copied = hilb.evaluate_matrix(dg.delta("A"), x) @ plus
    assert np.allclose(copied, np.kron(plus, plus))


def test_dimension_scalar():
    interp = hilb.qubit_interpretation("Z")
    assert hilb.evaluate(dg.dimension("A"), interp) == pytest.approx(2)
    loop = dg.then(dg.cup("A"), dg.swap("A*", "A"), dg.cap("A"))
    assert hilb.evaluate(loop, interp) == pytest.approx(2)


def test_errors():
    interp = hilb.qubit_interpretation("Z")
    with pytest.raises(UnknownBox):
        hilb.evaluate(dg.box("nope", ["A"], ["A"]), interp)
    with pytest.raises(UnknownObject):
        hilb.evaluate(dg.delta("B"), interp)
    bad = interp.with_box("f", np.ones(3))
    with pytest.raises(ShapeMismatch):
        hilb.evaluate(dg.box("f", ["A"], ["A"]), bad)


def test_equal_up_to_scalar():
    ok, c = hilb.equal_upto_scalar(1j * PAULI_X, PAULI_X)
    assert ok and c == pytest.approx(1j)
    ok, _ = hilb.equal_upto_scalar(HADAMARD, PAULI_X)
    assert not ok


def test_random_unitary_is_unitary():
    for seed in range(10):
        assert st.is_unitary(hilb.random_unitary(3, seed))


@settings(max_examples=80, deadline=None)
@given(seeds, hs.sampled_from(["Z", "X", "Y"]))
def test_dagger_evaluates_to_adjoint(seed, basis):
    f = hilb.random_diagram(seed, boxes=BOXES, max_nodes=6)
    interp = random_interp(basis, seed)
    M = hilb.evaluate_matrix(f, interp)
    assert np.allclose(hilb.evaluate_matrix(dg.dagger(f), interp), M.conj().T, atol=1e-9)


@settings(max_examples=80, deadline=None)
@given(seeds, hs.sampled_from(["Z", "X", "Y"]))
def test_generator_transpose_agrees_with_cups(seed, basis):
    f = hilb.random_diagram(seed, boxes=BOXES, max_nodes=6)
    interp = random_interp(basis, seed)
    a = hilb.evaluate(dg.transpose(f), interp)
    b = hilb.evaluate(dg.transpose_via_cups(f), interp)
    assert np.allclose(a, b, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_contraction_order_does_not_matter(seed):
    f = hilb.random_diagram(seed, boxes=BOXES, connected=False)
    interp = random_interp("Y", seed)
    a = hilb.evaluate(f, interp, order="greedy")
    b = hilb.evaluate(f, interp, order="sequential")
    assert np.allclose(a, b, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_snake_is_identity_for_conjugated_structures(seed):
    s = st.conjugate_by_unitary(st.builtin("Z"), hilb.random_unitary(2, seed))
    interp = hilb.Interpretation({"A": s})
    snake = dg.then(dg.tensor(dg.identity("A"), dg.cup("A")), dg.tensor(dg.cap("A"), dg.identity("A")))
    assert np.allclose(hilb.evaluate(snake, interp), np.eye(2), atol=1e-9)
