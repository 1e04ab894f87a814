import json

import numpy as np
import pytest

from basisdiag import diagram as dg
from basisdiag import hilb, protocols
from helpers import KET0, KET1, PAULI_X, PAULI_Z

PHI = np.kron(KET0, KET0) + np.kron(KET1, KET1)  # unnormalised Bell state
PAULIS = [np.eye(2), PAULI_X, PAULI_Z, PAULI_X @ PAULI_Z]


@pytest.fixture(scope="module")
def interp():
    return protocols.protocol_interpretation()


@pytest.mark.parametrize("x", range(4))
def test_teleport_projector_oracle(interp, x):
    U = np.kron(PAULIS[x], np.eye(2))
    expected = U @ np.outer(PHI, PHI.conj()) @ U.conj().T
    assert np.allclose(hilb.evaluate_matrix(protocols.teleport_projector(x), interp), expected)


def test_teleport_projectors_sum_to_twice_identity(interp):
    total = sum(hilb.evaluate_matrix(protocols.teleport_projector(x), interp) for x in range(4))
    assert np.allclose(total, 2 * np.eye(4))


@pytest.mark.parametrize("x", range(4))
def test_teleport_branch_is_identity(interp, x):
    M = hilb.evaluate_matrix(protocols.teleport_branch(x), interp)
    assert np.allclose(M, np.eye(2), atol=1e-9)


def test_teleport_without_correction_fails(interp):
    ok = [np.allclose(hilb.evaluate_matrix(protocols.teleport_branch(x, correct=False), interp), np.eye(2))
          for x in range(4)]
    assert ok[0] and not any(ok[1:])


def test_parity_projectors_oracle(interp):
    even = np.diag([1, 0, 0, 1])
    odd = np.diag([0, 1, 1, 0])
    p0 = hilb.evaluate_matrix(protocols.parity_projector(0), interp)
    p1 = hilb.evaluate_matrix(protocols.parity_projector(1), interp)
    assert np.allclose(p0, even) and np.allclose(p1, odd)


def test_phase_projectors_oracle(interp):
    plus = KET0 + KET1
    for y, Z in enumerate([np.eye(2), PAULI_Z]):
        v = Z @ plus
        got = hilb.evaluate_matrix(protocols.phase_projector(y), interp)
        assert np.allclose(got, np.outer(v, v.conj()))


@pytest.mark.parametrize("x,y", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_transfer_branch_is_unit_scalar_identity(interp, x, y):
    M = hilb.evaluate_matrix(protocols.transfer_branch(x, y), interp)
    ok, c = hilb.equal_upto_scalar(M, np.eye(2))
    assert ok and abs(abs(c) - 1) <= 1e-9


def test_transfer_corrections_from_oracle():
    assert protocols.derive_transfer_correction(0, 0) == ("I", "I")
    assert protocols.derive_transfer_correction(1, 0) == ("X", "I")
    assert protocols.derive_transfer_correction(0, 1) == ("I", "Z")
    assert protocols.derive_transfer_correction(1, 1) == ("X", "Z")


@pytest.mark.parametrize("name", ["teleport", "state-transfer"])
@pytest.mark.parametrize("mode", ["numeric", "diagrammatic", "both"])
def test_verify_passes(name, mode):
    rep = protocols.verify_protocol(name, mode)
    assert rep.status == "pass"
    assert len(rep.branches) == 4


def test_no_frobenius_splits_the_protocols():
    assert protocols.verify_protocol("teleport", "diagrammatic", "no-frobenius").passed
    rep = protocols.verify_protocol("state-transfer", "both", "no-frobenius")
    assert rep.status == "PARTIAL"


def test_uncorrected_branches_fail():
    branches = [protocols.Branch((x,), protocols.teleport_branch(x, correct=False)) for x in range(4)]
    assert protocols.verify(branches, mode="numeric").status == "fail"


def test_report_json_is_stable_and_sorted():
    a = protocols.verify_protocol("state-transfer", "both").to_json()
    b = protocols.verify_protocol("state-transfer", "both").to_json()
    assert a == b
    data = json.loads(a)
    assert list(data) == sorted(data)
    assert data["status"] == "pass"


def test_unify_uses_frobenius():
    trace = protocols.unify()
    assert trace.rules_used() == ["frobenius"]
    assert dg.isomorphic(trace.final, protocols.transfer_core())
    back = protocols.unify("transfer_to_teleport")
    assert back.steps[0].direction == "backward"


def test_cores_are_identity(interp):
    for core in (protocols.teleport_core(), protocols.teleport_core("compact"), protocols.transfer_core()):
        assert np.allclose(hilb.evaluate_matrix(core, interp), np.eye(2))


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        protocols.verify_protocol("teleport", "sideways")
