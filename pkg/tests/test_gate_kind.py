import numpy as np
import pytest
from numpy.testing import assert_allclose

from qnoise.gate_kind import GateKind


@pytest.mark.parametrize("token, kind", [
    ("h", GateKind.H),
    ("Hadamard", GateKind.H),
    ("cx", GateKind.CNOT),
    ("CNOT", GateKind.CNOT),
    ("toffoli", GateKind.CCX),
    ("id", GateKind.I),
    ("meas", GateKind.MEASURE),
    ("reset", GateKind.PREPARE),
])
def test_from_token(token, kind):
    assert GateKind.from_token(token) is kind


def test_unknown_token_lists_valid_names():
    with pytest.raises(ValueError, match="Unknown gate 'swap'.*CNOT"):
        GateKind.from_token("swap")


def test_arity():
    assert [GateKind(k).arity for k in ("H", "CNOT", "CCX")] == [1, 2, 3]
    assert GateKind.MEASURE.arity is None


def test_classification():
    assert GateKind.CCX.is_entangling and not GateKind.H.is_entangling
    assert GateKind.I.is_single_qubit
    assert not GateKind.MEASURE.is_unitary


@pytest.mark.parametrize("kind", [GateKind.H, GateKind.X, GateKind.I, GateKind.CNOT, GateKind.CCX])
def test_matrices_are_unitary(kind):
    m = kind.matrix()
    assert_allclose(m @ m.conj().T, np.eye(len(m)), atol=1e-15)


def test_ccx_flips_target_only_when_both_controls_set():
    m = GateKind.CCX.matrix()
    # operand 0 is the lowest local bit, the target is bit 2
    for col in range(8):
        row = col ^ 0b100 if col & 0b11 == 0b11 else col
        assert m[row, col] == 1


def test_matrix_is_read_only():
    with pytest.raises(ValueError):
        GateKind.X.matrix()[0, 0] = 1


def test_prepare_has_no_matrix():
    with pytest.raises(ValueError, match="no unitary"):
        GateKind.PREPARE.matrix()
