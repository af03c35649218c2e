# -------------------------------------------------------------
# @file          gate_kind.py
# @author        qnoise contributors
# @created       2026-09-02
# @description   Enum for the different kinds of gates and their
#                unitary matrices
# @license       MIT
# -------------------------------------------------------------

from enum import Enum

import numpy as np

from qnoise.noise_utils import GATE_ALIASES


class GateKind(str, Enum):
    H = 'H'
    X = 'X'
    I = 'I'
    CNOT = 'CNOT'
    CCX = 'CCX'
    PREPARE = 'PREPARE'
    MEASURE = 'MEASURE'

    @classmethod
    def from_token(cls, token: str) -> 'GateKind':
        try: return cls(GATE_ALIASES.get(token.lower(), token.upper()))
        except ValueError as exc:
            valid = ", ".join(sorted(set(GATE_ALIASES) | {k.value for k in cls}))
            raise ValueError(
                f"Unknown gate '{token}'. Expected one of: {valid}"
            ) from exc

    @property
    def arity(self) -> int | None:
        # None means "any number of operands"
        return _ARITY.get(self)

    @property
    def is_unitary(self) -> bool:
        return self in _MATRICES

    @property
    def is_single_qubit(self) -> bool:
        return self in (GateKind.H, GateKind.X, GateKind.I)

    @property
    def is_entangling(self) -> bool:
        return self in (GateKind.CNOT, GateKind.CCX)

    def matrix(self) -> np.ndarray:
        if (m := _MATRICES.get(self)) is None:
            raise ValueError(f"Gate '{self.value}' has no unitary matrix")
        return m


def _controlled_x(n_controls: int) -> np.ndarray:
    # operand order is (controls..., target), operand 0 is the least-significant
    # bit of the local index, so the target is the most-significant bit
    dim = 1 << (n_controls + 1)
    ctrl_mask = (1 << n_controls) - 1
    tgt_bit = 1 << n_controls
    m = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        row = col ^ tgt_bit if (col & ctrl_mask) == ctrl_mask else col
        m[row, col] = 1.0
    return m


_ARITY: dict[GateKind, int | None] = {
    GateKind.H: 1,
    GateKind.X: 1,
    GateKind.I: 1,
    GateKind.CNOT: 2,
    GateKind.CCX: 3,
    GateKind.PREPARE: None,
    GateKind.MEASURE: None,
}

_MATRICES: dict[GateKind, np.ndarray] = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.I: np.eye(2, dtype=complex),
    GateKind.CNOT: _controlled_x(1),
    GateKind.CCX: _controlled_x(2),
}

for _m in _MATRICES.values(): _m.setflags(write=False)


PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
