# -------------------------------------------------------------
# @file          qstate.py
# @author        qnoise contributors
# @created       2026-09-03
# @description   Dense density matrices, local operator embedding,
#                marginal distributions and shot sampling
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

import string
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from qnoise.errors import StateError
from qnoise.noise_utils import (
    DIST_TOL, HERMITIAN_TOL, MAX_QUBITS, PROB_FLOOR, PSD_TOL, TRACE_TOL
)

if TYPE_CHECKING:
    from qnoise.channels import KrausChannel


# Basis-state convention used everywhere in the package:
# -> qubit 0 is the least-significant bit of a basis index
# -> a local k-qubit operator acting on targets [t0, ..., t(k-1)] uses the
#    same rule, t0 is the least-significant bit of the operator's own index


def density_matrix_bytes(n_qubits: int) -> int:
    return 16 * (1 << (2 * n_qubits))


@dataclass(frozen=True, slots=True)
class DensityMatrix:
    n_qubits: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        dim = 1 << self.n_qubits
        if self.data.shape != (dim, dim):
            raise StateError(
                f"Density matrix for {self.n_qubits} qubits must be {dim}x{dim}, got {self.data.shape}"
            )
        self.data.setflags(write=False)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> 'DensityMatrix':
        arr = np.array(arr, dtype=complex)
        n = int(round(np.log2(arr.shape[0]))) if arr.ndim == 2 and arr.shape[0] else -1
        if n < 0 or arr.shape != (1 << n, 1 << n):
            raise StateError(f"Not a 2^n x 2^n matrix: shape {arr.shape}")
        return cls(n, arr)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def purity(self) -> float:
        # tr(rho^2) = sum |rho_ij|^2 for hermitian rho
        return float(np.real(np.vdot(self.data, self.data)))

    def check(self) -> dict[str, float]:
        herm = float(np.max(np.abs(self.data - self.data.conj().T)))
        tr = abs(np.trace(self.data) - 1.0)
        min_eig = float(np.min(np.linalg.eigvalsh((self.data + self.data.conj().T) / 2)))
        return {'hermiticity': herm, 'trace': float(tr), 'min_eigenvalue': min_eig}

    def is_valid(self) -> bool:
        c = self.check()
        return c['hermiticity'] <= HERMITIAN_TOL and c['trace'] <= TRACE_TOL and c['min_eigenvalue'] >= -PSD_TOL


@dataclass(frozen=True, slots=True)
class Distribution:
    n_bits: int
    probs: dict[int, float]

    def __post_init__(self) -> None:
        limit = 1 << self.n_bits
        for outcome, p in self.probs.items():
            if not 0 <= outcome < limit:
                raise StateError(f"Outcome {outcome} out of range for {self.n_bits} measured qubits")
            if not -PROB_FLOOR <= p <= 1.0 + DIST_TOL:
                raise StateError(f"Probability {p} for outcome {outcome} outside [0, 1]")
        if abs((total := sum(self.probs.values())) - 1.0) > DIST_TOL:
            raise StateError(f"Probabilities sum to {total!r}, expected 1")

    @classmethod
    def from_array(cls, arr: Sequence[float] | np.ndarray, n_bits: int | None = None) -> 'Distribution':
        arr = np.asarray(arr, dtype=float)
        if n_bits is None: n_bits = max(int(np.ceil(np.log2(max(len(arr), 1)))), 0)
        return cls(n_bits, {i: float(p) for i, p in enumerate(arr) if p > PROB_FLOOR})

    @property
    def outcomes(self) -> list[int]:
        return sorted(self.probs)

    @property
    def support(self) -> set[int]:
        return {o for o, p in self.probs.items() if p > 0.0}

    def get(self, outcome: int) -> float:
        return self.probs.get(outcome, 0.0)

    def to_array(self, n_outcomes: int | None = None) -> np.ndarray:
        out = np.zeros(n_outcomes if n_outcomes is not None else 1 << self.n_bits)
        for o, p in self.probs.items(): out[o] = p
        return out

    def to_rows(self) -> list[tuple[int, float]]:
        return [(o, self.probs[o]) for o in self.outcomes]


@dataclass(frozen=True, slots=True)
class ShotCounts:
    n_bits: int
    counts: dict[int, int]
    total_shots: int

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.counts.values()):
            raise StateError("Shot counts must be non-negative")
        if sum(self.counts.values()) != self.total_shots:
            raise StateError(
                f"Counts sum to {sum(self.counts.values())}, expected {self.total_shots} shots"
            )

    def to_rows(self) -> list[tuple[int, int]]:
        return [(o, self.counts[o]) for o in sorted(self.counts)]


def pure_state(n_qubits: int, basis_index: int = 0) -> DensityMatrix:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise StateError(
            f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits} "
            f"({density_matrix_bytes(n_qubits)} bytes for a dense state)"
        )
    if not 0 <= basis_index < (dim := 1 << n_qubits):
        raise StateError(f"Basis index {basis_index} out of range for {n_qubits} qubits")
    data = np.zeros((dim, dim), dtype=complex)
    data[basis_index, basis_index] = 1.0
    return DensityMatrix(n_qubits, data)


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    dim = 1 << n_qubits
    return DensityMatrix(n_qubits, np.eye(dim, dtype=complex) / dim)


def _check_targets(n_qubits: int, targets: Sequence[int], op_dim: int) -> None:
    if len(set(targets)) != len(targets):
        raise StateError(f"Repeated target qubit in {list(targets)}")
    if any(not 0 <= t < n_qubits for t in targets):
        raise StateError(f"Target qubit out of range in {list(targets)} for {n_qubits} qubits")
    if op_dim != 1 << len(targets):
        raise StateError(
            f"Operator dimension {op_dim} does not match {len(targets)} target qubit(s)"
        )


def _axes(n_qubits: int, targets: Sequence[int]) -> tuple[list[int], list[int]]:
    # C-order reshape puts the most-significant bit (qubit n-1) on axis 0
    # -> the operator tensor's axes run from its msb (last target) down
    rows = [n_qubits - 1 - t for t in reversed(targets)]
    return rows, [n_qubits + r for r in rows]

def _contract(tensor: np.ndarray, op: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    op_t = op.reshape((2,) * (2 * k))
    out = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)

def _sandwich(tensor: np.ndarray, op: np.ndarray, rows: list[int], cols: list[int]) -> np.ndarray:
    return _contract(_contract(tensor, op, rows), op.conj(), cols)


def apply_unitary(rho: DensityMatrix, unitary: np.ndarray, targets: Sequence[int]) -> DensityMatrix:
    unitary = np.asarray(unitary, dtype=complex)
    if unitary.ndim != 2 or unitary.shape[0] != unitary.shape[1]:
        raise StateError(f"Unitary must be square, got shape {unitary.shape}")
    _check_targets(rho.n_qubits, targets, unitary.shape[0])

    n = rho.n_qubits
    rows, cols = _axes(n, targets)
    tensor = rho.data.reshape((2,) * (2 * n))
    out = _sandwich(tensor, unitary, rows, cols)
    return DensityMatrix(n, np.ascontiguousarray(out).reshape(rho.dim, rho.dim))


def apply_kraus(rho: DensityMatrix, channel: 'KrausChannel', targets: Sequence[int]) -> DensityMatrix:
    if channel.arity != len(targets):
        raise StateError(
            f"Channel of arity {channel.arity} applied to {len(targets)} target(s)"
        )
    _check_targets(rho.n_qubits, targets, 1 << channel.arity)

    n = rho.n_qubits
    rows, cols = _axes(n, targets)
    tensor = rho.data.reshape((2,) * (2 * n))
    acc = np.zeros_like(tensor)
    for op in channel.operators: acc += _sandwich(tensor, op, rows, cols)
    return DensityMatrix(n, np.ascontiguousarray(acc).reshape(rho.dim, rho.dim))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    # the reduced state keeps the package convention, smallest kept qubit is its lsb
    n = rho.n_qubits
    keep = sorted(set(keep))
    if not keep or any(not 0 <= q < n for q in keep):
        raise StateError(f"Invalid qubits to keep: {keep}")
    if 2 * n > len(string.ascii_letters):
        raise StateError(f"partial_trace supports at most {len(string.ascii_letters) // 2} qubits")

    letters = string.ascii_letters
    row = [letters[a] for a in range(n)]
    col = [letters[n + a] for a in range(n)]
    for q in range(n):
        if q not in keep: col[n - 1 - q] = row[n - 1 - q]
    out_axes = [n - 1 - q for q in reversed(keep)]
    spec = ''.join(row) + ''.join(col) + '->' + ''.join(row[a] for a in out_axes) + ''.join(col[a] for a in out_axes)

    reduced = np.einsum(spec, rho.data.reshape((2,) * (2 * n)))
    m = len(keep)
    return DensityMatrix(m, np.ascontiguousarray(reduced).reshape(1 << m, 1 << m))


def measure_distribution(rho: DensityMatrix, measured: Sequence[int]) -> Distribution:
    # outcome bit i is the value of qubit measured[i]
    if not measured:
        raise StateError("Measurement set is empty")
    if len(set(measured)) != len(measured):
        raise StateError(f"Repeated qubit in measurement set {list(measured)}")
    if any(not 0 <= q < rho.n_qubits for q in measured):
        raise StateError(f"Measured qubit out of range in {list(measured)}")

    diag = np.clip(np.real(np.diagonal(rho.data)), 0.0, None)
    idx = np.arange(rho.dim)
    outcome = np.zeros(rho.dim, dtype=np.int64)
    for bit, q in enumerate(measured): outcome |= ((idx >> q) & 1) << bit

    m = len(measured)
    probs = np.bincount(outcome, weights=diag, minlength=1 << m)
    return Distribution.from_array(probs, m)


def sample_shots(dist: Distribution, shots: int, seed: int | np.random.SeedSequence | None = None) -> ShotCounts:
    if shots < 1:
        raise StateError(f"shots must be >= 1, got {shots}")
    outcomes = dist.outcomes
    p = np.array([dist.probs[o] for o in outcomes], dtype=float)
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p / p.sum())
    logger.debug("Sampled %d shots over %d outcomes", shots, len(outcomes))
    return ShotCounts(
        dist.n_bits,
        {o: int(c) for o, c in zip(outcomes, draws) if c > 0},
        shots,
    )
