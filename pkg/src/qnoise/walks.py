# -------------------------------------------------------------
# @file          walks.py
# @author        qnoise contributors
# @created       2026-09-12
# @description   Discrete-time quantum walks on a cycle of N
#                states: Hadamard coin plus controlled increment
#                and decrement built from generalized CNOTs
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator, Sequence

from bitarray import bitarray

from qnoise.calibration import zero_noise_calibration
from qnoise.circuit import Architecture, Circuit, Gate
from qnoise.circuit_parser import emit_circuit
from qnoise.errors import WalkError
from qnoise.gate_kind import GateKind
from qnoise.noise_model import ModelVariant, build_model, simulate
from qnoise.qstate import Distribution


@dataclass(frozen=True, slots=True)
class WalkSpec:
    n_states: int
    steps: int = 1
    initial_position: int = 0

    def __post_init__(self) -> None:
        n = self.n_states
        if n < 4 or n & (n - 1):
            raise WalkError(f"N must be a power of two and at least 4, got {n}")
        if self.steps < 0:
            raise WalkError(f"steps must be non-negative, got {self.steps}")
        if not 0 <= self.initial_position < n:
            raise WalkError(f"initial_position must be in [0, {n}), got {self.initial_position}")

    @property
    def position_bits(self) -> int:
        return self.n_states.bit_length() - 1

    @property
    def workspace(self) -> int:
        # position + coin + (position - 1) ancillas
        return 2 * self.position_bits


@dataclass(frozen=True, slots=True)
class WalkLayout:
    position: tuple[int, ...]     # position[j] holds bit j of the walker's position
    ancillas: tuple[int, ...]     # ancillas[j] holds the j-th partial conjunction
    coin: int

    @property
    def n_qubits(self) -> int:
        return len(self.position) + len(self.ancillas) + 1


def walk_layout(n_states: int) -> WalkLayout:
    # interleaved chain p(k-1), a(k-2), p(k-2), ..., a(0), p(0), coin
    # -> every gate of the cascade acts on neighbouring qubits
    k = WalkSpec(n_states).position_bits
    position = tuple(2 * (k - 1 - j) for j in range(k))
    ancillas = tuple(2 * (k - 1 - j) - 1 for j in range(k - 1))
    return WalkLayout(position, ancillas, 2 * k - 1)


def walk_architecture(spec: WalkSpec, full: bool = False) -> Architecture:
    return Architecture.full(spec.workspace) if full else Architecture.linear(spec.workspace)


class AncillaPool:
    def __init__(self, qubits: Sequence[int]) -> None:
        self._qubits = tuple(qubits)
        self._free = bitarray(len(self._qubits))
        self._free.setall(True)

    def __len__(self) -> int:
        return len(self._qubits)

    @property
    def in_use(self) -> int:
        return self._free.count(False)

    def acquire(self) -> int:
        # lowest free slot first
        try: slot = self._free.index(True)
        except ValueError: raise WalkError(f"Out of ancillas, all {len(self)} are in use") from None
        self._free[slot] = False
        return self._qubits[slot]

    def release(self, qubit: int) -> None:
        slot = self._qubits.index(qubit)
        if self._free[slot]:
            raise WalkError(f"Ancilla {qubit} released twice")
        self._free[slot] = True

    @contextmanager
    def borrow(self, count: int) -> Iterator[list[int]]:
        taken = [self.acquire() for _ in range(count)]
        try: yield taken
        finally:
            for q in reversed(taken): self.release(q)


def generalized_cnot(controls: Sequence[int], target: int, ancillas: Sequence[int]) -> list[Gate]:
    n = len(controls)
    if n < 1:
        raise WalkError("A generalized CNOT needs at least one control")
    if n == 1:
        return [Gate(GateKind.CNOT, (controls[0], target))]
    if len(ancillas) < n - 1:
        raise WalkError(f"{n} controls need {n - 1} ancillas, got {len(ancillas)}")

    # conjunctions into the ancillas, then target, then uncompute
    compute = [Gate(GateKind.CCX, (controls[0], controls[1], ancillas[0]))]
    for j in range(1, n - 1):
        compute.append(Gate(GateKind.CCX, (ancillas[j - 1], controls[j + 1], ancillas[j])))
    return compute + [Gate(GateKind.CNOT, (ancillas[n - 2], target))] + compute[::-1]


def generalized_cnot_block(n_controls: int) -> Circuit:
    # controls 0..n-1, target n, ancillas n+1..2n-1
    if n_controls < 1:
        raise WalkError(f"n_controls must be at least 1, got {n_controls}")
    controls = list(range(n_controls))
    ancillas = list(range(n_controls + 1, 2 * n_controls))
    gates = generalized_cnot(controls, n_controls, ancillas)
    return Circuit(max(2 * n_controls, 2), tuple(gates))


def increment(layout: WalkLayout, pool: AncillaPool) -> list[Gate]:
    # +1 on the position register, conditioned on coin = |1>
    gates: list[Gate] = []
    for i in reversed(range(len(layout.position))):
        controls = [layout.coin, *layout.position[:i]]
        with pool.borrow(len(controls) - 1) as anc:
            gates += generalized_cnot(controls, layout.position[i], anc)
    return gates


def decrement(layout: WalkLayout, pool: AncillaPool) -> list[Gate]:
    # -1 on the position register, conditioned on coin = |0>
    flips = [Gate(GateKind.X, (q,)) for q in (layout.coin, *layout.position)]
    return flips + increment(layout, pool) + flips


def step_circuit(spec: WalkSpec) -> Circuit:
    layout = walk_layout(spec.n_states)
    pool = AncillaPool(layout.ancillas)

    gates: list[Gate] = [
        Gate(GateKind.X, (layout.position[j],))
        for j in range(spec.position_bits) if spec.initial_position >> j & 1
    ]
    for _ in range(spec.steps):
        gates.append(Gate(GateKind.H, (layout.coin,)))
        gates += increment(layout, pool)
        gates += decrement(layout, pool)

    # the coin is never measured
    gates.append(Gate(GateKind.MEASURE, layout.position))
    circuit = Circuit(layout.n_qubits, tuple(gates))
    logger.debug(
        "Walk N=%d, %d step(s): %d gates on %d qubits",
        spec.n_states, spec.steps, len(circuit), circuit.n_qubits
    )
    return circuit


def ideal_walk_distribution(spec: WalkSpec) -> Distribution:
    arch = walk_architecture(spec)
    model = build_model(zero_noise_calibration(arch), arch, ModelVariant.IDEAL)
    dist = simulate(step_circuit(spec), model)
    assert isinstance(dist, Distribution)
    return dist


def walk_circuit_text(spec: WalkSpec) -> str:
    layout = walk_layout(spec.n_states)
    header = (
        f"quantum walk N={spec.n_states} steps={spec.steps} start={spec.initial_position}",
        f"position (lsb first): {' '.join(map(str, layout.position))}",
        f"ancillas: {' '.join(map(str, layout.ancillas)) or '-'}",
        f"coin: {layout.coin}",
    )
    return emit_circuit(step_circuit(spec), header)
