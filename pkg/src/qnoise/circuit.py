# -------------------------------------------------------------
# @file          circuit.py
# @author        qnoise contributors
# @created       2026-09-05
# @description   Circuit IR over an architecture graph, with per
#                gate durations and an ASAP execution schedule
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

from dataclasses import dataclass, replace
from itertools import combinations
from typing import Callable, Iterable, Sequence

from qnoise.errors import CircuitError
from qnoise.gate_kind import GateKind


@dataclass(frozen=True, slots=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    duration: float | None = None     # ns, None -> taken from calibration

    def __post_init__(self) -> None:
        if not self.qubits:
            raise CircuitError(f"Gate {self.kind.value} has no operands")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"Gate {self.kind.value} has repeated operands {self.qubits}")
        if (arity := self.kind.arity) is not None and arity != len(self.qubits):
            raise CircuitError(
                f"Gate {self.kind.value} takes {arity} operand(s), got {len(self.qubits)}"
            )
        if self.duration is not None and self.duration < 0:
            raise CircuitError(f"Gate {self.kind.value} has negative duration {self.duration}")

    @property
    def control(self) -> tuple[int, ...]:
        return self.qubits[:-1] if self.kind.is_entangling else ()

    @property
    def target(self) -> int:
        return self.qubits[-1]

    def __str__(self) -> str:
        return f"{self.kind.value} {' '.join(map(str, self.qubits))}"


def gate(kind: GateKind | str, *qubits: int, duration: float | None = None) -> Gate:
    if isinstance(kind, str): kind = GateKind.from_token(kind)
    return Gate(kind, tuple(int(q) for q in qubits), duration)


@dataclass(frozen=True, slots=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    measured: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise CircuitError(f"A circuit needs at least one qubit, got {self.n_qubits}")
        for g in self.gates:
            if any(not 0 <= q < self.n_qubits for q in g.qubits):
                raise CircuitError(f"Gate '{g}' references a qubit outside [0, {self.n_qubits})")

        # PREPARE only at the start, MEASURE only at the end
        kinds = [g.kind for g in self.gates]
        prep_done = meas_seen = False
        for kind in kinds:
            match kind:
                case GateKind.PREPARE:
                    if prep_done: raise CircuitError("PREPARE gates must appear at the start of the circuit")
                case GateKind.MEASURE:
                    meas_seen = prep_done = True
                case _:
                    if meas_seen: raise CircuitError("MEASURE gates must appear at the end of the circuit")
                    prep_done = True

        measured = tuple(q for g in self.gates if g.kind is GateKind.MEASURE for q in g.qubits)
        if len(set(measured)) != len(measured):
            raise CircuitError(f"Qubit measured twice: {measured}")
        if not self.measured:
            object.__setattr__(self, 'measured', measured or tuple(range(self.n_qubits)))
        elif measured and tuple(self.measured) != measured:
            raise CircuitError(
                f"Measured set {self.measured} disagrees with MEASURE gates {measured}"
            )
        if any(not 0 <= q < self.n_qubits for q in self.measured):
            raise CircuitError(f"Measured qubit out of range in {self.measured}")

    @property
    def has_measure_gate(self) -> bool:
        return any(g.kind is GateKind.MEASURE for g in self.gates)

    @property
    def prepared(self) -> tuple[int, ...]:
        return tuple(q for g in self.gates if g.kind is GateKind.PREPARE for q in g.qubits)

    def resolved(self, durations: Callable[[Gate], float]) -> 'Circuit':
        gates = tuple(
            g if g.duration is not None else replace(g, duration=float(durations(g)))
            for g in self.gates
        )
        return replace(self, gates=gates)

    def append(self, *gates: Gate) -> 'Circuit':
        return replace(self, gates=self.gates + gates, measured=())

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True, slots=True)
class Architecture:
    n_qubits: int
    coupling: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        for a, b in self.coupling:
            if a == b: raise CircuitError(f"Coupling self-loop on qubit {a}")
            if not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits):
                raise CircuitError(f"Coupling ({a}, {b}) references a qubit outside [0, {self.n_qubits})")

    @classmethod
    def from_coupling(cls, n_qubits: int, pairs: Iterable[Sequence[int]], symmetric: bool = False) -> 'Architecture':
        coupling = {(int(a), int(b)) for a, b in pairs}
        if symmetric: coupling |= {(b, a) for a, b in coupling}
        return cls(n_qubits, frozenset(coupling))

    @classmethod
    def linear(cls, n_qubits: int) -> 'Architecture':
        return cls.from_coupling(n_qubits, ((q, q + 1) for q in range(n_qubits - 1)), symmetric=True)

    @classmethod
    def full(cls, n_qubits: int) -> 'Architecture':
        return cls.from_coupling(n_qubits, combinations(range(n_qubits), 2), symmetric=True)

    def coupled(self, a: int, b: int) -> bool:
        return (a, b) in self.coupling or (b, a) in self.coupling

    def pairs(self) -> list[tuple[int, int]]:
        return sorted({(min(a, b), max(a, b)) for a, b in self.coupling})

    def coupled_pairs_among(self, qubits: Sequence[int]) -> list[tuple[int, int]]:
        # ordered by operand position, (earlier, later)
        return [(a, b) for a, b in combinations(qubits, 2) if self.coupled(a, b)]

    def is_connected(self, qubits: Sequence[int]) -> bool:
        qs = set(qubits)
        seen, stack = {qubits[0]}, [qubits[0]]
        while stack:
            q = stack.pop()
            for p in qs - seen:
                if self.coupled(q, p):
                    seen.add(p)
                    stack.append(p)
        return seen == qs


def validate(circuit: Circuit, arch: Architecture) -> list[str]:
    violations: list[str] = []
    if circuit.n_qubits != arch.n_qubits:
        violations.append(
            f"circuit uses {circuit.n_qubits} qubits but the architecture has {arch.n_qubits}"
        )
    for index, g in enumerate(circuit.gates):
        if any(q >= arch.n_qubits for q in g.qubits):
            violations.append(f"gate {index} '{g}': qubit outside the architecture")
            continue
        match g.kind:
            case GateKind.CNOT:
                if g.qubits not in arch.coupling:
                    violations.append(f"gate {index} '{g}': ({g.qubits[0]}, {g.qubits[1]}) is not a coupled pair")
            case GateKind.CCX:
                if not arch.is_connected(g.qubits):
                    violations.append(f"gate {index} '{g}': operands are not connected in the coupling graph")
            case _:
                continue
    return violations


@dataclass(frozen=True, slots=True)
class Schedule:
    starts: tuple[float, ...]
    gaps: tuple[dict[int, float], ...]    # per gate: idle time of each operand before it starts
    clocks: dict[int, float]              # per qubit: time its last gate finished
    durations: tuple[float, ...]
    operands: tuple[tuple[int, ...], ...]

    @property
    def makespan(self) -> float:
        return max(self.clocks.values(), default=0.0)


def schedule(circuit: Circuit) -> Schedule:
    # ASAP, every gate starts as soon as all of its operands are free
    ready = {q: 0.0 for q in range(circuit.n_qubits)}
    starts: list[float] = []
    gaps: list[dict[int, float]] = []
    durations: list[float] = []
    for g in circuit.gates:
        if g.duration is None:
            raise CircuitError(f"Gate '{g}' has no duration, resolve durations before scheduling")
        start = max(ready[q] for q in g.qubits)
        starts.append(start)
        gaps.append({q: start - ready[q] for q in g.qubits})
        durations.append(g.duration)
        for q in g.qubits: ready[q] = start + g.duration
    return Schedule(
        tuple(starts), tuple(gaps), ready, tuple(durations), tuple(g.qubits for g in circuit.gates)
    )

