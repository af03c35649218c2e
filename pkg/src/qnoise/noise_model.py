# -------------------------------------------------------------
# @file          noise_model.py
# @author        qnoise contributors
# @created       2026-09-10
# @description   Unified noise model and its reduced variants,
#                noisy density-matrix evolution of a circuit
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

import time
from dataclasses import dataclass, field
from enum import Enum
from statistics import fmean

from qnoise.calibration import CalibrationData
from qnoise.channels import (
    KrausChannel, ThermalParams, depolarizing_channel, spam_channel, thermal_channel
)
from qnoise.circuit import Architecture, Circuit, Gate, Schedule, schedule, validate
from qnoise.errors import CalibrationError, SimulationError
from qnoise.gate_kind import GateKind
from qnoise.noise_utils import MODEL_ALIASES
from qnoise.qstate import (
    DensityMatrix, Distribution, ShotCounts, apply_kraus, apply_unitary,
    measure_distribution, pure_state, sample_shots
)


class ModelVariant(str, Enum):
    UNM = 'UNM'
    DSPAM = 'DSPAM'
    TRM = 'TRM'
    SDM = 'SDM'
    IDEAL = 'IDEAL'

    @classmethod
    def from_token(cls, token: str) -> 'ModelVariant':
        try: return cls(MODEL_ALIASES.get(token.lower(), token.upper()))
        except ValueError as exc:
            valid = ", ".join(k.value.lower() for k in cls)
            raise ValueError(f"Unknown noise model '{token}'. Expected one of: {valid}") from exc

    @property
    def depolarizing(self) -> bool:
        return self in (ModelVariant.UNM, ModelVariant.DSPAM)

    @property
    def spam(self) -> bool:
        return self in (ModelVariant.UNM, ModelVariant.DSPAM)

    @property
    def thermal(self) -> bool:
        return self in (ModelVariant.UNM, ModelVariant.TRM)


class ControlThermal(str, Enum):
    DURATION = 'duration'      # controls decay for idle gap + gate duration
    ZERO = 'zero'              # controls decay for their idle gap only


@dataclass(frozen=True, slots=True)
class Shots:
    count: int
    seed: int | None = None


@dataclass(frozen=True, slots=True)
class ThermalStep:
    gate_index: int
    qubit: int
    duration: float            # ns


@dataclass(frozen=True)
class NoiseModel:
    variant: ModelVariant
    calibration: CalibrationData = field(repr=False)
    architecture: Architecture = field(repr=False)
    control_trc: ControlThermal = ControlThermal.DURATION
    sdm_rate: float = 0.0

    def resolve(self, circuit: Circuit) -> Circuit:
        # implicit measurement is an explicit MEASURE at the end, so every
        # measured qubit sees its final idle gap
        if not circuit.has_measure_gate:
            circuit = circuit.append(Gate(GateKind.MEASURE, tuple(circuit.measured), 0.0))
        return circuit.resolved(lambda g: self.calibration.duration(g, self.architecture))

    def thermal_steps(self, circuit: Circuit) -> list[ThermalStep]:
        resolved = self.resolve(circuit)
        return _thermal_steps(resolved, schedule(resolved), self.control_trc)

    def thermal(self, q: int, duration: float) -> KrausChannel:
        qc = self.calibration.qubit(q)
        return thermal_channel(ThermalParams(qc.T1, qc.T2, duration, self.calibration.theta, qc.freq))


def _thermal_steps(circuit: Circuit, sched: Schedule, control_trc: ControlThermal) -> list[ThermalStep]:
    steps: list[ThermalStep] = []
    for i, g in enumerate(circuit.gates):
        controls = set(g.control) if control_trc is ControlThermal.ZERO else set()
        for q in g.qubits:
            t = sched.gaps[i][q] + (0.0 if q in controls else sched.durations[i])
            steps.append(ThermalStep(i, q, t))
    return steps


def idle_decay_accounting(sched: Schedule, qubit: int) -> list[float]:
    return [
        sched.gaps[i][qubit] + sched.durations[i]
        for i, operands in enumerate(sched.operands) if qubit in operands
    ]


def build_model(
    cal: CalibrationData,
    arch: Architecture,
    variant: ModelVariant | str = ModelVariant.UNM,
    control_trc: ControlThermal | str = ControlThermal.DURATION,
) -> NoiseModel:
    if isinstance(variant, str): variant = ModelVariant.from_token(variant)
    control_trc = ControlThermal(control_trc)

    # coverage: every qubit and every coupled pair of the device
    missing = [q for q in range(arch.n_qubits) if q not in cal.qubits or not cal.has_single(q)]
    if missing:
        raise CalibrationError(f"Calibration does not cover qubit(s) {missing}")
    if gaps := [p for p in arch.pairs() if not cal.has_pair(*p)]:
        raise CalibrationError(f"Calibration does not cover coupled pair(s) {gaps}")

    # the single-rate model averages the per-qubit 1q rates
    sdm_rate = fmean(cal.sq_rate(q) for q in range(arch.n_qubits))
    logger.debug("Built %s model over %d qubits (sdm rate %.4e)", variant.value, arch.n_qubits, sdm_rate)
    return NoiseModel(variant, cal, arch, control_trc, sdm_rate)


def _depolarize(model: NoiseModel, rho: DensityMatrix, g: Gate) -> DensityMatrix:
    cal = model.calibration
    if model.variant is ModelVariant.SDM:
        if g.kind is GateKind.I: return rho
        ch = depolarizing_channel(model.sdm_rate)
        for q in g.qubits: rho = apply_kraus(rho, ch, [q])
        return rho

    match g.kind:
        case GateKind.H | GateKind.X:
            q = g.qubits[0]
            rho = apply_kraus(rho, depolarizing_channel(cal.single_qubit(g.kind, q).error_rate), [q])
        case GateKind.CNOT:
            # only the target is depolarized
            rho = apply_kraus(rho, depolarizing_channel(cal.pair(*g.qubits).error_rate), [g.target])
        case GateKind.CCX:
            for q in g.qubits:
                rho = apply_kraus(rho, depolarizing_channel(cal.sq_rate(q)), [q])
            for a, b in model.architecture.coupled_pairs_among(g.qubits):
                rho = apply_kraus(rho, depolarizing_channel(cal.pair(a, b).error_rate), [b])
    return rho


def evolve(circuit: Circuit, model: NoiseModel) -> DensityMatrix:
    if violations := validate(circuit, model.architecture):
        raise SimulationError("Circuit does not fit the architecture: " + "; ".join(violations))

    resolved = model.resolve(circuit)
    sched = schedule(resolved)
    steps = _thermal_steps(resolved, sched, model.control_trc)
    by_gate: dict[int, list[ThermalStep]] = {}
    for step in steps: by_gate.setdefault(step.gate_index, []).append(step)

    variant, cal = model.variant, model.calibration
    rho = pure_state(resolved.n_qubits, 0)
    for i, g in enumerate(resolved.gates):
        match g.kind:
            case GateKind.PREPARE:
                # prepared qubits start in |0>, only the prep flip can act
                if variant.spam:
                    for q in g.qubits:
                        rho = apply_kraus(rho, spam_channel(cal.qubit(q).prep_error), [q])
            case GateKind.MEASURE:
                pass
            case _:
                rho = apply_unitary(rho, g.kind.matrix(), g.qubits)
                if variant.depolarizing or variant is ModelVariant.SDM:
                    rho = _depolarize(model, rho, g)

        if variant.thermal:
            for step in by_gate.get(i, ()):
                if step.duration > 0.0:
                    rho = apply_kraus(rho, model.thermal(step.qubit, step.duration), [step.qubit])

    if variant.spam:
        for q in resolved.measured:
            rho = apply_kraus(rho, spam_channel(cal.qubit(q).readout_error), [q])
    return rho


def simulate(
    circuit: Circuit, model: NoiseModel, mode: str | Shots = 'exact'
) -> Distribution | ShotCounts:
    t0 = time.perf_counter()
    rho = evolve(circuit, model)
    dist = measure_distribution(rho, circuit.measured)
    t1 = time.perf_counter()
    logger.info(
        "Simulated %d gates on %d qubits under %s in %.3f seconds",
        len(circuit), circuit.n_qubits, model.variant.value, t1 - t0
    )

    match mode:
        case 'exact':
            return dist
        case Shots(count=count, seed=seed):
            return sample_shots(dist, count, seed)
        case _:
            raise SimulationError(f"Unknown simulation mode {mode!r}, expected 'exact' or Shots(count, seed)")
