# -------------------------------------------------------------
# @file          calibration.py
# @author        qnoise contributors
# @created       2026-09-08
# @description   Device calibration tables (per-qubit times and
#                readout/prep rates, per-gate error rates and
#                durations), JSON reader/writer and templates
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import fmean
from typing import Any, Callable, Mapping, Sequence

from qnoise.circuit import Architecture, Gate
from qnoise.errors import CalibrationError
from qnoise.gate_kind import GateKind
from qnoise.noise_utils import (
    CCX_CNOT_FACTOR, DEFAULT_DURATIONS_NS, DEFAULT_TEMPERATURE_K, DEVICE_AVERAGES
)

# H and X are not told apart, a qubit calibrated for one serves the other
_SINGLE_KINDS = (GateKind.H, GateKind.X)


def _number(value: Any, what: str, cast: Callable[[Any], Any] = float) -> Any:
    # JSON true/false would otherwise pass as 1/0
    if isinstance(value, bool):
        raise CalibrationError(f"{what} must be a number, got {value!r}")
    try: return cast(value)
    except (TypeError, ValueError, OverflowError):
        raise CalibrationError(f"{what} must be a number, got {value!r}") from None


def _check_rate(value: float, what: str) -> float:
    value = _number(value, what)
    if not 0.0 <= value <= 1.0:
        raise CalibrationError(f"{what} must be in [0, 1], got {value}")
    return value


def _check_duration(value: float, what: str) -> float:
    value = _number(value, what)
    if not value >= 0.0 or math.isinf(value):
        raise CalibrationError(f"{what} must be a finite non-negative duration, got {value}")
    return value


@dataclass(frozen=True, slots=True)
class QubitCalibration:
    T1: float                  # us
    T2: float                  # us
    freq: float                # Hz
    readout_error: float
    prep_error: float = 0.0

    def validate(self, qubit: int) -> None:
        if not self.T1 > 0 or not self.T2 > 0:
            raise CalibrationError(
                f"T1 and T2 must be positive on qubit {qubit}, got T1={self.T1} us, T2={self.T2} us"
            )
        if self.T2 > 2.0 * self.T1:
            raise CalibrationError(
                f"T2 ({self.T2} us) exceeds 2*T1 ({2.0 * self.T1} us) on qubit {qubit}: "
                "T_2(q) <= 2T_1(q) is required"
            )
        if not self.freq >= 0:
            raise CalibrationError(f"freq_Hz must be non-negative on qubit {qubit}, got {self.freq}")
        _check_rate(self.readout_error, f"readout_error of qubit {qubit}")
        _check_rate(self.prep_error, f"prep_error of qubit {qubit}")


@dataclass(frozen=True, slots=True)
class GateCalibration:
    error_rate: float
    duration: float            # ns


@dataclass(frozen=True)
class CalibrationData:
    qubits: dict[int, QubitCalibration]
    single: dict[tuple[GateKind, int], GateCalibration] = field(default_factory=dict)
    pairs: dict[tuple[int, int], GateCalibration] = field(default_factory=dict)
    coupling: frozenset[tuple[int, int]] = frozenset()
    theta: float = DEFAULT_TEMPERATURE_K

    def __post_init__(self) -> None:
        if not self.theta >= 0:
            raise CalibrationError(f"temperature_K must be non-negative, got {self.theta}")
        for q, qc in self.qubits.items(): qc.validate(q)
        for (kind, q), gc in self.single.items():
            _check_rate(gc.error_rate, f"error_rate of {kind.value} on qubit {q}")
            _check_duration(gc.duration, f"duration_ns of {kind.value} on qubit {q}")
        for (a, b), gc in self.pairs.items():
            _check_rate(gc.error_rate, f"error_rate of CNOT ({a}, {b})")
            _check_duration(gc.duration, f"duration_ns of CNOT ({a}, {b})")

    @property
    def n_qubits(self) -> int:
        return max(self.qubits, default=-1) + 1

    def architecture(self) -> Architecture:
        return Architecture(self.n_qubits, self.coupling or frozenset(self.pairs))

    def qubit(self, q: int) -> QubitCalibration:
        try: return self.qubits[q]
        except KeyError: raise CalibrationError(f"No calibration for qubit {q}") from None

    def single_qubit(self, kind: GateKind, q: int) -> GateCalibration:
        if (gc := self.single.get((kind, q))) is not None: return gc
        if kind is GateKind.I:
            # virtual gate, no error and no time
            return GateCalibration(0.0, DEFAULT_DURATIONS_NS['I'])
        for other in _SINGLE_KINDS:
            if (gc := self.single.get((other, q))) is not None: return gc
        raise CalibrationError(f"No single-qubit gate calibration for qubit {q}")

    def has_single(self, q: int) -> bool:
        return any((k, q) in self.single for k in _SINGLE_KINDS)

    def pair(self, a: int, b: int) -> GateCalibration:
        if (gc := self.pairs.get((a, b))) is not None: return gc
        if (gc := self.pairs.get((b, a))) is not None: return gc
        raise CalibrationError(f"No CNOT calibration for the pair ({a}, {b})")

    def has_pair(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs or (b, a) in self.pairs

    def sq_rate(self, q: int) -> float:
        return self.single_qubit(GateKind.H, q).error_rate

    def duration(self, g: Gate, arch: Architecture | None = None) -> float:
        match g.kind:
            case GateKind.H | GateKind.X | GateKind.I:
                return self.single_qubit(g.kind, g.qubits[0]).duration
            case GateKind.CNOT:
                return self.pair(*g.qubits).duration
            case GateKind.CCX:
                arch = arch or self.architecture()
                pairs = arch.coupled_pairs_among(g.qubits)
                return CCX_CNOT_FACTOR * sum(self.pair(a, b).duration for a, b in pairs)
            case _:
                return DEFAULT_DURATIONS_NS[g.kind.value]

    def overlay(
        self,
        single: Mapping[int, float] | None = None,
        pairs: Mapping[tuple[int, int], float] | None = None,
        readout: Mapping[int, float] | None = None,
        prep: Mapping[int, float] | None = None,
        T1: Mapping[int, float] | None = None,
        T2: Mapping[int, float] | None = None,
    ) -> 'CalibrationData':
        # copy with some rates/times replaced, every field is re-validated
        new_single = dict(self.single)
        for q, rate in (single or {}).items():
            kinds = [k for k in _SINGLE_KINDS if (k, q) in self.single]
            if not kinds:
                raise CalibrationError(f"No single-qubit gate calibration for qubit {q}")
            for k in kinds: new_single[(k, q)] = replace(self.single[(k, q)], error_rate=float(rate))

        new_pairs = dict(self.pairs)
        for (a, b), rate in (pairs or {}).items():
            keys = [key for key in ((a, b), (b, a)) if key in self.pairs]
            if not keys:
                raise CalibrationError(f"No CNOT calibration for the pair ({a}, {b})")
            for key in keys: new_pairs[key] = replace(self.pairs[key], error_rate=float(rate))

        new_qubits = dict(self.qubits)
        for q in set(readout or {}) | set(prep or {}) | set(T1 or {}) | set(T2 or {}):
            qc = self.qubit(q)
            new_qubits[q] = QubitCalibration(
                T1=float((T1 or {}).get(q, qc.T1)),
                T2=float((T2 or {}).get(q, qc.T2)),
                freq=qc.freq,
                readout_error=float((readout or {}).get(q, qc.readout_error)),
                prep_error=float((prep or {}).get(q, qc.prep_error)),
            )
        return replace(self, qubits=new_qubits, single=new_single, pairs=new_pairs)

    def extended_to(self, arch: Architecture) -> 'CalibrationData':
        """
        Copy that covers every coupled pair of `arch`. Pairs the device
        never calibrated get the mean CNOT error rate and duration.
        """
        missing = sorted({(min(a, b), max(a, b)) for a, b in arch.pairs() if not self.has_pair(a, b)})
        if not missing: return replace(self, coupling=arch.coupling)
        if not self.pairs:
            raise CalibrationError("Calibration has no CNOT entries to fill uncalibrated pairs from")

        known = list(self.pairs.values())
        mean = GateCalibration(
            error_rate=fmean(gc.error_rate for gc in known),
            duration=fmean(gc.duration for gc in known),
        )
        logger.info("Filling %d uncalibrated pair(s) with the mean CNOT calibration %s", len(missing), mean)
        return replace(self, pairs={**self.pairs, **{p: mean for p in missing}}, coupling=arch.coupling)


def _require(entry: Mapping[str, Any], key: str, where: str) -> Any:
    if not isinstance(entry, Mapping):
        raise CalibrationError(f"{where} must be a JSON object, got {type(entry).__name__}")
    try: return entry[key]
    except KeyError: raise CalibrationError(f"Missing field '{key}' in {where}") from None


def _require_list(entry: Mapping[str, Any], key: str, where: str) -> Sequence[Any]:
    value = _require(entry, key, where)
    if not isinstance(value, list):
        raise CalibrationError(f"'{key}' in {where} must be a list, got {type(value).__name__}")
    return value


def _qubit_id(value: Any, what: str) -> int:
    q = _number(value, what, int)
    if q != _number(value, what) or q < 0:
        raise CalibrationError(f"{what} must be a non-negative integer, got {value!r}")
    return q


def calibration_from_dict(doc: Mapping[str, Any]) -> CalibrationData:
    if not isinstance(doc, Mapping):
        raise CalibrationError("Calibration document must be a JSON object")

    qubits: dict[int, QubitCalibration] = {}
    for i, entry in enumerate(_require_list(doc, 'qubits', 'calibration')):
        where = f"qubits[{i}]"
        q = _qubit_id(_require(entry, 'id', where), f"id of {where}")
        if q in qubits: raise CalibrationError(f"Qubit {q} calibrated twice")
        qubits[q] = QubitCalibration(
            T1=_number(_require(entry, 'T1_us', where), f"T1_us of qubit {q}"),
            T2=_number(_require(entry, 'T2_us', where), f"T2_us of qubit {q}"),
            freq=_number(_require(entry, 'freq_Hz', where), f"freq_Hz of qubit {q}"),
            readout_error=_check_rate(_require(entry, 'readout_error', where), f"readout_error of qubit {q}"),
            prep_error=_check_rate(entry.get('prep_error', 0.0), f"prep_error of qubit {q}"),
        )
    if not qubits:
        raise CalibrationError("Calibration lists no qubits")
    if sorted(qubits) != list(range(len(qubits))):
        raise CalibrationError(f"Qubit ids must be 0..{len(qubits) - 1}, got {sorted(qubits)}")

    single: dict[tuple[GateKind, int], GateCalibration] = {}
    pairs: dict[tuple[int, int], GateCalibration] = {}
    for i, entry in enumerate(_require_list(doc, 'gates', 'calibration')):
        where = f"gates[{i}]"
        try: kind = GateKind.from_token(str(_require(entry, 'kind', where)))
        except ValueError as exc: raise CalibrationError(f"{where}: {exc}") from exc
        operands = tuple(_qubit_id(q, f"qubits of {where}") for q in _require_list(entry, 'qubits', where))
        gc = GateCalibration(
            error_rate=_check_rate(_require(entry, 'error_rate', where), f"error_rate in {where}"),
            duration=_check_duration(_require(entry, 'duration_ns', where), f"duration_ns in {where}"),
        )
        if any(q not in qubits for q in operands):
            raise CalibrationError(f"{where} references an uncalibrated qubit: {operands}")
        match kind:
            case GateKind.H | GateKind.X | GateKind.I if len(operands) == 1:
                single[(kind, operands[0])] = gc
            case GateKind.CNOT if len(operands) == 2:
                pairs[operands] = gc
            case _:
                raise CalibrationError(
                    f"{where}: unsupported gate entry {kind.value} on {len(operands)} qubit(s)"
                )

    if doc.get('coupling') is not None:
        coupling: set[tuple[int, int]] = set()
        for i, pair in enumerate(_require_list(doc, 'coupling', 'calibration')):
            if not isinstance(pair, list) or len(pair) != 2:
                raise CalibrationError(f"coupling[{i}] must be a pair of qubit ids, got {pair!r}")
            coupling.add((_qubit_id(pair[0], f"coupling[{i}]"), _qubit_id(pair[1], f"coupling[{i}]")))
    else:
        coupling = set(pairs)

    return CalibrationData(
        qubits=qubits,
        single=single,
        pairs=pairs,
        coupling=frozenset(coupling),
        theta=_number(doc.get('temperature_K', DEFAULT_TEMPERATURE_K), "temperature_K"),
    )


def load_calibration(source: str | Path | Mapping[str, Any]) -> CalibrationData:
    # accepts a path, raw JSON text or an already-decoded document
    if isinstance(source, Mapping): return calibration_from_dict(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith('{')):
        text = Path(source).read_text(encoding='utf-8')
    else:
        text = source
    cal = calibration_from_dict(json.loads(text))
    logger.info(
        "Loaded calibration: %d qubits, %d single-qubit and %d CNOT entries",
        len(cal.qubits), len(cal.single), len(cal.pairs)
    )
    return cal


def calibration_to_dict(cal: CalibrationData) -> dict[str, Any]:
    return {
        'temperature_K': cal.theta,
        'qubits': [
            {
                'id': q,
                'T1_us': qc.T1,
                'T2_us': qc.T2,
                'freq_Hz': qc.freq,
                'readout_error': qc.readout_error,
                'prep_error': qc.prep_error,
            }
            for q, qc in sorted(cal.qubits.items())
        ],
        'gates': [
            {'kind': kind.value, 'qubits': [q], 'error_rate': gc.error_rate, 'duration_ns': gc.duration}
            for (kind, q), gc in sorted(cal.single.items(), key=lambda kv: (kv[0][1], kv[0][0].value))
        ] + [
            {'kind': 'CNOT', 'qubits': list(pair), 'error_rate': gc.error_rate, 'duration_ns': gc.duration}
            for pair, gc in sorted(cal.pairs.items())
        ],
        'coupling': [list(pair) for pair in sorted(cal.coupling)],
    }


def dump_calibration(cal: CalibrationData, path: str | Path | None = None) -> str:
    text = json.dumps(calibration_to_dict(cal), indent=2, sort_keys=True) + '\n'
    if path is not None: Path(path).write_text(text, encoding='utf-8')
    return text


def template_calibration(
    arch: Architecture,
    *,
    single_qubit_error: float = DEVICE_AVERAGES['single_qubit_error'],
    cnot_error: float = DEVICE_AVERAGES['cnot_error'],
    readout_error: float = DEVICE_AVERAGES['readout_error'],
    prep_error: float = 0.0,
    T1_us: float = DEVICE_AVERAGES['T1_us'],
    T2_us: float = DEVICE_AVERAGES['T2_us'],
    freq_Hz: float = DEVICE_AVERAGES['freq_Hz'],
    theta: float = DEFAULT_TEMPERATURE_K,
) -> CalibrationData:
    # uniform device, defaults are the published averages of the walk experiments
    qc = QubitCalibration(T1_us, T2_us, freq_Hz, readout_error, prep_error)
    single_h = GateCalibration(single_qubit_error, DEFAULT_DURATIONS_NS['H'])
    single_x = GateCalibration(single_qubit_error, DEFAULT_DURATIONS_NS['X'])
    cnot = GateCalibration(cnot_error, DEFAULT_DURATIONS_NS['CNOT'])

    single: dict[tuple[GateKind, int], GateCalibration] = {}
    for q in range(arch.n_qubits):
        single[(GateKind.H, q)] = single_h
        single[(GateKind.X, q)] = single_x
    return CalibrationData(
        qubits={q: qc for q in range(arch.n_qubits)},
        single=single,
        pairs={pair: cnot for pair in arch.coupling},
        coupling=arch.coupling,
        theta=theta,
    )


def zero_noise_calibration(arch: Architecture) -> CalibrationData:
    return template_calibration(
        arch, single_qubit_error=0.0, cnot_error=0.0, readout_error=0.0,
        T1_us=math.inf, T2_us=math.inf,
    )
