# -------------------------------------------------------------
# @file          __init__.py
# @author        qnoise contributors
# @created       2026-09-02
# @description   Initializes the qnoise package
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

__version__ = '0.1.0'

from .calibration import CalibrationData, load_calibration, template_calibration
from .channels import (
    KrausChannel, ThermalParams, apply_choi, build_choi, choi_to_kraus,
    depolarizing_channel, excitation_weight, spam_channel, thermal_channel,
    thermal_probabilities
)
from .circuit import Architecture, Circuit, Gate, schedule, validate
from .circuit_parser import emit_circuit, parse_circuit
from .errors import QNoiseError
from .gate_kind import GateKind
from .metrics import confidence_intervals, counts_to_distribution, hellinger, uniform_distribution
from .noise_model import ModelVariant, NoiseModel, Shots, build_model, idle_decay_accounting, simulate
from .optimizer import GAConfig, OptimizationResult, RoutineSummary, census, fitness, optimize, optimize_routines
from .qstate import (
    DensityMatrix, Distribution, ShotCounts, apply_kraus, apply_unitary,
    measure_distribution, pure_state, sample_shots
)
from .walks import WalkSpec, generalized_cnot, ideal_walk_distribution, step_circuit

__all__ = [
    "Architecture",
    "CalibrationData",
    "Circuit",
    "DensityMatrix",
    "Distribution",
    "GAConfig",
    "Gate",
    "GateKind",
    "KrausChannel",
    "ModelVariant",
    "NoiseModel",
    "OptimizationResult",
    "QNoiseError",
    "RoutineSummary",
    "ShotCounts",
    "Shots",
    "ThermalParams",
    "WalkSpec",
    "apply_choi",
    "apply_kraus",
    "apply_unitary",
    "build_choi",
    "build_model",
    "census",
    "choi_to_kraus",
    "confidence_intervals",
    "counts_to_distribution",
    "depolarizing_channel",
    "emit_circuit",
    "excitation_weight",
    "fitness",
    "generalized_cnot",
    "hellinger",
    "ideal_walk_distribution",
    "idle_decay_accounting",
    "load_calibration",
    "measure_distribution",
    "optimize",
    "optimize_routines",
    "parse_circuit",
    "pure_state",
    "sample_shots",
    "schedule",
    "simulate",
    "spam_channel",
    "step_circuit",
    "template_calibration",
    "thermal_channel",
    "thermal_probabilities",
    "uniform_distribution",
    "validate",
]
