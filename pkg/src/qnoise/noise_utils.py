# -------------------------------------------------------------
# @file          noise_utils.py
# @author        qnoise contributors
# @created       2026-09-02
# @description   Basically just a bunch of constants, tolerances
#                and lookup tables shared by the simulator
# @license       MIT
# -------------------------------------------------------------

from typing import Any

from scipy import constants as _sc


# CODATA 2018 exact values
PLANCK: float = _sc.h          # J*s
BOLTZMANN: float = _sc.k       # J/K

DEFAULT_TEMPERATURE_K: float = 0.015

# numerical tolerances
CPTP_TOL: float = 1e-10
HERMITIAN_TOL: float = 1e-10
TRACE_TOL: float = 1e-10
PSD_TOL: float = 1e-9
DIST_TOL: float = 1e-9
KRAUS_CUTOFF: float = 1e-12
CHOI_EIG_TOL: float = 1e-10
PROB_FLOOR: float = 1e-15

# dense ceiling, 2^14 x 2^14 complex128 is already 4 GiB
MAX_QUBITS: int = 14

# average calibration of the 15-qubit device the walks were run on
DEVICE_AVERAGES: dict[str, float] = {
    'single_qubit_error': 11.68e-4,
    'cnot_error': 3.17e-2,
    'readout_error': 7.61e-2,
    'T1_us': 56.15,
    'T2_us': 56.01,
    'freq_Hz': 4.9801e9,
}

DEFAULT_DURATIONS_NS: dict[str, float] = {
    'H': 100.0,
    'X': 100.0,
    'I': 0.0,
    'CNOT': 600.0,
    'PREPARE': 0.0,
    'MEASURE': 0.0,
}

# a toffoli takes three cnots per coupled operand pair in its native form
CCX_CNOT_FACTOR: int = 3

GATE_ALIASES: dict[str, str] = {
    'h': 'H',
    'hadamard': 'H',
    'x': 'X',
    'not': 'X',
    'i': 'I',
    'id': 'I',
    'cx': 'CNOT',
    'cnot': 'CNOT',
    'ccx': 'CCX',
    'toffoli': 'CCX',
    'measure': 'MEASURE',
    'meas': 'MEASURE',
    'prepare': 'PREPARE',
    'prep': 'PREPARE',
    'reset': 'PREPARE',
}

MODEL_ALIASES: dict[str, str] = {
    'unm': 'UNM',
    'unified': 'UNM',
    'dspam': 'DSPAM',
    'trm': 'TRM',
    'thermal': 'TRM',
    'sdm': 'SDM',
    'ideal': 'IDEAL',
    'none': 'IDEAL',
}

GA_DEFAULTS: dict[str, Any] = {
    'population_size': 30,
    'generations': 50,
    'elite_count': 2,
    'tournament_size': 3,
    'mutation_rate': 0.15,
    'mutation_scale': 0.2,
    'mutation_floor': 1e-4,
    'crossover_rate': 0.9,
    'init_scale': 0.3,
    'seed': 0,
    'workers': 1,
}

# decoherence-mode search box, microseconds
DECOHERENCE_BOUNDS_US: tuple[float, float] = (1.0, 1000.0)

# shot-count error bars
CONFIDENCE_LEVEL: float = 0.95

# synthetic targets multiply every rate by a factor drawn from this range
PERTURB_RANGE: tuple[float, float] = (0.5, 2.0)
