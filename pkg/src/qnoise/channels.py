# -------------------------------------------------------------
# @file          channels.py
# @author        qnoise contributors
# @created       2026-09-04
# @description   The three error-group channels (depolarizing,
#                SPAM, thermal relaxation/dephasing) as CPTP
#                Kraus sets, plus the Choi-matrix branch
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh, svd
from scipy.special import expit

from qnoise.errors import ChannelError
from qnoise.gate_kind import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z
from qnoise.noise_utils import (
    BOLTZMANN, CHOI_EIG_TOL, CPTP_TOL, DEFAULT_TEMPERATURE_K, KRAUS_CUTOFF, PLANCK
)
from qnoise.qstate import DensityMatrix

KET0_BRA0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET0_BRA1 = np.array([[0, 1], [0, 0]], dtype=complex)
KET1_BRA0 = np.array([[0, 0], [1, 0]], dtype=complex)
KET1_BRA1 = np.array([[0, 0], [0, 1]], dtype=complex)


@dataclass(frozen=True, slots=True, eq=False)
class KrausChannel:
    arity: int
    operators: tuple[np.ndarray, ...] = field(repr=False)
    name: str = 'kraus'

    def __post_init__(self) -> None:
        dim = 1 << self.arity
        if not self.operators:
            raise ChannelError(f"Channel '{self.name}' has no Kraus operators")
        for op in self.operators:
            if op.shape != (dim, dim):
                raise ChannelError(
                    f"Kraus operator of shape {op.shape} in '{self.name}', expected {dim}x{dim}"
                )
            op.setflags(write=False)
        if (dev := self.completeness_error()) > CPTP_TOL:
            raise ChannelError(
                f"Channel '{self.name}' is not CPTP: max|sum K^dag K - I| = {dev:.3e}"
            )

    def completeness_error(self) -> float:
        acc = sum(op.conj().T @ op for op in self.operators)
        return float(np.max(np.abs(acc - np.eye(1 << self.arity))))

    def superoperator(self) -> np.ndarray:
        # row-major vec: vec(K rho K^dag) = (K kron conj(K)) vec(rho)
        return sum(np.kron(op, op.conj()) for op in self.operators)

    def compose(self, other: 'KrausChannel') -> 'KrausChannel':
        # other after self
        if other.arity != self.arity:
            raise ChannelError("Cannot compose channels of different arity")
        ops = tuple(b @ a for b in other.operators for a in self.operators)
        return KrausChannel(self.arity, _prune(ops), f'{other.name}*{self.name}')

    def apply_matrix(self, rho: np.ndarray) -> np.ndarray:
        return sum(op @ rho @ op.conj().T for op in self.operators)


def _prune(ops: tuple[np.ndarray, ...] | list[np.ndarray]) -> tuple[np.ndarray, ...]:
    kept = tuple(op for op in ops if np.max(np.abs(op)) > 0.0)
    return kept or (ops[0],)


def _check_probability(p: float, name: str) -> None:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ChannelError(f"{name} must be a probability in [0, 1], got {p}")


def identity_channel(arity: int = 1) -> KrausChannel:
    return KrausChannel(arity, (np.eye(1 << arity, dtype=complex),), 'identity')


def depolarizing_channel(p1: float) -> KrausChannel:
    _check_probability(p1, 'p1')
    a = math.sqrt(p1 / 3.0)
    ops = (math.sqrt(1.0 - p1) * PAULI_I, a * PAULI_X, a * PAULI_Z, a * PAULI_Y)
    return KrausChannel(1, _prune(ops), 'depolarizing')


def spam_channel(p2: float) -> KrausChannel:
    # the same bit-flip serves measurement (p2) and preparation (p2') errors
    _check_probability(p2, 'p2')
    ops = (math.sqrt(1.0 - p2) * PAULI_I, math.sqrt(p2) * PAULI_X)
    return KrausChannel(1, _prune(ops), 'spam')


# ------------------------------------------------------------------
# thermal relaxation and dephasing
# ------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ThermalParams:
    T1: float                  # us
    T2: float                  # us
    Tg: float                  # ns
    theta: float = DEFAULT_TEMPERATURE_K
    freq: float = 0.0          # Hz

    def __post_init__(self) -> None:
        if not self.T1 > 0 or not self.T2 > 0:
            raise ChannelError(f"T1 and T2 must be positive, got T1={self.T1} us, T2={self.T2} us")
        if self.T2 > 2.0 * self.T1:
            raise ChannelError(
                f"T2 ({self.T2} us) exceeds 2*T1 ({2.0 * self.T1} us): T_2(q) <= 2T_1(q) is required"
            )
        if self.Tg < 0 or self.theta < 0 or self.freq < 0:
            raise ChannelError(
                f"Tg, theta and freq must be non-negative, got Tg={self.Tg}, theta={self.theta}, freq={self.freq}"
            )


@dataclass(frozen=True, slots=True)
class ThermalProbabilities:
    p_I: float
    p_Z: float
    p_reset0: float
    p_reset1: float
    p_T1: float
    p_T2: float
    w_e: float

    @property
    def p_reset(self) -> float:
        return self.p_reset0 + self.p_reset1


def excitation_weight(freq: float, theta: float) -> float:
    if freq < 0 or theta < 0:
        raise ChannelError(f"freq and theta must be non-negative, got freq={freq}, theta={theta}")
    # zero temperature is the limit of the logistic, nothing is excited
    if theta == 0.0: return 0.0
    return float(expit(-2.0 * PLANCK * freq / (BOLTZMANN * theta)))


def thermal_probabilities(tp: ThermalParams) -> ThermalProbabilities:
    # Tg is in ns while T1/T2 are in us
    p_T1 = math.exp(-tp.Tg / (1e3 * tp.T1))
    p_T2 = math.exp(-tp.Tg / (1e3 * tp.T2))
    p_reset = 1.0 - p_T1
    w_e = excitation_weight(tp.freq, tp.theta)

    p_reset1 = w_e * p_reset
    p_reset0 = (1.0 - w_e) * p_reset
    p_Z = max((1.0 - p_reset) * (1.0 - p_T2 / p_T1) / 2.0, 0.0) if p_T1 > 0 else 0.0
    p_I = 1.0 - p_Z - p_reset0 - p_reset1
    return ThermalProbabilities(p_I, p_Z, p_reset0, p_reset1, p_T1, p_T2, w_e)


def build_choi(probs: ThermalProbabilities) -> np.ndarray:
    # input-major ordering, C[2*i + o, 2*j + o'] = <o| N(|i><j|) |o'>
    # -> at theta = 0 this is exactly the 4x4 matrix with entries 1, p_T2, p_reset, 1 - p_reset
    c = np.zeros((4, 4), dtype=complex)
    c[0, 0] = 1.0 - probs.p_reset1
    c[1, 1] = probs.p_reset1
    c[2, 2] = probs.p_reset0
    c[3, 3] = 1.0 - probs.p_reset0
    c[0, 3] = c[3, 0] = probs.p_T2
    return c


def apply_choi(rho: DensityMatrix | np.ndarray, choi: np.ndarray) -> DensityMatrix:
    # rho -> tr_1[ C (rho^T kron I) ], subsystem 1 being the input
    mat = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (2, 2) or np.shape(choi) != (4, 4):
        raise ChannelError("apply_choi handles single-qubit states and 4x4 Choi matrices only")
    prod = (np.asarray(choi) @ np.kron(mat.T, np.eye(2))).reshape(2, 2, 2, 2)
    return DensityMatrix(1, np.einsum('iaib->ab', prod))


def _unvec(v: np.ndarray) -> np.ndarray:
    # column-stacking isomorphism, K[o, i] = v[2*i + o]
    return v.reshape(2, 2, order='F')


def choi_to_kraus(choi: np.ndarray) -> KrausChannel:
    choi = np.asarray(choi, dtype=complex)
    if choi.shape != (4, 4):
        raise ChannelError(f"Expected a 4x4 Choi matrix, got shape {choi.shape}")

    hermitian = np.max(np.abs(choi - choi.conj().T)) <= CHOI_EIG_TOL
    if hermitian:
        evals, evecs = eigh((choi + choi.conj().T) / 2)
        if evals.min() >= -CHOI_EIG_TOL:
            ops = [
                math.sqrt(lam) * _unvec(evecs[:, k])
                for k, lam in enumerate(evals) if lam > KRAUS_CUTOFF
            ]
            logger.debug("Choi spectral path kept %d Kraus operators", len(ops))
            return KrausChannel(1, tuple(ops), 'choi')

    # fall back to the singular value decomposition, left and right
    # operators must coincide for the map to be completely positive
    u, s, vh = svd(choi)
    left = []
    for k, sigma in enumerate(s):
        if sigma <= KRAUS_CUTOFF: continue
        uk, vk = u[:, k], vh[k, :].conj()
        if not np.allclose(uk, vk, atol=1e-8):
            raise ChannelError(
                "Choi matrix does not represent a completely positive trace preserving map "
                f"(left and right singular vectors differ for sigma={sigma:.3e}): not CPTP"
            )
        left.append(math.sqrt(sigma) * _unvec(uk))
    logger.debug("Choi SVD path kept %d Kraus operators", len(left))
    return KrausChannel(1, tuple(left), 'choi')


@lru_cache(maxsize=4096)
def thermal_channel(tp: ThermalParams) -> KrausChannel:
    probs = thermal_probabilities(tp)
    if tp.Tg == 0.0: return identity_channel(1)

    if tp.T2 <= tp.T1:
        # mixed reset + unital channel; each reset is a two-operator pair
        # so that sum K^dag K = I holds exactly
        r0, r1 = math.sqrt(probs.p_reset0), math.sqrt(probs.p_reset1)
        ops = (
            math.sqrt(probs.p_I) * PAULI_I,
            math.sqrt(probs.p_Z) * PAULI_Z,
            r0 * KET0_BRA0,
            r0 * KET0_BRA1,
            r1 * KET1_BRA0,
            r1 * KET1_BRA1,
        )
        return KrausChannel(1, _prune(ops), 'thermal')

    return choi_to_kraus(build_choi(probs))
