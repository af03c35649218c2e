import numpy as np
import pytest

from qnoise.calibration import template_calibration, zero_noise_calibration
from qnoise.channels import KrausChannel
from qnoise.circuit import Architecture
from qnoise.qstate import DensityMatrix


def random_density(rng: np.random.Generator, n_qubits: int, rank: int | None = None) -> DensityMatrix:
    dim = 1 << n_qubits
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = g @ g.conj().T
    return DensityMatrix(n_qubits, rho / np.trace(rho))


def random_channel(rng: np.random.Generator, arity: int, n_ops: int = 3) -> KrausChannel:
    # stacked Kraus operators form an isometry, so the set is CPTP
    dim = 1 << arity
    z = rng.normal(size=(n_ops * dim, dim)) + 1j * rng.normal(size=(n_ops * dim, dim))
    q, _ = np.linalg.qr(z)
    return KrausChannel(arity, tuple(q[k * dim:(k + 1) * dim, :].copy() for k in range(n_ops)), 'random')


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def embed(op: np.ndarray, targets: list[int], n_qubits: int) -> np.ndarray:
    # entry-by-entry construction: non-target bits must agree
    dim = 1 << n_qubits
    mask = sum(1 << t for t in targets)
    local = lambda x: sum(((x >> t) & 1) << k for k, t in enumerate(targets))
    full = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            if (i & ~mask) == (j & ~mask):
                full[i, j] = op[local(i), local(j)]
    return full


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def linear4() -> Architecture:
    return Architecture.linear(4)


@pytest.fixture
def device_cal(linear4):
    return template_calibration(linear4)


@pytest.fixture
def zero_cal(linear4):
    return zero_noise_calibration(linear4)
