import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_density
from qnoise.channels import (
    KrausChannel, ThermalParams, apply_choi, build_choi, choi_to_kraus, depolarizing_channel,
    excitation_weight, identity_channel, spam_channel, thermal_channel, thermal_probabilities
)
from qnoise.errors import ChannelError
from qnoise.gate_kind import PAULI_I
from qnoise.qstate import apply_kraus, pure_state

GRID = [0.0, 1e-4, 11.68e-4, 0.01, 3.17e-2, 7.61e-2, 0.25, 0.5, 0.75, 1.0]


def _random_thermal(rng: np.random.Generator) -> ThermalParams:
    t1 = float(rng.uniform(10, 100))
    t2 = float(rng.uniform(t1 * 1.01, 2 * t1))
    return ThermalParams(t1, t2, float(rng.uniform(10, 2000)), float(rng.choice([0.0, 0.015, 0.1])), 4.9801e9)


class TestCPTPSuite:
    @pytest.mark.parametrize("p", GRID)
    def test_depolarizing(self, p):
        assert depolarizing_channel(p).completeness_error() <= 1e-10

    @pytest.mark.parametrize("p", GRID)
    def test_spam(self, p):
        assert spam_channel(p).completeness_error() <= 1e-10

    @pytest.mark.parametrize("t1, t2", [(56.15, 56.01), (50, 50), (50, 20), (50, 80), (50, 100), (1000, 1999)])
    @pytest.mark.parametrize("tg", [0, 20, 100, 600, 5000])
    @pytest.mark.parametrize("theta", [0.0, 0.015, 0.2])
    def test_thermal(self, t1, t2, tg, theta):
        ch = thermal_channel(ThermalParams(t1, t2, tg, theta, 4.9801e9))
        assert ch.completeness_error() <= 1e-10

    def test_rejects_non_cptp(self):
        with pytest.raises(ChannelError, match="not CPTP"):
            KrausChannel(1, (0.5 * PAULI_I,))


class TestDepolarizing:
    def test_zero_is_identity(self, rng):
        rho = random_density(rng, 1)
        assert_allclose(apply_kraus(rho, depolarizing_channel(0.0), [0]).data, rho.data, atol=1e-15)

    def test_three_quarters_fully_mixes(self, rng):
        for _ in range(5):
            out = apply_kraus(random_density(rng, 1), depolarizing_channel(0.75), [0])
            assert_allclose(out.data, np.eye(2) / 2, atol=1e-12)

    def test_operator_weights(self):
        ops = depolarizing_channel(0.3).operators
        assert len(ops) == 4
        assert_allclose(ops[0], math.sqrt(0.7) * np.eye(2))

    @pytest.mark.parametrize("p", [-0.1, 1.5, float('nan')])
    def test_out_of_range(self, p):
        with pytest.raises(ChannelError):
            depolarizing_channel(p)


class TestSpam:
    def test_readout_average(self):
        out = apply_kraus(pure_state(1, 0), spam_channel(7.61e-2), [0])
        assert_allclose(np.real(np.diag(out.data)), [0.9239, 0.0761], atol=1e-12)

    def test_certain_flip(self):
        out = apply_kraus(pure_state(1, 0), spam_channel(1.0), [0])
        assert_allclose(out.data, [[0, 0], [0, 1]])

    def test_out_of_range(self):
        with pytest.raises(ChannelError):
            spam_channel(1.01)


class TestExcitationWeight:
    def test_published_value(self):
        assert excitation_weight(4.9801e9, 0.015) == pytest.approx(1.44532e-14, rel=0.01)

    def test_zero_frequency(self):
        assert excitation_weight(0.0, 0.5) == 0.5

    def test_zero_temperature(self):
        assert excitation_weight(4.9801e9, 0.0) == 0.0


class TestThermalProbabilities:
    def test_no_time(self):
        p = thermal_probabilities(ThermalParams(50, 60, 0))
        assert (p.p_reset, p.p_Z, p.p_I) == (0.0, 0.0, 1.0)

    def test_equal_times_no_dephasing(self):
        p = thermal_probabilities(ThermalParams(40, 40, 300))
        assert p.p_Z == 0.0

    def test_published_averages(self):
        p = thermal_probabilities(ThermalParams(56.15, 56.01, 100, theta=0.0))
        assert p.p_reset == pytest.approx(1.78e-3, rel=0.01)
        assert p.p_Z == pytest.approx(2.22e-6, rel=0.02)
        assert p.p_reset1 == 0.0

    def test_sums_to_one(self, rng):
        for _ in range(50):
            t1 = float(rng.uniform(5, 100))
            p = thermal_probabilities(
                ThermalParams(t1, float(rng.uniform(1, 2 * t1)), float(rng.uniform(0, 3000)), 0.1, 4.9801e9)
            )
            assert p.p_I + p.p_Z + p.p_reset0 + p.p_reset1 == pytest.approx(1.0, abs=1e-12)
            assert all(0.0 <= v <= 1.0 for v in (p.p_I, p.p_Z, p.p_reset0, p.p_reset1, p.w_e))

    def test_t2_bound(self):
        with pytest.raises(ChannelError, match=r"T_2\(q\) <= 2T_1\(q\)"):
            ThermalParams(50, 101, 100)


class TestThermalChannel:
    def test_no_time_is_identity(self):
        ch = thermal_channel(ThermalParams(50, 40, 0))
        assert len(ch.operators) == 1
        assert_allclose(ch.operators[0], np.eye(2))

    def test_kraus_branch_zero_temperature(self):
        tp = ThermalParams(56.15, 56.01, 100, theta=0.0)
        ch = thermal_channel(tp)
        p = thermal_probabilities(tp)
        # identity, phase flip and the two-operator ground-state reset
        assert len(ch.operators) == 4
        out = apply_kraus(pure_state(1, 1), ch, [0])
        assert out.data[0, 0].real == pytest.approx(p.p_reset, rel=1e-12)

    def test_ground_state_fixed_at_zero_temperature(self):
        ch = thermal_channel(ThermalParams(30, 50, 400, theta=0.0))
        out = apply_kraus(pure_state(1, 0), ch, [0])
        assert_allclose(out.data, [[1, 0], [0, 0]], atol=1e-12)

    def test_choi_branch_matches_apply_choi(self, rng):
        tp = ThermalParams(50, 80, 300)
        ch = thermal_channel(tp)
        choi = build_choi(thermal_probabilities(tp))
        for _ in range(20):
            rho = random_density(rng, 1)
            assert_allclose(apply_kraus(rho, ch, [0]).data, apply_choi(rho, choi).data, atol=1e-9)

    def test_kraus_branch_agrees_with_choi(self, rng):
        # both representations describe the same map when T2 <= T1
        tp = ThermalParams(60, 45, 800, 0.1, 4.9801e9)
        ch = thermal_channel(tp)
        choi = build_choi(thermal_probabilities(tp))
        for _ in range(10):
            rho = random_density(rng, 1)
            assert_allclose(apply_kraus(rho, ch, [0]).data, apply_choi(rho, choi).data, atol=1e-10)

    def test_memoised(self):
        tp = ThermalParams(50, 80, 300)
        assert thermal_channel(tp) is thermal_channel(ThermalParams(50, 80, 300))


class TestChoi:
    def _choi(self, p_t2: float, p_reset: float) -> np.ndarray:
        c = np.zeros((4, 4), dtype=complex)
        c[0, 0] = 1
        c[2, 2] = p_reset
        c[3, 3] = 1 - p_reset
        c[0, 3] = c[3, 0] = p_t2
        return c

    def test_identity_choi(self, rng):
        rho = random_density(rng, 1)
        assert_allclose(apply_choi(rho, self._choi(1.0, 0.0)).data, rho.data, atol=1e-14)

    def test_full_reset(self):
        out = apply_choi(pure_state(1, 1), self._choi(0.0, 1.0))
        assert_allclose(out.data, [[1, 0], [0, 0]])

    @pytest.mark.parametrize("p_t2, p_reset", [(0.9, 0.05), (0.3, 0.5), (0.0, 1.0)])
    def test_ground_state_fixed(self, p_t2, p_reset):
        out = apply_choi(pure_state(1, 0), self._choi(p_t2, p_reset))
        assert_allclose(out.data, [[1, 0], [0, 0]])

    def test_output_partial_trace_is_identity(self, rng):
        for _ in range(20):
            c = build_choi(thermal_probabilities(_random_thermal(rng)))
            traced = np.einsum('iaja->ij', c.reshape(2, 2, 2, 2))
            assert_allclose(traced, np.eye(2), atol=1e-9)

    def test_identity_round_trip(self):
        ch = choi_to_kraus(self._choi(1.0, 0.0))
        assert len(ch.operators) == 1
        k = ch.operators[0]
        # equal to I up to a global phase
        assert_allclose(k * np.conj(k[0, 0]) / abs(k[0, 0]), np.eye(2), atol=1e-12)

    def test_random_choi_oracle(self, rng):
        worst = 0.0
        for _ in range(50):
            c = build_choi(thermal_probabilities(_random_thermal(rng)))
            ch = choi_to_kraus(c)
            for _ in range(20):
                rho = random_density(rng, 1)
                diff = apply_kraus(rho, ch, [0]).data - apply_choi(rho, c).data
                worst = max(worst, float(np.max(np.abs(diff))))
        assert worst <= 1e-9

    def test_non_cptp_rejected(self):
        c = np.zeros((4, 4), dtype=complex)
        c[0, 1] = 1.0
        with pytest.raises(ChannelError, match="not CPTP"):
            choi_to_kraus(c)

    def test_single_qubit_only(self):
        with pytest.raises(ChannelError):
            choi_to_kraus(np.eye(8))


class TestCompose:
    def test_spam_twice(self):
        ch = spam_channel(0.1).compose(spam_channel(0.1))
        out = apply_kraus(pure_state(1, 0), ch, [0])
        assert out.data[1, 1].real == pytest.approx(2 * 0.1 * 0.9)

    def test_superoperator_of_identity(self):
        assert_allclose(identity_channel(1).superoperator(), np.eye(4))
