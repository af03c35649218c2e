import pytest

from qnoise.circuit import Architecture, Circuit, Gate, gate, schedule, validate
from qnoise.errors import CircuitError
from qnoise.gate_kind import GateKind


class TestGate:
    def test_helper_accepts_aliases(self):
        g = gate("cx", 0, 1, duration=600)
        assert g.kind is GateKind.CNOT
        assert (g.control, g.target) == ((0,), 1)
        assert str(g) == "CNOT 0 1"

    def test_single_qubit_has_no_control(self):
        assert gate("H", 3).control == ()

    @pytest.mark.parametrize("kind, qubits", [
        (GateKind.CNOT, (0,)),
        (GateKind.H, (0, 1)),
        (GateKind.CNOT, (1, 1)),
        (GateKind.MEASURE, ()),
    ])
    def test_bad_operands(self, kind, qubits):
        with pytest.raises(CircuitError):
            Gate(kind, qubits)

    def test_negative_duration(self):
        with pytest.raises(CircuitError, match="negative"):
            gate("X", 0, duration=-1)


class TestCircuit:
    def test_measured_defaults_to_all_qubits(self):
        assert Circuit(3, (gate("H", 0),)).measured == (0, 1, 2)

    def test_measured_from_measure_gate(self):
        c = Circuit(3, (gate("H", 0), gate("MEASURE", 2, 0)))
        assert c.measured == (2, 0)
        assert c.has_measure_gate

    def test_prepared(self):
        c = Circuit(2, (gate("PREPARE", 0, 1), gate("X", 0)))
        assert c.prepared == (0, 1)

    def test_operand_out_of_range(self):
        with pytest.raises(CircuitError, match="outside"):
            Circuit(2, (gate("CNOT", 1, 2),))

    def test_prepare_after_gate(self):
        with pytest.raises(CircuitError, match="PREPARE"):
            Circuit(2, (gate("X", 0), gate("PREPARE", 1)))

    def test_gate_after_measure(self):
        with pytest.raises(CircuitError, match="MEASURE"):
            Circuit(2, (gate("MEASURE", 0), gate("X", 0)))

    def test_measured_twice(self):
        with pytest.raises(CircuitError):
            Circuit(2, (gate("MEASURE", 0), gate("MEASURE", 0)))

    def test_resolved_fills_missing_durations(self):
        c = Circuit(2, (gate("H", 0), gate("CNOT", 0, 1, duration=250)))
        r = c.resolved(lambda g: 42.0)
        assert [g.duration for g in r.gates] == [42.0, 250]
        assert c.gates[0].duration is None

    def test_append_rederives_measured(self):
        c = Circuit(2, (gate("H", 0),)).append(gate("MEASURE", 1))
        assert c.measured == (1,)
        assert len(c) == 2


class TestArchitecture:
    def test_linear(self):
        arch = Architecture.linear(4)
        assert arch.pairs() == [(0, 1), (1, 2), (2, 3)]
        assert arch.coupled(2, 1) and not arch.coupled(0, 2)

    def test_full(self):
        assert len(Architecture.full(4).pairs()) == 6

    def test_directed_coupling(self):
        arch = Architecture.from_coupling(2, [(0, 1)])
        assert (0, 1) in arch.coupling and (1, 0) not in arch.coupling
        assert arch.coupled(1, 0)

    def test_coupled_pairs_among_follow_operand_order(self):
        arch = Architecture.linear(4)
        assert arch.coupled_pairs_among((2, 0, 1)) == [(2, 1), (0, 1)]

    def test_connected(self):
        arch = Architecture.linear(4)
        assert arch.is_connected((0, 1, 2))
        assert not arch.is_connected((0, 1, 3))

    def test_self_loop(self):
        with pytest.raises(CircuitError, match="self-loop"):
            Architecture.from_coupling(2, [(1, 1)])


class TestValidate:
    def test_coupled_cnot(self):
        arch = Architecture.from_coupling(2, [(0, 1)])
        assert validate(Circuit(2, (gate("CNOT", 0, 1),)), arch) == []

    def test_uncoupled_cnot(self):
        arch = Architecture.from_coupling(3, [(0, 1), (1, 2)])
        violations = validate(Circuit(3, (gate("CNOT", 0, 2),)), arch)
        assert len(violations) == 1
        assert "not a coupled pair" in violations[0]

    def test_empty_circuit(self):
        assert validate(Circuit(2), Architecture.linear(2)) == []

    def test_direction_matters(self):
        arch = Architecture.from_coupling(2, [(0, 1)])
        assert validate(Circuit(2, (gate("CNOT", 1, 0),)), arch)

    def test_disconnected_toffoli(self):
        arch = Architecture.linear(4)
        assert validate(Circuit(4, (gate("CCX", 0, 1, 2),)), arch) == []
        assert validate(Circuit(4, (gate("CCX", 0, 1, 3),)), arch)

    def test_size_mismatch(self):
        assert validate(Circuit(2), Architecture.linear(3))


class TestSchedule:
    def test_sequential(self):
        sched = schedule(Circuit(1, (gate("H", 0, duration=20), gate("X", 0, duration=20))))
        assert sched.starts == (0.0, 20.0)
        assert sched.makespan == 40.0

    def test_parallel(self):
        sched = schedule(Circuit(2, (gate("H", 0, duration=20), gate("X", 1, duration=20))))
        assert sched.starts == (0.0, 0.0)

    def test_idle_gap(self):
        sched = schedule(Circuit(2, (gate("H", 0, duration=20), gate("CNOT", 0, 1, duration=300))))
        assert sched.starts[1] == 20.0
        assert sched.gaps[1] == {0: 0.0, 1: 20.0}
        assert sched.makespan == 320.0

    def test_unresolved_duration(self):
        with pytest.raises(CircuitError, match="no duration"):
            schedule(Circuit(1, (gate("H", 0),)))

    def test_makespan_is_longest_path(self, rng):
        # compare against a brute-force longest path through the gate DAG
        for _ in range(20):
            n = 4
            gates = []
            for _ in range(15):
                arity = int(rng.integers(1, 3))
                qs = rng.choice(n, size=arity, replace=False).tolist()
                gates.append(gate("H" if arity == 1 else "CNOT", *qs, duration=float(rng.integers(0, 500))))
            c = Circuit(n, tuple(gates))

            finish: list[float] = []
            for i, g in enumerate(c.gates):
                preds = [finish[j] for j in range(i) if set(c.gates[j].qubits) & set(g.qubits)]
                finish.append(max(preds, default=0.0) + g.duration)

            assert schedule(c).makespan == pytest.approx(max(finish))
