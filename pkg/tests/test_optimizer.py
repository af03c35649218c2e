import numpy as np
import pytest

from qnoise.calibration import template_calibration, zero_noise_calibration
from qnoise.circuit import Architecture, Circuit, gate
from qnoise.errors import OptimizationError
from qnoise.metrics import hellinger
from qnoise.noise_model import ModelVariant, build_model, simulate
from qnoise.optimizer import (
    GAConfig, OptimizationMode, OptimizationResult, apply_genome, census, fitness, genome_bounds,
    genome_from_calibration, optimize, optimize_routines, perturb_calibration, repair
)
from qnoise.walks import WalkSpec, ideal_walk_distribution, step_circuit, walk_architecture


@pytest.fixture
def walk4():
    spec = WalkSpec(4)
    arch = walk_architecture(spec)
    return step_circuit(spec), arch, template_calibration(arch)


def _synthetic_target(circuit, arch, base, seed=11):
    perturbed = perturb_calibration(base, census(circuit, arch), np.random.default_rng(seed))
    return simulate(circuit, build_model(perturbed, arch, ModelVariant.UNM))


class TestCensus:
    def test_four_state_walk(self, walk4):
        circuit, arch, _ = walk4
        cen = census(circuit, arch)
        assert cen.counts == (4, 3, 2, 0)
        assert cen.total == 9

    def test_eight_state_walk(self):
        spec = WalkSpec(8)
        cen = census(step_circuit(spec), walk_architecture(spec))
        assert cen.counts == (6, 5, 3, 0)
        assert cen.total == 14

    def test_measure_only(self):
        cen = census(Circuit(2, (gate("MEASURE", 0, 1),)), Architecture.linear(2))
        assert cen.counts == (0, 0, 2, 0)

    def test_identity_and_prepare(self):
        circuit = Circuit(2, (gate("PREPARE", 1), gate("I", 0), gate("CNOT", 1, 0)))
        cen = census(circuit, Architecture.linear(2))
        assert cen.counts == (0, 1, 2, 1)

    def test_labels(self, walk4):
        circuit, arch, _ = walk4
        cen = census(circuit, arch)
        assert cen.labels() == [
            "Sq(0)", "Sq(1)", "Sq(2)", "Sq(3)", "CNOT(0,1)", "CNOT(1,2)", "CNOT(2,3)", "M(0)", "M(2)"
        ]
        labels = cen.labels(OptimizationMode.DECOHERENCE)
        assert labels[-8:] == ["T1(0)", "T1(1)", "T1(2)", "T1(3)", "T2(0)", "T2(1)", "T2(2)", "T2(3)"]
        assert len(labels) == cen.genome_length(OptimizationMode.DECOHERENCE) == 17


class TestGenome:
    def test_round_trip_through_calibration(self, walk4):
        circuit, arch, base = walk4
        cen = census(circuit, arch)
        genome = genome_from_calibration(base, cen, OptimizationMode.RATES)
        assert genome[0] == pytest.approx(11.68e-4)
        assert genome[4] == pytest.approx(3.17e-2)
        assert genome[-1] == pytest.approx(7.61e-2)
        assert apply_genome(base, cen, genome, OptimizationMode.RATES) == base

    def test_wrong_length(self, walk4):
        circuit, arch, base = walk4
        with pytest.raises(OptimizationError, match="needs 9"):
            apply_genome(base, census(circuit, arch), np.zeros(5), OptimizationMode.RATES)

    def test_decoherence_bounds_clip_infinite_times(self, walk4):
        circuit, arch, _ = walk4
        cen = census(circuit, arch)
        genome = genome_from_calibration(zero_noise_calibration(arch), cen, OptimizationMode.DECOHERENCE)
        _, hi = genome_bounds(cen, OptimizationMode.DECOHERENCE)
        assert np.all(np.isfinite(genome))
        assert genome[-1] == hi[-1]

    def test_repair_caps_t2(self, walk4):
        circuit, arch, _ = walk4
        cen = census(circuit, arch)
        genome = np.concatenate([np.zeros(9), np.full(4, 50.0), np.full(4, 150.0)])
        repaired = repair(genome, cen, OptimizationMode.DECOHERENCE)
        assert np.all(repaired[-4:] == 100.0)

    def test_perturbed_rates_stay_in_range(self, walk4):
        circuit, arch, base = walk4
        cen = census(circuit, arch)
        perturbed = perturb_calibration(base, cen, np.random.default_rng(3))
        before = genome_from_calibration(base, cen, OptimizationMode.RATES)
        after = genome_from_calibration(perturbed, cen, OptimizationMode.RATES)
        ratio = after / before
        assert np.all((ratio >= 0.5) & (ratio <= 2.0))
        assert not np.allclose(ratio, 1.0)


class TestFitness:
    def test_self_consistency(self, walk4):
        circuit, arch, base = walk4
        cen = census(circuit, arch)
        genome = genome_from_calibration(base, cen, OptimizationMode.RATES) * 1.7
        target = simulate(circuit, build_model(apply_genome(base, cen, genome, OptimizationMode.RATES), arch))
        assert fitness(genome, circuit, arch, base, target) == pytest.approx(0.0, abs=1e-9)

    def test_zero_genome_reaches_ideal(self, walk4):
        circuit, arch, _ = walk4
        zero = zero_noise_calibration(arch)
        target = ideal_walk_distribution(WalkSpec(4))
        assert fitness(np.zeros(9), circuit, arch, zero, target) == pytest.approx(0.0, abs=1e-9)

    def test_base_genome_matches_direct_simulation(self, walk4):
        circuit, arch, base = walk4
        ideal = ideal_walk_distribution(WalkSpec(4))
        direct = hellinger(simulate(circuit, build_model(base, arch)), ideal)
        genome = genome_from_calibration(base, census(circuit, arch), OptimizationMode.RATES)
        assert fitness(genome, circuit, arch, base, ideal) == pytest.approx(direct, abs=1e-12)
        assert 0.0 < direct < 1.0


class TestGAConfig:
    def test_defaults(self):
        cfg = GAConfig()
        assert (cfg.population_size, cfg.generations) == (30, 50)
        assert cfg.to_dict()["elite_count"] == 2

    @pytest.mark.parametrize("kwargs", [
        {"population_size": 1},
        {"elite_count": -1},
        {"tournament_size": 0},
        {"mutation_rate": 1.5},
        {"workers": 0},
        {"generations": -1},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(OptimizationError):
            GAConfig(**kwargs)

    def test_small_population_caps_elites_and_tournament(self):
        cfg = GAConfig(population_size=2)
        assert (cfg.elites, cfg.tournament) == (1, 2)
        assert (GAConfig().elites, GAConfig().tournament) == (2, 3)


class TestOptimize:
    CFG = GAConfig(population_size=8, generations=5, seed=4)

    def test_history_is_non_increasing(self, walk4):
        circuit, arch, base = walk4
        result = optimize(circuit, arch, base, _synthetic_target(circuit, arch, base), self.CFG)
        assert len(result.history) == self.CFG.generations + 1
        assert all(b <= a for a, b in zip(result.history, result.history[1:]))
        assert result.best_distance == result.history[-1] <= result.initial_distance
        assert result.evaluations <= self.CFG.population_size * (self.CFG.generations + 1)
        assert len(result.parameters()) == 9

    def test_self_target_starts_at_zero(self, walk4):
        circuit, arch, base = walk4
        target = simulate(circuit, build_model(base, arch))
        result = optimize(circuit, arch, base, target, self.CFG)
        assert result.initial_distance == pytest.approx(0.0, abs=1e-12)
        assert result.best_distance == pytest.approx(0.0, abs=1e-12)
        assert result.percent_change == 0.0

    def test_deterministic(self, walk4):
        circuit, arch, base = walk4
        target = _synthetic_target(circuit, arch, base)
        a = optimize(circuit, arch, base, target, self.CFG)
        b = optimize(circuit, arch, base, target, self.CFG)
        assert a.history == b.history
        assert np.array_equal(a.best_genome, b.best_genome)
        assert a.to_dict() == b.to_dict()

    def test_parallel_matches_serial(self, walk4):
        circuit, arch, base = walk4
        target = _synthetic_target(circuit, arch, base)
        serial = optimize(circuit, arch, base, target, self.CFG)
        threaded = optimize(circuit, arch, base, target, GAConfig(population_size=8, generations=5, seed=4, workers=2))
        assert serial.to_dict() == threaded.to_dict()

    def test_result_document(self, walk4):
        circuit, arch, base = walk4
        result = optimize(circuit, arch, base, _synthetic_target(circuit, arch, base), self.CFG)
        doc = result.to_dict()
        assert "wall_time" not in doc
        assert doc["mode"] == "rates"
        assert [p["name"] for p in doc["parameters"]] == census(circuit, arch).labels()

    def test_decoherence_mode_respects_t2_bound(self, walk4, monkeypatch):
        circuit, arch, base = walk4
        cen = census(circuit, arch)
        seen: list[np.ndarray] = []

        def fake_fitness(genome, *args, **kwargs):
            seen.append(np.array(genome))
            # pull every T2 upwards so mutations keep pushing against the bound
            return float(-np.sum(genome[cen.total + cen.n_qubits:]))

        monkeypatch.setattr("qnoise.optimizer.fitness", fake_fitness)
        result = optimize(circuit, arch, base, ideal_walk_distribution(WalkSpec(4)), self.CFG, "decoherence")
        assert result.mode is OptimizationMode.DECOHERENCE
        assert len(result.best_genome) == 17
        n, off = cen.n_qubits, cen.total
        for g in seen:
            assert np.all(g[off + n:] <= 2.0 * g[off:off + n] + 1e-12)

    def test_fitness_errors_are_wrapped(self, walk4, monkeypatch):
        circuit, arch, base = walk4

        def broken(*args, **kwargs):
            raise OptimizationError("boom")

        monkeypatch.setattr("qnoise.optimizer.fitness", broken)
        with pytest.raises(OptimizationError, match="Fitness evaluation failed: boom"):
            optimize(circuit, arch, base, ideal_walk_distribution(WalkSpec(4)), self.CFG)

    def test_population_of_two(self, walk4):
        circuit, arch, base = walk4
        cfg = GAConfig(population_size=2, generations=3, seed=1)
        result = optimize(circuit, arch, base, _synthetic_target(circuit, arch, base), cfg)
        assert len(result.history) == 4
        assert result.best_distance <= result.initial_distance


class TestRoutines:
    CFG = GAConfig(population_size=6, generations=2, seed=3)

    def test_consecutive_seeds(self, walk4):
        circuit, arch, base = walk4
        target = _synthetic_target(circuit, arch, base)
        summary = optimize_routines(circuit, arch, base, target, self.CFG, routines=3)
        assert summary.seeds == [3, 4, 5]
        assert len(summary.results) == 3
        # each routine is the plain run on its own seed
        alone = optimize(circuit, arch, base, target, GAConfig(population_size=6, generations=2, seed=4))
        assert summary.results[1].to_dict() == alone.to_dict()

    def test_summary(self, walk4):
        circuit, arch, base = walk4
        summary = optimize_routines(circuit, arch, base, _synthetic_target(circuit, arch, base), self.CFG, routines=3)
        distances = [r.best_distance for r in summary.results]
        assert summary.best.best_distance == min(distances)
        mean, sd = summary.best_distance
        assert mean == pytest.approx(np.mean(distances))
        assert sd == pytest.approx(np.std(distances, ddof=1))
        assert sd >= 0.0

        doc = summary.to_dict()
        assert [r["seed"] for r in doc["routines"]] == [3, 4, 5]
        assert doc["summary"]["count"] == 3
        assert [p["name"] for p in doc["summary"]["parameters"]] == census(circuit, arch).labels()

    def test_single_routine_has_no_spread(self, walk4):
        circuit, arch, base = walk4
        summary = optimize_routines(circuit, arch, base, _synthetic_target(circuit, arch, base), self.CFG)
        assert summary.best_distance[1] == 0.0
        assert all(sd == 0.0 for *_, sd in summary.parameters())

    def test_needs_a_routine(self, walk4):
        circuit, arch, base = walk4
        with pytest.raises(OptimizationError, match="routines"):
            optimize_routines(circuit, arch, base, ideal_walk_distribution(WalkSpec(4)), self.CFG, routines=0)


def test_percent_change():
    result = OptimizationResult(
        labels=["Sq(0)"], mode=OptimizationMode.RATES,
        initial_genome=np.array([0.1]), best_genome=np.array([0.2]),
        initial_distance=0.2, best_distance=0.05, history=[0.2, 0.05], evaluations=4,
    )
    assert result.percent_change == pytest.approx(75.0)
    assert result.parameters() == [("Sq(0)", 0.1, 0.2)]


@pytest.mark.slow
def test_synthetic_fit_halves_the_distance(walk4):
    circuit, arch, base = walk4
    target = _synthetic_target(circuit, arch, base, seed=2024)
    result = optimize(circuit, arch, base, target, GAConfig(population_size=30, generations=50, seed=0))
    assert all(b <= a for a, b in zip(result.history, result.history[1:]))
    assert result.best_distance <= 0.5 * result.initial_distance
