# -------------------------------------------------------------
# @file          optimizer.py
# @author        qnoise contributors
# @created       2026-09-15
# @description   Genetic-algorithm fit of the noise parameters a
#                circuit actually uses, minimising the Hellinger
#                distance between simulated and target outputs
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Any, Callable

import numpy as np
from bitarray import bitarray

from qnoise.calibration import CalibrationData
from qnoise.circuit import Architecture, Circuit
from qnoise.errors import OptimizationError, QNoiseError
from qnoise.gate_kind import GateKind
from qnoise.metrics import hellinger
from qnoise.noise_model import ModelVariant, build_model, simulate
from qnoise.noise_utils import DECOHERENCE_BOUNDS_US, GA_DEFAULTS, PERTURB_RANGE
from qnoise.qstate import Distribution


class OptimizationMode(str, Enum):
    RATES = 'rates'
    DECOHERENCE = 'decoherence'


@dataclass(frozen=True, slots=True)
class Census:
    n_qubits: int
    single: tuple[int, ...]                  # qubits with a 1q gate rate in play
    pairs: tuple[tuple[int, int], ...]       # unordered coupled pairs in play
    measured: tuple[int, ...]
    prepared: tuple[int, ...]

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return len(self.single), len(self.pairs), len(self.measured), len(self.prepared)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def labels(self, mode: OptimizationMode = OptimizationMode.RATES) -> list[str]:
        labels = (
            [f'Sq({q})' for q in self.single]
            + [f'CNOT({a},{b})' for a, b in self.pairs]
            + [f'M({q})' for q in self.measured]
            + [f'P({q})' for q in self.prepared]
        )
        if mode is OptimizationMode.DECOHERENCE:
            labels += [f'T1({q})' for q in range(self.n_qubits)]
            labels += [f'T2({q})' for q in range(self.n_qubits)]
        return labels

    def genome_length(self, mode: OptimizationMode = OptimizationMode.RATES) -> int:
        extra = 2 * self.n_qubits if mode is OptimizationMode.DECOHERENCE else 0
        return self.total + extra


def census(circuit: Circuit, arch: Architecture) -> Census:
    # each parameter counts once per qubit or pair, however often it is used
    n = circuit.n_qubits
    single, measured, prepared = bitarray(n), bitarray(n), bitarray(n)
    for mask in (single, measured, prepared): mask.setall(False)
    pairs: set[tuple[int, int]] = set()

    for g in circuit.gates:
        match g.kind:
            case GateKind.H | GateKind.X:
                single[g.qubits[0]] = True
            case GateKind.CNOT:
                pairs.add((min(g.qubits), max(g.qubits)))
            case GateKind.CCX:
                for q in g.qubits: single[q] = True
                pairs.update((min(a, b), max(a, b)) for a, b in arch.coupled_pairs_among(g.qubits))
            case GateKind.PREPARE:
                for q in g.qubits: prepared[q] = True
            case _:
                continue
    for q in circuit.measured: measured[q] = True

    return Census(
        n_qubits=n,
        single=tuple(single.search(1)),
        pairs=tuple(sorted(pairs)),
        measured=tuple(measured.search(1)),
        prepared=tuple(prepared.search(1)),
    )


def genome_bounds(cen: Census, mode: OptimizationMode) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = np.zeros(cen.total), np.ones(cen.total)
    if mode is OptimizationMode.DECOHERENCE:
        t_lo, t_hi = DECOHERENCE_BOUNDS_US
        lo = np.concatenate([lo, np.full(2 * cen.n_qubits, t_lo)])
        hi = np.concatenate([hi, np.full(2 * cen.n_qubits, t_hi)])
    return lo, hi


def genome_from_calibration(cal: CalibrationData, cen: Census, mode: OptimizationMode) -> np.ndarray:
    values = (
        [cal.sq_rate(q) for q in cen.single]
        + [cal.pair(a, b).error_rate for a, b in cen.pairs]
        + [cal.qubit(q).readout_error for q in cen.measured]
        + [cal.qubit(q).prep_error for q in cen.prepared]
    )
    if mode is OptimizationMode.DECOHERENCE:
        values += [cal.qubit(q).T1 for q in range(cen.n_qubits)]
        values += [cal.qubit(q).T2 for q in range(cen.n_qubits)]
    lo, hi = genome_bounds(cen, mode)
    return repair(np.clip(np.asarray(values, dtype=float), lo, hi), cen, mode)


def repair(genome: np.ndarray, cen: Census, mode: OptimizationMode) -> np.ndarray:
    # T2(q) <= 2 T1(q) has to hold for every evaluated genome
    if mode is OptimizationMode.DECOHERENCE:
        n, off = cen.n_qubits, cen.total
        t1 = genome[off:off + n]
        genome[off + n:off + 2 * n] = np.minimum(genome[off + n:off + 2 * n], 2.0 * t1)
    return genome


def apply_genome(cal: CalibrationData, cen: Census, genome: np.ndarray, mode: OptimizationMode) -> CalibrationData:
    if len(genome) != cen.genome_length(mode):
        raise OptimizationError(
            f"Genome has {len(genome)} values but the circuit's census needs {cen.genome_length(mode)}"
        )
    values = iter(float(v) for v in genome)
    single = {q: next(values) for q in cen.single}
    pairs = {p: next(values) for p in cen.pairs}
    readout = {q: next(values) for q in cen.measured}
    prep = {q: next(values) for q in cen.prepared}
    T1 = T2 = None
    if mode is OptimizationMode.DECOHERENCE:
        T1 = {q: next(values) for q in range(cen.n_qubits)}
        T2 = {q: next(values) for q in range(cen.n_qubits)}
    return cal.overlay(single=single, pairs=pairs, readout=readout, prep=prep, T1=T1, T2=T2)


def fitness(
    genome: np.ndarray,
    circuit: Circuit,
    arch: Architecture,
    base: CalibrationData,
    target: Distribution,
    mode: OptimizationMode = OptimizationMode.RATES,
    cen: Census | None = None,
) -> float:
    cen = cen or census(circuit, arch)
    cal = apply_genome(base, cen, np.asarray(genome, dtype=float), mode)
    dist = simulate(circuit, build_model(cal, arch, ModelVariant.UNM))
    assert isinstance(dist, Distribution)
    return hellinger(dist, target)


def perturb_calibration(
    base: CalibrationData,
    cen: Census,
    rng: np.random.Generator,
    low: float = PERTURB_RANGE[0],
    high: float = PERTURB_RANGE[1],
) -> CalibrationData:
    # every rate in play scaled by its own uniform factor, clamped to [0, 1]
    genome = genome_from_calibration(base, cen, OptimizationMode.RATES)
    factors = rng.uniform(low, high, size=genome.shape)
    return apply_genome(base, cen, np.clip(genome * factors, 0.0, 1.0), OptimizationMode.RATES)


@dataclass(frozen=True)
class GAConfig:
    population_size: int = GA_DEFAULTS['population_size']
    generations: int = GA_DEFAULTS['generations']
    elite_count: int = GA_DEFAULTS['elite_count']
    tournament_size: int = GA_DEFAULTS['tournament_size']
    mutation_rate: float = GA_DEFAULTS['mutation_rate']
    mutation_scale: float = GA_DEFAULTS['mutation_scale']
    mutation_floor: float = GA_DEFAULTS['mutation_floor']
    crossover_rate: float = GA_DEFAULTS['crossover_rate']
    init_scale: float = GA_DEFAULTS['init_scale']
    seed: int = GA_DEFAULTS['seed']
    workers: int = GA_DEFAULTS['workers']

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise OptimizationError(f"population_size must be at least 2, got {self.population_size}")
        if self.elite_count < 0:
            raise OptimizationError(f"elite_count must be non-negative, got {self.elite_count}")
        if self.tournament_size < 1:
            raise OptimizationError(f"tournament_size must be at least 1, got {self.tournament_size}")
        for name in ('mutation_rate', 'crossover_rate'):
            if not 0.0 <= (v := getattr(self, name)) <= 1.0:
                raise OptimizationError(f"{name} must be in [0, 1], got {v}")
        if self.generations < 0 or self.workers < 1:
            raise OptimizationError("generations must be >= 0 and workers >= 1")
        if self.mutation_scale < 0 or self.mutation_floor < 0 or self.init_scale < 0:
            raise OptimizationError("mutation_scale, mutation_floor and init_scale must be non-negative")

    # small populations keep at least one bred child and draw from everyone
    @property
    def elites(self) -> int:
        return min(self.elite_count, self.population_size - 1)

    @property
    def tournament(self) -> int:
        return min(self.tournament_size, self.population_size)

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class OptimizationResult:
    labels: list[str]
    mode: OptimizationMode
    initial_genome: np.ndarray = field(repr=False)
    best_genome: np.ndarray = field(repr=False)
    initial_distance: float
    best_distance: float
    history: list[float]
    evaluations: int
    wall_time: float = 0.0

    @property
    def percent_change(self) -> float:
        # reduction of the distance, positive when the fit improved
        if self.initial_distance == 0.0: return 0.0
        return 100.0 * (self.initial_distance - self.best_distance) / self.initial_distance

    def parameters(self) -> list[tuple[str, float, float]]:
        return [
            (label, float(a), float(b))
            for label, a, b in zip(self.labels, self.initial_genome, self.best_genome)
        ]

    def to_dict(self) -> dict[str, Any]:
        # runtimes are logged only, result files stay reproducible
        return {
            'mode': self.mode.value,
            'initial_distance': self.initial_distance,
            'best_distance': self.best_distance,
            'percent_change': self.percent_change,
            'history': list(self.history),
            'evaluations': self.evaluations,
            'parameters': [
                {'name': name, 'pre': pre, 'post': post} for name, pre, post in self.parameters()
            ],
        }


class _Fitness:
    # memoised on the genome's exact values
    def __init__(self, fn: Callable[[np.ndarray], float], workers: int) -> None:
        self._fn = fn
        self._workers = workers
        self._memo: dict[tuple[float, ...], float] = {}

    @property
    def evaluations(self) -> int:
        return len(self._memo)

    def __call__(self, population: list[np.ndarray]) -> np.ndarray:
        keys = [tuple(g.tolist()) for g in population]
        todo = list(dict.fromkeys(k for k in keys if k not in self._memo))
        if todo:
            genomes = [np.array(k) for k in todo]
            if self._workers > 1 and len(todo) > 1:
                with ThreadPoolExecutor(max_workers=self._workers) as pool:
                    scores = list(pool.map(self._fn, genomes))
            else:
                scores = [self._fn(g) for g in genomes]
            self._memo.update(zip(todo, scores))
        return np.array([self._memo[k] for k in keys])


def optimize(
    circuit: Circuit,
    arch: Architecture,
    base: CalibrationData,
    target: Distribution,
    cfg: GAConfig = GAConfig(),
    mode: OptimizationMode | str = OptimizationMode.RATES,
) -> OptimizationResult:
    mode = OptimizationMode(mode)
    t0 = time.perf_counter()

    cen = census(circuit, arch)
    labels = cen.labels(mode)
    lo, hi = genome_bounds(cen, mode)
    base_genome = genome_from_calibration(base, cen, mode)
    dim = len(base_genome)
    logger.info(
        "Optimizing %d parameters (census r_s=%d r_t=%d m=%d s=%d, mode %s)",
        dim, *cen.counts, mode.value
    )

    def score(genome: np.ndarray) -> float:
        try: return fitness(genome, circuit, arch, base, target, mode, cen)
        except QNoiseError as exc:
            raise OptimizationError(f"Fitness evaluation failed: {exc}") from exc

    evaluate = _Fitness(score, cfg.workers)
    rng = np.random.default_rng(cfg.seed)

    def mutate(genome: np.ndarray, rate: float, scale: float) -> np.ndarray:
        mask = rng.random(dim) < rate
        sigma = scale * np.abs(genome) + cfg.mutation_floor
        out = np.where(mask, genome + rng.normal(0.0, 1.0, dim) * sigma, genome)
        return repair(np.clip(out, lo, hi), cen, mode)

    # genome 0 is the calibration itself, the rest are perturbations of it
    population = [base_genome.copy()]
    population += [mutate(base_genome, 1.0, cfg.init_scale) for _ in range(cfg.population_size - 1)]
    scores = evaluate(population)

    initial_distance = float(scores[0])
    best_idx = int(np.argmin(scores))
    best_genome, best_distance = population[best_idx].copy(), float(scores[best_idx])
    history = [best_distance]

    def tournament() -> np.ndarray:
        entrants = rng.choice(len(population), size=cfg.tournament, replace=False)
        return population[min(entrants, key=lambda i: (scores[i], i))]

    for gen in range(1, cfg.generations + 1):
        tg = time.perf_counter()
        order = sorted(range(len(population)), key=lambda i: (scores[i], i))
        children = [population[i].copy() for i in order[:cfg.elites]]
        while len(children) < cfg.population_size:
            a, b = tournament(), tournament()
            if rng.random() < cfg.crossover_rate:
                child = np.where(rng.random(dim) < 0.5, a, b)
            else:
                child = a.copy()
            children.append(mutate(child, cfg.mutation_rate, cfg.mutation_scale))

        population = children
        scores = evaluate(population)
        idx = int(np.argmin(scores))
        if scores[idx] < best_distance:
            best_genome, best_distance = population[idx].copy(), float(scores[idx])
        history.append(best_distance)
        logger.info(
            "Generation %d/%d: best %.6f (%d evaluations, %.2f seconds)",
            gen, cfg.generations, best_distance, evaluate.evaluations, time.perf_counter() - tg
        )

    wall_time = time.perf_counter() - t0
    logger.info(
        "Optimization finished in %.2f seconds: %.6f -> %.6f",
        wall_time, initial_distance, best_distance
    )
    return OptimizationResult(
        labels=labels,
        mode=mode,
        initial_genome=base_genome,
        best_genome=best_genome,
        initial_distance=initial_distance,
        best_distance=best_distance,
        history=history,
        evaluations=evaluate.evaluations,
        wall_time=wall_time,
    )


def _spread(values: list[float]) -> tuple[float, float]:
    # mean and sample standard deviation, a single run has no spread
    arr = np.asarray(values, dtype=float)
    sd = float(np.std(arr, ddof=1)) if len(arr) > 1 else 0.0
    return float(np.mean(arr)), sd


@dataclass
class RoutineSummary:
    seeds: list[int]
    results: list[OptimizationResult]

    @property
    def best(self) -> OptimizationResult:
        return min(self.results, key=lambda r: r.best_distance)

    @property
    def best_distance(self) -> tuple[float, float]:
        return _spread([r.best_distance for r in self.results])

    @property
    def percent_change(self) -> tuple[float, float]:
        return _spread([r.percent_change for r in self.results])

    def parameters(self) -> list[tuple[str, float, float, float]]:
        # (name, pre, mean post, sd post)
        first = self.results[0]
        post = np.array([r.best_genome for r in self.results], dtype=float)
        return [
            (label, float(pre), *_spread(list(post[:, i])))
            for i, (label, pre) in enumerate(zip(first.labels, first.initial_genome))
        ]

    def to_dict(self) -> dict[str, Any]:
        mean_hd, sd_hd = self.best_distance
        mean_pc, sd_pc = self.percent_change
        return {
            'routines': [
                {'seed': seed, **result.to_dict()} for seed, result in zip(self.seeds, self.results)
            ],
            'summary': {
                'count': len(self.results),
                'initial_distance': self.results[0].initial_distance,
                'best_distance_mean': mean_hd,
                'best_distance_sd': sd_hd,
                'percent_change_mean': mean_pc,
                'percent_change_sd': sd_pc,
                'parameters': [
                    {'name': name, 'pre': pre, 'post_mean': mean, 'post_sd': sd}
                    for name, pre, mean, sd in self.parameters()
                ],
            },
        }


def optimize_routines(
    circuit: Circuit,
    arch: Architecture,
    base: CalibrationData,
    target: Distribution,
    cfg: GAConfig = GAConfig(),
    mode: OptimizationMode | str = OptimizationMode.RATES,
    routines: int = 1,
) -> RoutineSummary:
    """
    Independent GA runs on seeds cfg.seed, cfg.seed + 1, ... so the
    spread of the fitted parameters can be reported next to their mean.
    """
    if routines < 1:
        raise OptimizationError(f"routines must be at least 1, got {routines}")

    seeds = [cfg.seed + i for i in range(routines)]
    results: list[OptimizationResult] = []
    for i, seed in enumerate(seeds, start=1):
        logger.info("Optimization routine %d/%d (seed %d)", i, routines, seed)
        results.append(optimize(circuit, arch, base, target, replace(cfg, seed=seed), mode))
    return RoutineSummary(seeds, results)
