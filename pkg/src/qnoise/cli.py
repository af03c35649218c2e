# -------------------------------------------------------------
# @file          cli.py
# @author        qnoise contributors
# @created       2026-09-17
# @description   Command-line front end: walk experiments, model
#                comparisons, GA fits, calibration templates
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

import argparse
import csv
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from jinja2 import Environment, StrictUndefined

from qnoise import __version__
from qnoise.calibration import CalibrationData, dump_calibration, load_calibration, template_calibration
from qnoise.circuit import Architecture, Circuit
from qnoise.circuit_parser import load_circuit
from qnoise.errors import QNoiseError
from qnoise.metrics import (
    ProportionInterval, confidence_intervals, counts_to_distribution, hellinger, pairwise_hellinger,
    uniform_distribution
)
from qnoise.noise_model import ControlThermal, ModelVariant, Shots, build_model, simulate
from qnoise.optimizer import (
    GAConfig, OptimizationMode, census, optimize_routines, perturb_calibration
)
from qnoise.qstate import Distribution, ShotCounts, sample_shots
from qnoise.walks import WalkSpec, step_circuit, walk_architecture, walk_circuit_text

UNIFORM = 'UNIFORM'

_REPORT_ENV = Environment(autoescape=False, trim_blocks=True, lstrip_blocks=True, undefined=StrictUndefined)
REPORT_TEMPLATE = _REPORT_ENV.from_string(
    '''# Noise parameter optimization

- circuit: {{ circuit }}
- mode: {{ result.mode.value }}
- generations: {{ config.generations }}, population: {{ config.population_size }}, seed: {{ config.seed }}
- routines: {{ routines | length }}

| HD (Pre) | HD (Post) | % Distance |
|---|---|---|
{% if routines | length > 1 %}
| {{ '%.6f' | format(result.initial_distance) }} | {{ '%.6f' | format(hd[0]) }} ± {{ '%.6f' | format(hd[1]) }} | {{ '%.2f' | format(pc[0]) }} ± {{ '%.2f' | format(pc[1]) }} |
{% else %}
| {{ '%.6f' | format(result.initial_distance) }} | {{ '%.6f' | format(result.best_distance) }} | {{ '%.2f' | format(result.percent_change) }} |
{% endif %}

## Parameters

{% if routines | length > 1 %}
| parameter | pre | post (mean) | post (s.d.) |
|---|---|---|---|
{% for name, pre, mean, sd in parameters %}
| {{ name }} | {{ '%.6g' | format(pre) }} | {{ '%.6g' | format(mean) }} | {{ '%.3g' | format(sd) }} |
{% endfor %}

## Routines

| seed | HD (Post) | % Distance | evaluations |
|---|---|---|---|
{% for seed, r in routines %}
| {{ seed }} | {{ '%.6f' | format(r.best_distance) }} | {{ '%.2f' | format(r.percent_change) }} | {{ r.evaluations }} |
{% endfor %}
{% else %}
| parameter | pre | post |
|---|---|---|
{% for name, pre, post in result.parameters() %}
| {{ name }} | {{ '%.6g' | format(pre) }} | {{ '%.6g' | format(post) }} |
{% endfor %}
{% endif %}

## Best distance per generation

{% for h in result.history %}
{{ loop.index0 }}: {{ '%.6f' | format(h) }}
{% endfor %}
'''
)


# ------------------------------------------------------------------
# argument types
# ------------------------------------------------------------------

def _states(value: str) -> int:
    try: n = int(value)
    except ValueError: raise argparse.ArgumentTypeError(f"invalid integer '{value}'") from None
    if n < 4 or n & (n - 1):
        raise argparse.ArgumentTypeError(f"N must be a power of two and at least 4, got {n}")
    return n


def _non_negative(value: str) -> int:
    n = int(value)
    if n < 0: raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {n}")
    return n


def _positive(value: str) -> int:
    n = int(value)
    if n < 1: raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _define(value: str) -> tuple[str, str]:
    name, sep, val = value.partition('=')
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got '{value}'")
    return name.strip(), val.strip()


MODEL_CHOICES = [v.value.lower() for v in ModelVariant]


# ------------------------------------------------------------------
# output helpers
# ------------------------------------------------------------------

def write_distribution_csv(dist: Distribution, path: Path) -> None:
    with path.open('w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['outcome', 'probability'])
        writer.writerows(dist.to_rows())
    logger.info("Wrote %s", path)


def write_counts_csv(counts: ShotCounts, path: Path) -> list[ProportionInterval]:
    # raw counts next to their 95% error bars
    intervals = confidence_intervals(counts)
    with path.open('w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['outcome', 'count', 'probability', 'ci_low', 'ci_high'])
        writer.writerows((iv.outcome, iv.count, iv.probability, iv.low, iv.high) for iv in intervals)
    logger.info("Wrote %s", path)
    return intervals


def _intervals_doc(intervals: list[ProportionInterval]) -> dict[str, list[float]]:
    return {str(iv.outcome): [iv.probability, iv.low, iv.high] for iv in intervals}


def read_distribution_csv(path: Path, n_bits: int) -> Distribution:
    probs: dict[int, float] = {}
    with path.open(newline='', encoding='utf-8') as f:
        for row in csv.DictReader(f):
            try: probs[int(row['outcome'])] = probs.get(int(row['outcome']), 0.0) + float(row['probability'])
            except (KeyError, TypeError, ValueError) as exc:
                raise QNoiseError(f"{path}: expected 'outcome,probability' rows, got {row}") from exc
    return Distribution(n_bits, probs)


def write_json(doc: Any, path: Path) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    logger.info("Wrote %s", path)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ------------------------------------------------------------------
# circuit + calibration setup shared by the subcommands
# ------------------------------------------------------------------

def _walk_spec(args: argparse.Namespace) -> WalkSpec:
    return WalkSpec(args.states, args.steps, args.start)


def _calibration(args: argparse.Namespace, arch: Architecture) -> CalibrationData:
    if args.calib is None:
        logger.warning("No calibration given, using the published device averages on %d qubits", arch.n_qubits)
        return template_calibration(arch)
    cal = load_calibration(Path(args.calib))
    if getattr(args, 'assume_full_connectivity', False):
        # a device file only lists its physical pairs
        cal = cal.extended_to(arch)
    return cal


def _setup(args: argparse.Namespace) -> tuple[str, Circuit, Architecture, CalibrationData]:
    # returns (description, circuit, architecture, calibration)
    if getattr(args, 'circuit', None):
        circuit = load_circuit(Path(args.circuit), dict(args.define or []))
        if args.calib is not None and not args.assume_full_connectivity:
            cal = load_calibration(Path(args.calib))
            arch = cal.architecture()
        else:
            arch = (Architecture.full if args.assume_full_connectivity else Architecture.linear)(circuit.n_qubits)
            cal = _calibration(args, arch)
        return str(args.circuit), circuit, arch, cal

    spec = _walk_spec(args)
    arch = walk_architecture(spec, full=args.assume_full_connectivity)
    name = f"walk N={spec.n_states} steps={spec.steps} start={spec.initial_position}"
    return name, step_circuit(spec), arch, _calibration(args, arch)


def _exact(circuit: Circuit, cal: CalibrationData, arch: Architecture, variant: ModelVariant, control_trc: str) -> Distribution:
    dist = simulate(circuit, build_model(cal, arch, variant, control_trc))
    assert isinstance(dist, Distribution)
    return dist


# ------------------------------------------------------------------
# subcommands
# ------------------------------------------------------------------

def cmd_walk(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    spec = _walk_spec(args)
    _, circuit, arch, cal = _setup(args)

    ideal = _exact(circuit, cal, arch, ModelVariant.IDEAL, args.control_trc)
    uniform = uniform_distribution(spec.n_states)

    summary: dict[str, Any] = {
        'states': spec.n_states,
        'steps': spec.steps,
        'start': spec.initial_position,
        'workspace': spec.workspace,
        'measured': list(circuit.measured),
        'models': {},
    }
    for token in dict.fromkeys(args.model):
        variant = ModelVariant.from_token(token)
        dist = _exact(circuit, cal, arch, variant, args.control_trc)
        name = variant.value.lower()
        write_distribution_csv(dist, out / f'walk_{name}.csv')

        entry: dict[str, Any] = {
            'hellinger_ideal': hellinger(dist, ideal),
            'hellinger_uniform': hellinger(dist, uniform),
            'distribution': {str(o): p for o, p in dist.to_rows()},
        }
        if args.shots and not args.exact:
            counts = simulate(circuit, build_model(cal, arch, variant, args.control_trc), Shots(args.shots, args.seed))
            assert isinstance(counts, ShotCounts)
            intervals = write_counts_csv(counts, out / f'walk_{name}_counts.csv')
            empirical = counts_to_distribution(counts)
            entry['shots'] = {
                'count': args.shots,
                'seed': args.seed,
                'hellinger_exact': hellinger(empirical, dist),
                'hellinger_ideal': hellinger(empirical, ideal),
                'confidence_95': _intervals_doc(intervals),
            }
        summary['models'][name] = entry

    write_json(summary, out / 'walk_summary.json')
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    name, circuit, arch, cal = _setup(args)

    # the uniform baseline always joins, so one model already gives a pair
    variants = [ModelVariant.from_token(t) for t in dict.fromkeys(args.models)]

    named: dict[str, Distribution] = {
        v.value: _exact(circuit, cal, arch, v, args.control_trc) for v in variants
    }
    named[UNIFORM] = uniform_distribution(1 << len(circuit.measured))
    table = pairwise_hellinger(named)
    labels = list(named)

    with (out / 'compare.csv').open('w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['model', *labels])
        for a in labels: writer.writerow([a, *(table[(a, b)] for b in labels)])

    doc: dict[str, Any] = {
        'circuit': name,
        'models': labels,
        'hellinger': {a: {b: table[(a, b)] for b in labels} for a in labels},
    }
    if args.shots:
        # error bars of a finite-shot run of every model
        doc['shots'] = {'count': args.shots, 'seed': args.seed}
        doc['intervals'] = {}
        with (out / 'compare_intervals.csv').open('w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(['model', 'outcome', 'count', 'probability', 'ci_low', 'ci_high'])
            for v in variants:
                intervals = confidence_intervals(sample_shots(named[v.value], args.shots, args.seed))
                writer.writerows((v.value, iv.outcome, iv.count, iv.probability, iv.low, iv.high) for iv in intervals)
                doc['intervals'][v.value] = _intervals_doc(intervals)
        logger.info("Wrote %s", out / 'compare_intervals.csv')
    write_json(doc, out / 'compare.json')

    width = max(len(label) for label in labels)
    print(' ' * width + ''.join(f'{label:>10}' for label in labels))
    for a in labels:
        print(f'{a:<{width}}' + ''.join(f'{table[(a, b)]:>10.4f}' for b in labels))
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    if args.target is None and not args.synthetic:
        raise _UsageError("optimize needs --target PATH or --synthetic")
    out = _out_dir(args)
    name, circuit, arch, cal = _setup(args)

    if args.target is not None:
        target = read_distribution_csv(Path(args.target), len(circuit.measured))
    else:
        rng = np.random.default_rng(args.seed)
        perturbed = perturb_calibration(cal, census(circuit, arch), rng)
        target = _exact(circuit, perturbed, arch, ModelVariant.UNM, args.control_trc)
        write_distribution_csv(target, out / 'target.csv')

    cfg = GAConfig(
        population_size=args.population,
        generations=args.generations,
        seed=args.seed,
        workers=args.workers,
    )
    summary = optimize_routines(circuit, arch, cal, target, cfg, OptimizationMode(args.mode), args.routines)
    result = summary.best
    logger.info(
        "Optimization took %.2f seconds over %d routine(s)",
        sum(r.wall_time for r in summary.results), len(summary.results)
    )

    write_json(
        {'circuit': name, 'config': cfg.to_dict(), **result.to_dict(), **summary.to_dict()},
        out / 'optimization.json',
    )
    report = REPORT_TEMPLATE.render(
        circuit=name,
        result=result,
        config=cfg,
        routines=list(zip(summary.seeds, summary.results)),
        hd=summary.best_distance,
        pc=summary.percent_change,
        parameters=summary.parameters(),
    )
    (out / 'optimization.md').write_text(report, encoding='utf-8')
    logger.info("Wrote %s", out / 'optimization.md')

    if len(summary.results) > 1:
        (hd_mean, hd_sd), (pc_mean, pc_sd) = summary.best_distance, summary.percent_change
        print(
            f"HD pre {result.initial_distance:.6f} -> post {hd_mean:.6f} ± {hd_sd:.6f} "
            f"({pc_mean:.2f} ± {pc_sd:.2f}% reduction over {len(summary.results)} routines)"
        )
    else:
        print(
            f"HD pre {result.initial_distance:.6f} -> post {result.best_distance:.6f} "
            f"({result.percent_change:.2f}% reduction)"
        )
    return 0


def cmd_gen_calib(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    n = args.qubits if args.qubits is not None else WalkSpec(args.states).workspace
    arch = (Architecture.full if args.assume_full_connectivity else Architecture.linear)(n)
    dump_calibration(template_calibration(arch), out / 'calibration.json')
    logger.info("Wrote %s", out / 'calibration.json')
    return 0


def cmd_circuit(args: argparse.Namespace) -> int:
    text = walk_circuit_text(_walk_spec(args))
    if args.out is None: sys.stdout.write(text)
    else:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        logger.info("Wrote %s", path)
    return 0


# ------------------------------------------------------------------
# parser
# ------------------------------------------------------------------

class _UsageError(Exception):
    pass


def _add_walk_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument('--states', type=_states, required=required, default=4, help='cycle size N (power of two)')
    p.add_argument('--steps', type=_non_negative, default=1, help='coin flips')
    p.add_argument('--start', type=_non_negative, default=0, help='initial position')


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument('--calib', metavar='PATH', help='calibration JSON (default: published averages)')
    p.add_argument('--assume-full-connectivity', action='store_true', help='all-to-all coupling')
    p.add_argument('--control-trc', choices=[c.value for c in ControlThermal], default=ControlThermal.DURATION.value,
                   help='thermal time applied to CNOT controls')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out', metavar='DIR', default='.', help='output directory')


def _add_circuit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument('--circuit', metavar='PATH', help='circuit text file instead of a walk')
    p.add_argument('--define', metavar='NAME=VALUE', type=_define, action='append',
                   help='template constant for the circuit file')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='qnoise', description='Noisy quantum circuit simulation and noise fitting')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v info, -vv debug')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('walk', help='simulate a quantum walk under one or more noise models')
    _add_walk_args(p)
    _add_model_args(p)
    p.add_argument('--model', nargs='+', choices=MODEL_CHOICES, default=['unm'])
    p.add_argument('--shots', type=_positive, help='also sample this many shots')
    p.add_argument('--exact', action='store_true', help='exact distributions only, ignore --shots')
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser('compare', help='pairwise Hellinger distances between noise models')
    _add_walk_args(p, required=False)
    _add_circuit_args(p)
    _add_model_args(p)
    p.add_argument('--model', '--models', dest='models', nargs='+', choices=MODEL_CHOICES, default=MODEL_CHOICES)
    p.add_argument('--shots', type=_positive, help='also sample this many shots per model for error bars')
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser('optimize', help='fit noise parameters with a genetic algorithm')
    _add_walk_args(p, required=False)
    _add_circuit_args(p)
    _add_model_args(p)
    p.add_argument('--target', metavar='PATH', help='target distribution CSV (outcome,probability)')
    p.add_argument('--synthetic', action='store_true', help='target from a randomly perturbed calibration')
    p.add_argument('--generations', type=_non_negative, default=GAConfig.generations)
    p.add_argument('--population', type=_positive, default=GAConfig.population_size)
    p.add_argument('--workers', type=_positive, default=GAConfig.workers)
    p.add_argument('--mode', choices=[m.value for m in OptimizationMode], default=OptimizationMode.RATES.value)
    p.add_argument('--routines', type=_positive, default=1, help='independent GA runs on consecutive seeds')
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser('gen-calib', help='write a template calibration file')
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument('--qubits', type=_positive)
    group.add_argument('--states', type=_states, help='size the device for a walk on N states')
    p.add_argument('--assume-full-connectivity', action='store_true')
    p.add_argument('--out', metavar='DIR', default='.')
    p.set_defaults(func=cmd_gen_calib)

    p = sub.add_parser('circuit', help='print the walk circuit in the text format')
    _add_walk_args(p)
    p.add_argument('--out', metavar='PATH', help='write to a file instead of stdout')
    p.set_defaults(func=cmd_circuit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')

    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
    except QNoiseError as exc:
        print(f"qnoise: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"qnoise: error: {exc}", file=sys.stderr)
        return 2
    logger.info("%s finished in %.2f seconds", args.command, time.perf_counter() - t0)
    return code


if __name__ == '__main__':
    sys.exit(main())
