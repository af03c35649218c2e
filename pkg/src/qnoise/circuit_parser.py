# -------------------------------------------------------------
# @file          circuit_parser.py
# @author        qnoise contributors
# @created       2026-09-06
# @description   Reads and writes the plain-text circuit format,
#                with {{ NAME }} constants rendered before parsing
# @license       MIT
# -------------------------------------------------------------

import logging
logger = logging.getLogger(__name__)

import regex as re
from pathlib import Path
from typing import Any, Mapping

from jinja2 import Environment, TemplateError, Undefined

from qnoise.circuit import Circuit, Gate
from qnoise.errors import CircuitError
from qnoise.gate_kind import GateKind


# one gate per line, e.g. "CNOT 0 1 @600   # comment"
LINE_PATTERN = re.compile(
    r'''
    ^\s*
    (?P<name>[A-Za-z_]\w*)               # gate name or alias, or the QUBITS header
    (?P<args>(?:[\s,]+\d+)*)             # operand list, spaces and/or commas
    \s*
    (?:@\s*(?P<duration>                 # optional per-gate duration in ns
        \d+(?:\.\d*)?(?:[eE][-+]?\d+)?
    ))?
    \s*$
    ''',
    re.VERBOSE
)
OPERAND_PATTERN = re.compile(r'\d+')
COMMENT_PATTERN = re.compile(r'#.*$')
HEADER = 'QUBITS'


class LogUndefined(Undefined):
    # unknown constants are left in place so the parser reports the line
    def __str__(self):
        logger.warning("Missing constant: '%s'", self._undefined_name)
        return f'{{{{ {self._undefined_name} }}}}'

    def __repr__(self):
        return str(self)


_ENV = Environment(
    autoescape=False,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
    undefined=LogUndefined,
)

EMIT_TEMPLATE = _ENV.from_string(
    '''{% for line in header %}
# {{ line }}
{% endfor %}
QUBITS {{ circuit.n_qubits }}
{% for g in circuit.gates %}
{{ g.kind.value }} {{ g.qubits | join(' ') }}{% if g.duration is not none %} @{{ '%r' | format(g.duration) }}{% endif %}

{% endfor %}
{% if trailing_measure %}
MEASURE {{ circuit.measured | join(' ') }}
{% endif %}
'''
)


def render_constants(src: str, constants: Mapping[str, Any] | None = None) -> str:
    if '{{' not in src and '{%' not in src: return src
    try: return _ENV.from_string(src).render(**(constants or {}))
    except TemplateError as exc:
        raise CircuitError(f"Circuit template error: {exc}") from exc


def parse_circuit(src: str, constants: Mapping[str, Any] | None = None) -> Circuit:
    text = render_constants(src, constants)

    n_qubits: int | None = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not (line := COMMENT_PATTERN.sub('', raw).strip()): continue
        if not (m := LINE_PATTERN.match(line)):
            raise CircuitError(f"line {lineno}: cannot parse '{line}'")

        name = m.group('name')
        operands = [int(x) for x in OPERAND_PATTERN.findall(m.group('args') or '')]

        # header, must come before any gate
        if name.upper() == HEADER:
            if gates or n_qubits is not None:
                raise CircuitError(f"line {lineno}: {HEADER} must be the first statement")
            if len(operands) != 1 or m.group('duration'):
                raise CircuitError(f"line {lineno}: expected '{HEADER} <n>'")
            n_qubits = operands[0]
            continue

        try:
            kind = GateKind.from_token(name)
            duration = float(d) if (d := m.group('duration')) is not None else None
            gates.append(Gate(kind, tuple(operands), duration))
        except ValueError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from exc

    if n_qubits is None:
        n_qubits = max((q for g in gates for q in g.qubits), default=-1) + 1
        if n_qubits == 0:
            raise CircuitError(f"Empty circuit without a {HEADER} header")

    circuit = Circuit(n_qubits, tuple(gates))
    logger.debug("Parsed %d gates over %d qubits", len(circuit), n_qubits)
    return circuit


def load_circuit(path: str | Path, constants: Mapping[str, Any] | None = None) -> Circuit:
    return parse_circuit(Path(path).read_text(encoding='utf-8'), constants)


def emit_circuit(circuit: Circuit, header: list[str] | tuple[str, ...] = ()) -> str:
    trailing = not circuit.has_measure_gate and tuple(circuit.measured) != tuple(range(circuit.n_qubits))
    return EMIT_TEMPLATE.render(circuit=circuit, header=header, trailing_measure=trailing)
