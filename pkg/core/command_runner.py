"""
Subcommand dispatch for the command-line front end.

Every handler turns a RunConfig into a JSON-ready payload (or CSV rows)
plus an exit code: 0 success, 1 domain failure, 2 parse or usage error.
"""

import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from core.bogoliubov import validate_bogoliubov
from core.diagonalizer import diagonalize, normal_ordering_from_result
from core.errors import BadParameter, BogoliubovError, ParseError
from core.expressions import compile_time_rule
from core.fock_space import (
    bosonic_vacuum,
    particle_moment,
    rapid_decay_norm,
    vacuum_annihilation_check,
    verify_conjugation,
)
from core.implementability import ModeFamily, classify_implementability, vacuum_data
from core.matrix_codec import MatrixCodec, to_jsonable
from core.mode_decomposition import BosonicMode, decompose
from core.models import (
    BCSModelParams,
    QEDModelParams,
    WickModelParams,
    bcs_family,
    bcs_sweep,
    qed_sweep,
    wick_divergence_probe,
    wick_family,
    wick_sweep,
)
from core.ren_sequence import (
    classify_form_factor,
    classify_itp_family,
    classify_ren1,
    compare_itp,
    phase_variation,
)
from core.sequence_library import SequenceLibrary, tail_from_spec
from core.settings_manager import SettingsManager, fingerprint

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

Payload = Tuple[Any, int]


@dataclass
class RunConfig:
    """One invocation: subcommand, inputs and the effective numeric settings."""
    command: str
    inputs: List[str] = field(default_factory=list)
    tol: float = 1e-10
    cutoff: int = 40
    sectors: int = 10
    radius: int = 10
    steps: int = 1024
    horizon: int = 1_000_000
    family_horizon: int = 20_000
    threads: int = 1
    output_format: str = "json"
    out: Optional[str] = None
    model: Optional[str] = None
    params: Dict[str, str] = field(default_factory=dict)
    radii: List[int] = field(default_factory=list)
    momenta: List[float] = field(default_factory=list)
    times: List[float] = field(default_factory=list)
    xi: Optional[float] = None
    mode: str = "ren1"
    use_cache: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise BadParameter(f"Tolerance must be positive, got {self.tol}")

    @classmethod
    def from_settings(cls, settings: SettingsManager, command: str, **overrides) -> "RunConfig":
        """Settings-database defaults with non-None overrides applied."""
        values = {
            'tol': settings.get_float('tol', 1e-10),
            'cutoff': settings.get_int('cutoff', 40),
            'sectors': settings.get_int('sectors', 10),
            'radius': settings.get_int('radius', 10),
            'steps': settings.get_int('steps', 1024),
            'horizon': settings.get_int('horizon', 1_000_000),
            'family_horizon': settings.get_int('family_horizon', 20_000),
            'threads': settings.get_int('threads', 1),
            'output_format': settings.get_setting('output_format', 'json'),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(command, **values)


def _format_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    if isinstance(value, (complex, np.complexfloating)):
        return f"{format(value.real, '.17g')}{format(value.imag, '+.17g')}j"
    return str(value)


def rows_to_csv(rows: List[Dict[str, Any]]) -> str:
    """CSV with a header row; floats use 17 significant digits."""
    buffer = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buffer, lineterminator="\n")
    header = list(rows[0].keys())
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_value(row[key]) for key in header])
    return buffer.getvalue()


def _param_float(params: Dict[str, str], key: str, default: Optional[float] = None) -> float:
    if key not in params:
        if default is None:
            raise BadParameter(f"Model parameter '{key}' is required")
        return default
    try:
        return float(params[key])
    except ValueError as e:
        raise BadParameter(f"Model parameter {key}={params[key]} is not a number") from e


class CommandRunner:
    """Maps subcommands to handlers and writes their output."""

    def __init__(self, settings_manager: SettingsManager,
                 sequence_library: Optional[SequenceLibrary] = None,
                 codec: Optional[MatrixCodec] = None, stream=None):
        self.settings_manager = settings_manager
        self.sequence_library = sequence_library or SequenceLibrary(settings_manager)
        self.codec = codec or MatrixCodec()
        self.stream = stream

        self.command_handlers: Dict[str, Callable[[RunConfig], Payload]] = {
            'validate': self._handle_validate,
            'decompose': self._handle_decompose,
            'classify': self._handle_classify,
            'diagonalize': self._handle_diagonalize,
            'simulate': self._handle_simulate,
            'sweep': self._handle_sweep,
            'itp': self._handle_itp,
        }

        self.sweep_handlers: Dict[str, Callable[[RunConfig], List[Dict[str, Any]]]] = {
            'wick': self._sweep_wick,
            'wick-probe': self._sweep_wick_probe,
            'bcs': self._sweep_bcs,
            'qed': self._sweep_qed,
        }

    def run(self, config: RunConfig) -> int:
        """Dispatch one subcommand and emit its payload; returns the exit code."""
        handler = self.command_handlers.get(config.command)
        if handler is None:
            logger.error(f"Unknown command '{config.command}'")
            self._emit({"error": "UnknownCommand", "message": config.command}, config)
            return EXIT_USAGE
        try:
            payload, code = handler(config)
        except ParseError as e:
            logger.error(f"{config.command}: {e}")
            self._emit({"error": e.reason, "message": str(e)}, config)
            return EXIT_USAGE
        except BogoliubovError as e:
            logger.error(f"{config.command} failed: {e.reason}: {e}")
            self._emit({"error": e.reason, "message": str(e)}, config)
            return EXIT_DOMAIN
        self._emit(payload, config)
        logger.info(f"{config.command} finished with exit code {code}")
        return code

    def _emit(self, payload: Any, config: RunConfig):
        if config.output_format == "csv" and isinstance(payload, list):
            text = rows_to_csv(payload)
        else:
            text = json.dumps(to_jsonable(payload), indent=2) + "\n"
        if config.out:
            Path(config.out).write_text(text, encoding="utf-8")
        else:
            (self.stream or sys.stdout).write(text)

    def _single_input(self, config: RunConfig) -> str:
        if len(config.inputs) != 1:
            raise ParseError(f"'{config.command}' takes exactly one input, got {len(config.inputs)}")
        return config.inputs[0]

    def _handle_validate(self, config: RunConfig) -> Payload:
        bmap = self.codec.parse_map(self._single_input(config))
        report = validate_bogoliubov(bmap, config.tol)
        return report.to_dict(), EXIT_OK if report.passed else EXIT_DOMAIN

    def _handle_decompose(self, config: RunConfig) -> Payload:
        bmap = self.codec.parse_map(self._single_input(config))
        return self.codec.build_decomposition(decompose(bmap, config.tol)), EXIT_OK

    def _family(self, config: RunConfig) -> ModeFamily:
        if config.model == 'wick':
            return wick_family(WickModelParams(_param_float(config.params, 'm'),
                                               _param_float(config.params, 'kappa')))
        if config.model == 'bcs':
            return bcs_family(BCSModelParams(_param_float(config.params, 'm'),
                                             _param_float(config.params, 'mu'),
                                             _param_float(config.params, 'delta', 1.0)))
        if config.model is not None:
            raise ParseError(f"Unknown model '{config.model}'")
        bmap = self.codec.parse_map(self._single_input(config))
        return ModeFamily.from_decomposition(decompose(bmap, config.tol))

    def _handle_classify(self, config: RunConfig) -> Payload:
        family = self._family(config)
        verdict = classify_implementability(family, config.family_horizon)
        payload = {"family": family.name, "verdict": verdict.to_dict()}
        try:
            payload["vacuum"] = vacuum_data(family, config.family_horizon).to_dict()
        except BogoliubovError as e:
            logger.info(f"No vacuum description for '{family.name}': {e}")
            payload["vacuum"] = {"error": e.reason, "message": str(e)}
        return payload, EXIT_OK

    def _handle_diagonalize(self, config: RunConfig) -> Payload:
        ham = self.codec.parse_hamiltonian(self._single_input(config))
        result = diagonalize(ham, config.tol)
        constant = normal_ordering_from_result(ham, result)
        value = constant.value
        if value is not None and complex(value).imag == 0:
            value = complex(value).real
        summary = {"value": value, "classification": constant.classification.to_dict()}
        return self.codec.build_diagonalization(result, summary), EXIT_OK

    def _handle_simulate(self, config: RunConfig) -> Payload:
        if config.xi is not None:
            modes = [BosonicMode.from_squeeze(config.xi)]
        else:
            bmap = self.codec.parse_map(self._single_input(config))
            modes = decompose(bmap, config.tol).modes
        checks = []
        for mode in modes:
            report = verify_conjugation(mode, config.cutoff, config.sectors)
            entry = {
                "index": mode.index,
                "conjugation": report.to_dict(),
                "vacuum_annihilation": vacuum_annihilation_check(mode, config.cutoff),
            }
            if isinstance(mode, BosonicMode):
                vacuum = bosonic_vacuum(mode.t, config.cutoff)
                entry["vacuum_overlap"] = float(abs(vacuum[0]))
                entry["mean_particle_number"] = particle_moment(abs(mode.t), 1)
                entry["rapid_decay_norm"] = rapid_decay_norm(abs(mode.t), 1)
            else:
                entry["kind"] = mode.kind.value
            checks.append(entry)
        worst = max((c["conjugation"]["max_residual"] for c in checks), default=0.0)
        return {"modes": checks, "max_residual": worst}, EXIT_OK

    def _handle_sweep(self, config: RunConfig) -> Payload:
        handler = self.sweep_handlers.get(config.model or '')
        if handler is None:
            raise ParseError(f"Unknown model '{config.model}'")
        key = fingerprint({
            'model': config.model, 'params': config.params, 'radius': config.radius,
            'radii': config.radii, 'momenta': config.momenta, 'times': config.times,
            'steps': config.steps,
        })
        max_age = self.settings_manager.get_int('cache_max_age', 86400)
        rows = self.settings_manager.get_sweep_cache(key, max_age) if config.use_cache else None
        if rows is None:
            rows = handler(config)
            if config.use_cache:
                self.settings_manager.save_sweep_cache(key, to_jsonable(rows))
        return rows, EXIT_OK

    def _sweep_wick(self, config: RunConfig) -> List[Dict[str, Any]]:
        params = WickModelParams(_param_float(config.params, 'm'), _param_float(config.params, 'kappa'))
        return wick_sweep(params, config.radius)

    def _sweep_wick_probe(self, config: RunConfig) -> List[Dict[str, Any]]:
        params = WickModelParams(_param_float(config.params, 'm'), _param_float(config.params, 'kappa'))
        radii = config.radii or [config.radius]
        return [{"R": r, "partial_sum": s} for r, s in wick_divergence_probe(params, radii)]

    def _sweep_bcs(self, config: RunConfig) -> List[Dict[str, Any]]:
        params = BCSModelParams(_param_float(config.params, 'm'), _param_float(config.params, 'mu'),
                                _param_float(config.params, 'delta', 1.0))
        return bcs_sweep(params, config.radius)

    def _sweep_qed(self, config: RunConfig) -> List[Dict[str, Any]]:
        rules = {}
        constant = True
        for key in ('eps_plus', 'eps_minus', 'f'):
            if key not in config.params:
                raise BadParameter(f"Model parameter '{key}' is required")
            rules[key], is_constant = compile_time_rule(config.params[key])
            constant = constant and is_constant
        if not config.times:
            raise BadParameter("QED sweep needs at least one time (--times)")
        params = QEDModelParams(rules['eps_plus'], rules['eps_minus'], rules['f'])
        start = _param_float(config.params, 's', 0.0)
        return qed_sweep(params, config.momenta or [0.0], config.times, start, config.steps,
                         config.threads, constant)

    def _handle_itp(self, config: RunConfig) -> Payload:
        invocation = " ".join(config.inputs)
        spec = self.sequence_library.expand(invocation)
        sequence = self.sequence_library.build(invocation)
        horizon = config.horizon
        if config.mode == 'ren1':
            result = classify_ren1(sequence, horizon).to_dict()
        elif config.mode == 'family':
            result = classify_itp_family(sequence.terms, sequence.tail, horizon).to_dict()
        elif config.mode == 'equivalence':
            weak = tail_from_spec(spec['weak_tail']) if 'weak_tail' in spec else None
            result = {"equivalence": compare_itp(sequence.terms, sequence.tail, weak, horizon).value}
        elif config.mode == 'phase':
            result = phase_variation(sequence.terms, sequence.tail, horizon).to_dict()
        elif config.mode == 'form-factor':
            result = classify_form_factor(sequence.terms, sequence.tail).to_dict()
        else:
            raise ParseError(f"Unknown itp mode '{config.mode}'")
        return {"sequence": invocation, "mode": config.mode, "result": result}, EXIT_OK
