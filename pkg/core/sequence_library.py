"""
Named sequence templates for formal sums and ITP families.
Handles template lookup, `$1`-style argument expansion and conversion into RenSequence objects.
"""

import copy
import logging
import shlex
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from core.errors import BadParameter, ParseError
from core.expressions import compile_index_rule, evaluate_constant
from core.ren_sequence import RenSequence, Tail

logger = logging.getLogger(__name__)

BUILTIN_TEMPLATES = {
    # ITP families: the tail describes |x_k - 1|, the weak tail ||x_k| - 1|
    'unit': {'kind': 'closed_form', 'expr': '1', 'tail': {'type': 'exact', 'value': 0}},
    'inverse_square': {'kind': 'closed_form', 'expr': '1 + j**-2',
                       'tail': {'type': 'power', 'exponent': 2, 'coefficient': 1}},
    'shrinking': {'kind': 'closed_form', 'expr': '1 - 1/(j + 1)',
                  'tail': {'type': 'power', 'exponent': 1, 'coefficient': 1}},
    'phase': {'kind': 'closed_form', 'expr': 'exp(1j/j)',
              'tail': {'type': 'power', 'exponent': 1, 'coefficient': 1},
              'weak_tail': {'type': 'exact', 'value': 0}},
    # Formal sums: the tail describes the terms themselves
    'pseries': {'kind': 'closed_form', 'expr': 'j**-($1)',
                'tail': {'type': 'power', 'exponent': '$1', 'coefficient': 1}},
}


def _substitute(value: Any, args: List[str], raw: str) -> Any:
    """Replace $1, $2-, $* in every string of a nested spec."""
    if isinstance(value, dict):
        return {k: _substitute(v, args, raw) for k, v in value.items()}
    if isinstance(value, list):
        return [_substitute(v, args, raw) for v in value]
    if not isinstance(value, str):
        return value
    result = value
    # Ranges first so "$2-" is not read as "$2" followed by "-"
    for i in range(len(args), 0, -1):
        result = result.replace(f'${i}-', ' '.join(args[i - 1:]))
    for i in range(len(args), 0, -1):
        result = result.replace(f'${i}', args[i - 1])
    return result.replace('$*', raw)


def _evaluate_exact(value: Any) -> Optional[complex]:
    if value is None or isinstance(value, (int, float, complex)):
        return value
    if isinstance(value, dict):
        return complex(value.get('re', 0.0), value.get('im', 0.0))
    return evaluate_constant(value)


def tail_from_spec(spec: Optional[Dict[str, Any]]) -> Tail:
    if not spec:
        return Tail.unknown()
    spec = dict(spec)
    if str(spec.get('type', '')).lower() in ('exact', 'closed_form'):
        spec['value'] = _evaluate_exact(spec.get('value', 0.0))
    try:
        return Tail.from_dict(spec)
    except (TypeError, ValueError) as e:
        raise ParseError(f"Bad tail declaration {spec}: {e}") from e


def _table_values(values: Sequence) -> np.ndarray:
    try:
        return np.array([complex(v['re'], v.get('im', 0.0)) if isinstance(v, dict) else complex(v)
                         for v in values], dtype=complex)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"Bad table entry: {e}") from e


def sequence_from_spec(spec: Dict[str, Any], name: str = "") -> RenSequence:
    """
    Build a RenSequence from {kind: closed_form|table, expr | values, tail, start}.

    Raises:
        ParseError: unknown kind, bad expression or bad table entries
    """
    kind = str(spec.get('kind', '')).lower()
    tail = tail_from_spec(spec.get('tail'))
    start = int(spec.get('start', 1))
    if kind == 'table':
        if 'values' not in spec:
            raise ParseError(f"Table sequence '{name}' has no 'values'")
        values = _table_values(spec['values'])
        return RenSequence(values, tail if spec.get('tail') else Tail.exact(), start, name=name)
    if kind == 'closed_form':
        if 'expr' not in spec:
            raise ParseError(f"Closed-form sequence '{name}' has no 'expr'")
        return RenSequence(compile_index_rule(str(spec['expr'])), tail, start, name=name)
    raise ParseError(f"Unknown sequence kind '{kind}' in '{name}'")


class SequenceLibrary:
    """Named sequence templates backed by the settings database."""

    def __init__(self, settings_manager=None):
        self.settings_manager = settings_manager
        self._templates_cache: Optional[Dict[str, Dict[str, Any]]] = None

    def _load_templates(self):
        if self._templates_cache is None:
            self._templates_cache = copy.deepcopy(BUILTIN_TEMPLATES)
            if self.settings_manager is not None:
                for entry in self.settings_manager.get_sequences():
                    self._templates_cache[entry['name'].lower()] = entry['spec']

    def _clear_cache(self):
        self._templates_cache = None

    def expand(self, invocation: str) -> Dict[str, Any]:
        """
        Expand an invocation such as "pseries 2" into a concrete spec.

        Args:
            invocation: Template name followed by arguments (quotes allowed)

        Returns:
            Spec dict with every $n placeholder filled in
        """
        try:
            parts = shlex.split(invocation)
        except ValueError as e:
            raise ParseError(f"Cannot split '{invocation}': {e}") from e
        if not parts:
            raise ParseError("Empty sequence invocation")
        name, args = parts[0].lower(), parts[1:]
        raw = invocation.strip()[len(parts[0]):].strip()

        self._load_templates()
        if name not in self._templates_cache:
            raise BadParameter(f"No sequence template named '{name}'")
        spec = _substitute(self._templates_cache[name], args, raw)
        logger.debug(f"Expanded '{invocation}' to {spec}")
        return spec

    def build(self, invocation: str) -> RenSequence:
        return sequence_from_spec(self.expand(invocation), name=invocation.strip())

    def add_template(self, name: str, spec: Dict[str, Any]):
        """Add or update a stored template."""
        if self.settings_manager is None:
            raise BadParameter("Templates can only be stored with a settings database")
        self.settings_manager.add_sequence(name.lower(), spec)
        self._clear_cache()

    def delete_template(self, name: str):
        if self.settings_manager is not None:
            self.settings_manager.delete_sequence(name.lower())
        self._clear_cache()

    def get_templates(self) -> List[str]:
        self._load_templates()
        return sorted(self._templates_cache)
