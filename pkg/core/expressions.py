"""
Closed-form expressions for sequence templates, exact tail values and QED parameter rules.
Expressions are parsed with sympy over a fixed vocabulary and compiled to numpy callables.
"""

import logging
import re
from typing import Callable, Dict, Iterable, Optional

import numpy as np
import sympy

from core.errors import ParseError

logger = logging.getLogger(__name__)

# Index and variable symbols; `j` counts modes, `p` and `t` are momentum and time
SYMBOLS = {
    'j': sympy.Symbol('j', positive=True),
    'p': sympy.Symbol('p', real=True),
    't': sympy.Symbol('t', real=True),
}

FUNCTIONS = {
    'exp': sympy.exp,
    'log': sympy.log,
    'sqrt': sympy.sqrt,
    'sin': sympy.sin,
    'cos': sympy.cos,
    'tan': sympy.tan,
    'sinh': sympy.sinh,
    'cosh': sympy.cosh,
    'tanh': sympy.tanh,
    'arctan': sympy.atan,
    'atan': sympy.atan,
    'abs': sympy.Abs,
    'sign': sympy.sign,
    'zeta': sympy.zeta,
    'gamma': sympy.gamma,
}

CONSTANTS = {
    'pi': sympy.pi,
    'e': sympy.E,
    'E': sympy.E,
    'I': sympy.I,
}

# Identifiers not preceded by a digit or a dot, so "2e5" and "1j" stay numbers
_NAME_PATTERN = re.compile(r'(?<![\w.])[A-Za-z_]\w*')
_ATTRIBUTE_PATTERN = re.compile(r'\.\s*[A-Za-z_]')


def parse_expression(text: str, variables: Iterable[str] = ()) -> sympy.Expr:
    """
    Parse `text` into a sympy expression in the given variables.

    Args:
        text: Expression such as "exp(-j) * cos(pi * j)"
        variables: Names from SYMBOLS the expression may depend on

    Returns:
        The parsed expression

    Raises:
        ParseError: syntax errors, attribute access or names outside the vocabulary
    """
    text = str(text).strip()
    if not text:
        raise ParseError("Empty expression")
    variables = list(variables)
    vocabulary: Dict[str, object] = {**FUNCTIONS, **CONSTANTS}
    vocabulary.update({name: SYMBOLS[name] for name in variables})

    if _ATTRIBUTE_PATTERN.search(text):
        raise ParseError(f"Expression '{text}' uses attribute access")
    unknown = sorted({name for name in _NAME_PATTERN.findall(text)
                      if name not in vocabulary or name.startswith("_")})
    if unknown:
        raise ParseError(f"Expression '{text}' uses unknown names: {unknown}")

    try:
        expr = sympy.sympify(text, locals=vocabulary, rational=False)
    except (sympy.SympifyError, SyntaxError, TypeError, ValueError, AttributeError) as e:
        raise ParseError(f"Bad expression '{text}': {e}") from e
    if not isinstance(expr, sympy.Expr):
        raise ParseError(f"Expression '{text}' is not a numeric expression")

    allowed = {SYMBOLS[name] for name in variables}
    extra = expr.free_symbols - allowed
    if extra:
        raise ParseError(f"Expression '{text}' has free symbols {sorted(map(str, extra))}")
    logger.debug(f"Parsed '{text}' as {expr}")
    return expr


def compile_index_rule(text: str) -> Callable:
    """A numpy rule j -> terms for a closed-form sequence in `j`."""
    expr = parse_expression(text, ['j'])
    function = sympy.lambdify(SYMBOLS['j'], expr, modules=['scipy', 'numpy'])

    def rule(j):
        j = np.asarray(j, dtype=float)
        return np.broadcast_to(np.asarray(function(j), dtype=complex), j.shape)
    return rule


def compile_time_rule(text: str) -> tuple:
    """
    (rule(p, t), is_constant) for a number or an expression in p and t.

    Raises:
        ParseError: the expression cannot be parsed
    """
    expr = parse_expression(text, ['p', 't'])
    if not expr.free_symbols:
        value = complex(sympy.N(expr))
        if value.imag != 0:
            raise ParseError(f"Parameter '{text}' is not real")
        return (lambda p, t, value=value.real: value), True
    function = sympy.lambdify((SYMBOLS['p'], SYMBOLS['t']), expr, modules=['scipy', 'numpy'])
    return function, False


def evaluate_constant(text, precision: int = 30) -> Optional[complex]:
    """Numeric value of a constant expression such as "zeta(2)"."""
    if text is None or isinstance(text, (int, float, complex)):
        return text
    expr = parse_expression(str(text))
    try:
        return complex(sympy.N(expr, precision))
    except (TypeError, ValueError) as e:
        raise ParseError(f"Cannot evaluate '{text}': {e}") from e
