import numpy as np
import pytest

from core.errors import BadParameter, ParseError
from core.ren_sequence import RenClass, TailKind, classify_ren1, zeta
from core.sequence_library import SequenceLibrary, sequence_from_spec, tail_from_spec


@pytest.fixture
def library(settings):
    return SequenceLibrary(settings)


def test_builtin_templates(library):
    assert {'unit', 'inverse_square', 'shrinking', 'phase', 'pseries'} <= set(library.get_templates())


def test_pseries_expansion(library):
    spec = library.expand("pseries 2")
    assert spec['expr'] == 'j**-(2)'
    assert spec['tail']['exponent'] == '2'
    result = classify_ren1(library.build("pseries 2"))
    assert result.kind is RenClass.SUMMABLE
    assert abs(result.value - zeta(2)) <= result.bound


def test_pseries_harmonic_diverges(library):
    assert classify_ren1(library.build("pseries 1"), horizon=1000).kind is RenClass.DIVERGENT_PLUS


def test_stored_templates_and_ranges(library):
    library.add_template('Shifted', {'kind': 'closed_form', 'expr': '$1 * j**-($2-)',
                                     'tail': {'type': 'power', 'exponent': '$2'}})
    spec = library.expand("shifted 3 2")
    assert spec['expr'] == '3 * j**-(2)'
    assert 'shifted' in library.get_templates()
    library.delete_template('shifted')
    with pytest.raises(BadParameter):
        library.expand("shifted 3 2")


def test_whole_argument_placeholder(library):
    library.add_template('table', {'kind': 'table', 'values': [], 'note': '$*'})
    assert library.expand("table a 'b c'")['note'] == "a 'b c'"


def test_expansion_errors(library):
    with pytest.raises(BadParameter):
        library.expand("nosuch 1")
    with pytest.raises(ParseError):
        library.expand("   ")
    with pytest.raises(ParseError):
        library.expand("pseries 'unterminated")


def test_templates_need_a_database():
    with pytest.raises(BadParameter):
        SequenceLibrary().add_template('x', {'kind': 'table', 'values': [1]})


def test_table_sequences():
    seq = sequence_from_spec({'kind': 'table', 'values': [1, {'re': 0.5, 'im': 1.0}]})
    assert seq.is_finite
    assert seq.tail.kind is TailKind.EXACT
    assert classify_ren1(seq).value == 1.5 + 1j
    with pytest.raises(ParseError):
        sequence_from_spec({'kind': 'table'})
    with pytest.raises(ParseError):
        sequence_from_spec({'kind': 'table', 'values': [{'im': 1.0}]})


def test_closed_form_expressions():
    seq = sequence_from_spec({'kind': 'closed_form', 'expr': 'exp(-j) * cos(pi * j)'})
    assert np.allclose(seq.evaluate(2), [-np.exp(-1), np.exp(-2)])
    with pytest.raises(ParseError):
        sequence_from_spec({'kind': 'closed_form', 'expr': '__import__("os")'})
    with pytest.raises(ParseError):
        sequence_from_spec({'kind': 'closed_form', 'expr': 'open(j)'})
    with pytest.raises(ParseError):
        sequence_from_spec({'kind': 'closed_form', 'expr': 'j +'})
    with pytest.raises(ParseError):
        sequence_from_spec({'kind': 'recursive', 'expr': 'j'})


def test_exact_tail_values():
    assert np.isclose(tail_from_spec({'type': 'exact', 'value': 'zeta(2)'}).value, np.pi ** 2 / 6)
    assert tail_from_spec(None).kind is TailKind.UNKNOWN
    with pytest.raises(ParseError):
        tail_from_spec({'type': 'exact', 'value': 'nosuch(1)'})
