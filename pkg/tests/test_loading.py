"""
Tests for loading.py: two-stage JSON loading and inline complex numbers.

Covers test matrix items:
- 39: valid payload parses cleanly (Stage 1)
- 40: malformed JSON → json_repair → valid payload, with a [WARN] on stderr (Stage 2)
- 41: unrecoverable input → InputFormatError with raw_input preserved
- 42: complex literals and tau lists
"""
import pytest
from mpmath import mp

from torelli.ciani import IDENTITY
from torelli.errors import InputFormatError
from torelli.loading import _get_failure_reason, _try_parse, load_payload, parse_complex, parse_tau_list, read_source
from torelli.schemas import FormPayload, IntegerMatrixPayload, MatrixPayload
from tests.conftest import fixture_path, load_fixture


# ---------------------------------------------------------------------------
# Sources
# ---------------------------------------------------------------------------

class TestReadSource:
    def test_existing_file_is_read(self):
        assert read_source(fixture_path("identity.json")) == load_fixture("identity.json")

    def test_inline_text_is_returned(self):
        assert read_source('{"a": 1}') == '{"a": 1}'

    def test_missing_path_is_treated_as_text(self):
        assert read_source("no/such/file.json") == "no/such/file.json"


# ---------------------------------------------------------------------------
# Stage 1
# ---------------------------------------------------------------------------

class TestStage1DirectParse:
    def test_matrix_file(self, capsys):
        payload = load_payload(fixture_path("identity.json"), MatrixPayload)
        assert payload.to_matrix() == IDENTITY
        assert "[WARN]" not in capsys.readouterr().err

    def test_inline_json(self):
        payload = load_payload(load_fixture("levi_g2.json"), IntegerMatrixPayload)
        assert payload.to_symplectic().g == 2

    def test_form_payload(self):
        form = load_payload(fixture_path("fermat.json"), FormPayload).to_form()
        assert form.degree == 4 and len(form.terms) == 3

    def test_try_parse_never_raises(self):
        assert _try_parse("", MatrixPayload) is None
        assert _try_parse("{}", MatrixPayload) is None


# ---------------------------------------------------------------------------
# Stage 2
# ---------------------------------------------------------------------------

class TestStage2Repair:
    def test_truncated_json_is_repaired(self, capsys):
        payload = load_payload(fixture_path("identity_truncated.json"), MatrixPayload)
        assert payload.to_matrix() == IDENTITY
        assert "[WARN] input for MatrixPayload was malformed JSON" in capsys.readouterr().err

    def test_single_quotes_are_repaired(self, capsys):
        payload = load_payload("{'a': ['1', '1', '1'], 'b': ['0', '0', '0']}", MatrixPayload)
        assert payload.to_matrix() == IDENTITY
        assert "[WARN]" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# Failures
# ---------------------------------------------------------------------------

class TestFailures:
    def test_raw_input_preserved(self):
        with pytest.raises(InputFormatError) as exc_info:
            load_payload("not a matrix at all", MatrixPayload)
        assert exc_info.value.raw_input == "not a matrix at all"
        assert exc_info.value.code == "io.input_format"

    def test_schema_violation_names_the_field(self):
        with pytest.raises(InputFormatError, match="'a'"):
            load_payload('{"a": ["1", "1"], "b": ["0", "0", "0"]}', MatrixPayload)

    def test_failure_reason_for_bad_json(self):
        assert "Invalid JSON" in _get_failure_reason("{bad json", MatrixPayload)

    def test_failure_reason_for_valid_payload(self):
        assert "Unknown" in _get_failure_reason(load_fixture("identity.json"), MatrixPayload)


# ---------------------------------------------------------------------------
# Complex literals
# ---------------------------------------------------------------------------

class TestParseComplex:
    @pytest.mark.parametrize(
        "text, re_, im_",
        [
            ("0.8i", "0", "0.8"),
            ("1+2i", "1", "2"),
            ("-0.5+1.1i", "-0.5", "1.1"),
            ("2", "2", "0"),
            ("i", "0", "1"),
            ("-i", "0", "-1"),
            ("1.5j", "0", "1.5"),
            (" 0.25 - 3i ", "0.25", "-3"),
        ],
    )
    def test_literals(self, text, re_, im_):
        z = parse_complex(text, 64)
        with mp.workprec(96):
            assert z == mp.mpc(mp.mpf(re_), mp.mpf(im_))

    @pytest.mark.parametrize("text", ["", "abc", "1+2", "2i3", "1.2.3i"])
    def test_rejected(self, text):
        with pytest.raises(InputFormatError):
            parse_complex(text)

    def test_tau_list(self):
        taus = parse_tau_list("0.8i, 1.1i,1.3i", 64)
        assert [float(t.imag) for t in taus] == [0.8, 1.1, 1.3]

    def test_empty_tau_list(self):
        with pytest.raises(InputFormatError):
            parse_tau_list(" , ")
