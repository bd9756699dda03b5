import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leocell.errors import ValidationError
from leocell.kvconfig import as_float, as_int, format_kv, parse_kv, read_kv, require, write_kv


def test_parse_basic():
    assert parse_kv("a = 1\nb=two\n") == {"a": "1", "b": "two"}


def test_parse_skips_blank_and_comment_lines():
    assert parse_kv("\n# note\n  \nx = 3\n") == {"x": "3"}


def test_parse_strips_whitespace():
    assert parse_kv("  spaced   =   hello world  \n") == {"spaced": "hello world"}


def test_value_may_contain_equals():
    assert parse_kv("eq = a=b\n") == {"eq": "a=b"}


def test_duplicate_key_reports_line_number():
    with pytest.raises(ValidationError, match=r"line 3.*duplicate key 'a'"):
        parse_kv("a = 1\nb = 2\na = 3\n")


def test_missing_equals_reports_line_number():
    with pytest.raises(ValidationError, match="line 2"):
        parse_kv("a = 1\nnonsense\n")


def test_empty_key_rejected():
    with pytest.raises(ValidationError, match="empty key"):
        parse_kv("= 5\n")


def test_round_trip_through_file(tmp_path):
    path = tmp_path / "cfg.txt"
    pairs = {"alpha": "1.5", "beta": "-2", "note": "free text"}
    write_kv(path, pairs)
    assert read_kv(path) == pairs


def test_read_missing_file_is_validation_error(tmp_path):
    with pytest.raises(ValidationError, match="cannot read"):
        read_kv(tmp_path / "absent.txt")


def test_require_and_casts():
    pairs = {"f": "2.5", "i": "7", "s": "x"}
    assert require(pairs, "s") == "x"
    assert as_float(pairs, "f") == 2.5
    assert as_int(pairs, "i") == 7
    with pytest.raises(ValidationError, match="missing required key"):
        require(pairs, "gone")
    with pytest.raises(ValidationError, match="not a number"):
        as_float(pairs, "s")
    with pytest.raises(ValidationError, match="not an integer"):
        as_int(pairs, "f")


_key = st.text(alphabet="abcdefghijklmnopqrstuvwxyz_", min_size=1, max_size=12)
_value = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc"), blacklist_characters="\n"),
    max_size=30,
).map(str.strip).filter(lambda v: v and not v.startswith("#"))


@given(st.dictionaries(_key, _value, max_size=8))
@settings(max_examples=80, deadline=None)
def test_format_parse_round_trip(pairs):
    assert parse_kv(format_kv(pairs)) == pairs
