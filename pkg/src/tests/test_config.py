"""
Tests for the JSON run configuration loader.
"""

import json
import math

import pytest
from pydantic import ValidationError

from src.app.config.loader import load_config, parse_config, resolve_keyword
from src.app.models.sweep import SweepTask
from src.app.utils.errors import ConfigParseError


def _write(tmp_path, doc) -> str:
    path = tmp_path / "run.json"
    path.write_text(json.dumps(doc, indent=2), encoding="utf-8")
    return str(path)


def test_load_minimal_config(tmp_path) -> None:
    spec = load_config(
        _write(
            tmp_path,
            {"model": {"s": 4, "b": 2.0}, "h_grid": [0.1, 0.01], "task": "annealed"},
        )
    )
    assert spec.task is SweepTask.ANNEALED
    assert spec.model.s == 4
    assert spec.h_grid == [0.1, 0.01]
    assert spec.beta_grid == [0.0]
    assert spec.seed is None


def test_keywords_resolve_against_s_and_n(tmp_path) -> None:
    spec = load_config(
        _write(
            tmp_path,
            {
                "model": {"s": 4, "b": "sqrt(s)"},
                "h_grid": ["s^-n", "s^-3"],
                "task": "certify_deloc",
                "certificate_controls": {"n": 2},
            },
        )
    )
    assert spec.model.b == 2.0
    assert spec.h_grid == [pytest.approx(1 / 16), pytest.approx(1 / 64)]


def test_s_pow_n_without_n_is_a_parse_error() -> None:
    with pytest.raises(ConfigParseError) as info:
        parse_config(
            {"model": {"s": 4, "b": 2.0}, "h_grid": ["s^-n"], "task": "annealed"}
        )
    assert info.value.field == "h_grid[0]"


def test_plain_strings_pass_through() -> None:
    assert resolve_keyword("gaussian", 4, None, "disorder.kind") == "gaussian"
    assert resolve_keyword(" sqrt( s ) ", 9, None, "model.b") == pytest.approx(3.0)
    assert resolve_keyword("s ^ -2", 3, None, "h") == pytest.approx(1 / 9)
    assert math.isclose(resolve_keyword("s^-n", 2, 10, "h"), 2.0**-10)


def test_malformed_json_reports_line(tmp_path) -> None:
    path = tmp_path / "bad.json"
    path.write_text('{\n  "model": {"s": 4,\n  "b": }\n}\n', encoding="utf-8")
    with pytest.raises(ConfigParseError) as info:
        load_config(path)
    assert info.value.line == 3
    assert str(path) in str(info.value)


def test_top_level_must_be_an_object(tmp_path) -> None:
    path = tmp_path / "list.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigParseError):
        load_config(path)


def test_missing_file_is_a_parse_error(tmp_path) -> None:
    with pytest.raises(ConfigParseError):
        load_config(tmp_path / "absent.json")


def test_s_must_be_an_integer() -> None:
    with pytest.raises(ConfigParseError) as info:
        parse_config({"model": {"s": 4.5, "b": 2.0}, "task": "annealed"})
    assert info.value.field == "model.s"


def test_mc_requires_a_seed() -> None:
    with pytest.raises(ValidationError) as info:
        parse_config({"model": {"s": 4, "b": 2.0}, "task": "mc"})
    assert "seed" in str(info.value)


def test_negative_beta_is_rejected() -> None:
    with pytest.raises(ValidationError):
        parse_config(
            {"model": {"s": 4, "b": 2.0}, "beta_grid": [-0.1], "task": "variance"}
        )


def test_table_disorder_cannot_feed_mc() -> None:
    with pytest.raises(ValidationError):
        parse_config(
            {
                "model": {"s": 4, "b": 2.0},
                "task": "mc",
                "seed": 1,
                "disorder": {
                    "kind": "table_mgf",
                    "table_t": [-1.0, 0.0, 1.0],
                    "table_log_m": [0.5, 0.0, 0.5],
                },
            }
        )


def test_all_violations_are_listed() -> None:
    with pytest.raises(ValidationError) as info:
        parse_config({"model": {"s": 1, "b": 0.5}, "task": "annealed"})
    assert info.value.error_count() == 2
