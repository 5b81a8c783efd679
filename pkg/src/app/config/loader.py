"""
Run configuration loader.

The configuration is one JSON document validated into a SweepSpec. Number
fields may also hold the keywords "sqrt(s)", "s^-n" (n taken from
certificate_controls.n) or "s^-K" for an integer literal K.
"""

import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, Optional, Union

from src.app.models.sweep import SweepSpec
from src.app.utils.errors import ConfigParseError

log = logging.getLogger(__name__)

_SQRT_S = re.compile(r"^\s*sqrt\(\s*s\s*\)\s*$")
_S_POW_N = re.compile(r"^\s*s\s*\^\s*-\s*n\s*$")
_S_POW_K = re.compile(r"^\s*s\s*\^\s*-\s*(\d+)\s*$")


def resolve_keyword(
    value: str, s: int, n: Optional[int], field: str, path: str = ""
) -> Union[float, str]:
    """Number a keyword stands for; other strings are returned unchanged."""
    if _SQRT_S.match(value):
        return math.sqrt(s)
    if _S_POW_N.match(value):
        if n is None:
            raise ConfigParseError(
                '"s^-n" needs certificate_controls.n to be set',
                path=path,
                field=field,
            )
        return float(s) ** (-n)
    match = _S_POW_K.match(value)
    if match:
        return float(s) ** (-int(match.group(1)))
    return value


def _resolve(node: Any, s: int, n: Optional[int], field: str, path: str) -> Any:
    if isinstance(node, dict):
        return {
            k: _resolve(v, s, n, f"{field}.{k}" if field else k, path)
            for k, v in node.items()
        }
    if isinstance(node, list):
        return [_resolve(v, s, n, f"{field}[{i}]", path) for i, v in enumerate(node)]
    if isinstance(node, str):
        return resolve_keyword(node, s, n, field, path)
    return node


def parse_config(raw: Dict[str, Any], path: str = "") -> SweepSpec:
    """Resolve keywords in a decoded document and validate it."""
    model = raw.get("model")
    if not isinstance(model, dict) or not isinstance(model.get("s"), int):
        raise ConfigParseError("model.s must be an integer", path=path, field="model.s")
    s = model["s"]
    controls = raw.get("certificate_controls") or {}
    n = controls.get("n") if isinstance(controls, dict) else None
    if n is not None and not isinstance(n, int):
        raise ConfigParseError(
            "must be an integer", path=path, field="certificate_controls.n"
        )
    resolved = _resolve(raw, s, n, "", path)
    return SweepSpec.model_validate(resolved)


def load_config(path: Union[str, Path]) -> SweepSpec:
    """Read and validate a JSON run configuration.

    Malformed JSON raises ConfigParseError with the offending line; invalid
    fields raise pydantic's ValidationError listing every violation.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigParseError(f"cannot read config: {e}", path=str(path)) from e
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, path=str(path), line=e.lineno) from e
    if not isinstance(raw, dict):
        raise ConfigParseError("top level must be a JSON object", path=str(path))
    spec = parse_config(raw, str(path))
    log.info(f"Loaded {spec.task.value} config from {path}")
    return spec
