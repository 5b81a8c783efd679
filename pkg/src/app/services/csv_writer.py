"""
CSV and JSON emission of run records.

One row per grid point, fixed column order per task. Floats are written with
17 significant digits so a CSV re-read gives back the same doubles; missing
values are empty cells.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Union

from src.app.config.settings import settings
from src.app.models.sweep import CellValue, RunRecord, SweepSpec, SweepTask
from src.app.utils.errors import ConfigParseError

log = logging.getLogger(__name__)

_DELOC_COLUMNS = [
    "theta",
    "eta",
    "n",
    "family",
    "a_theta",
    "x_theta",
    "holder_cost",
    "shifted_r",
    "u_bound",
]

TASK_COLUMNS: Dict[SweepTask, List[str]] = {
    SweepTask.ANNEALED: [
        "index",
        "s",
        "b",
        "h",
        "free_energy",
        "n1",
        "n1_upper_bound",
        "status",
        "levels",
        "final_log_r",
    ],
    SweepTask.VARIANCE: [
        "index",
        "s",
        "b",
        "beta",
        "h",
        "gamma",
        "status",
        "levels",
        "final_log_r",
        "final_v",
        "variance_blown_up",
    ],
    SweepTask.MC: [
        "index",
        "s",
        "b",
        "beta",
        "h",
        "level",
        "pool_size",
        "replicas",
        "free_energy",
        "free_energy_stderr",
        "bias_scale",
        "log_mean",
        "log_mean_stderr",
        "annealed_log_r",
        "annealed_free_energy",
    ],
    SweepTask.CERTIFY_DELOC: [
        "index",
        "s",
        "b",
        "beta",
        "h",
        "verdict",
        "reason",
        "family",
        "theta",
        "eta",
        "n",
        "a_theta",
        "x_theta",
        "holder_cost",
        "shifted_r",
        "u_bound",
        "safety_margin",
        "strict_checked",
    ],
    SweepTask.CERTIFY_LOC: [
        "index",
        "s",
        "b",
        "beta",
        "h",
        "verdict",
        "reason",
        "witness_n",
        "log_r",
        "v",
        "elog_lower_bound",
        "threshold",
        "split",
        "strict_checked",
    ],
    SweepTask.BRACKET: [
        "index",
        "s",
        "b",
        "beta",
        "h_lb",
        "h_ub",
        "lb_status",
        "ub_status",
        *_DELOC_COLUMNS,
        "loc_witness_n",
        "loc_log_r",
        "loc_v",
        "loc_bound",
        "loc_threshold",
        "monotonicity_violations",
        "lb_evaluations",
        "ub_evaluations",
        "budget_exhausted",
    ],
    SweepTask.GREEN: [
        "index",
        "s",
        "b",
        "n",
        "green_site",
        "contact_term",
        "expected_contacts",
        "asymptotic_equivalent",
        "scaled_by_sqrt_s_power",
    ],
    SweepTask.LEMMA22: [
        "index",
        "s",
        "b",
        "beta",
        "c5",
        "h",
        "n1",
        "v_n1",
        "passed",
        "details",
    ],
    SweepTask.CHECKPOINT: [
        "index",
        "s",
        "b",
        "beta",
        "h",
        "level",
        "pool_size",
        "mean_log_r",
        "path",
    ],
}

FRACTIONAL_COLUMNS = ["theta", "fractional_moment", "fractional_moment_stderr"]


def columns_for(spec: SweepSpec) -> List[str]:
    columns = list(TASK_COLUMNS[spec.task])
    if spec.task is SweepTask.MC and spec.mc_controls.theta is not None:
        columns += FRACTIONAL_COLUMNS
    return columns


def format_cell(value: CellValue) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, f".{settings.output.FLOAT_DIGITS}g")
    return str(value)


def emit_csv(
    record: RunRecord, path: Union[str, Path], columns: Optional[List[str]] = None
) -> Path:
    """Write one row per point, plus the full record as JSON next to it."""
    path = Path(path)
    columns = columns or TASK_COLUMNS[record.task]
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(
            f, delimiter=settings.output.CSV_DELIMITER, lineterminator="\n"
        )
        writer.writerow(columns)
        for point in record.points:
            writer.writerow([format_cell(point.values.get(c)) for c in columns])

    json_path = path.with_suffix(".json")
    json_path.write_text(record.model_dump_json(indent=2), encoding="utf-8")
    log.info(f"Wrote {len(record.points)} rows to {path} and the record to {json_path}")
    return path


def read_columns(
    path: Union[str, Path], names: List[str]
) -> Dict[str, List[Optional[float]]]:
    """Numeric columns of a CSV written by emit_csv; empty cells become None."""
    path = Path(path)
    try:
        f = path.open(newline="", encoding="utf-8")
    except OSError as e:
        raise ConfigParseError(f"cannot read CSV: {e}", path=str(path)) from e
    out: Dict[str, List[Optional[float]]] = {name: [] for name in names}
    with f:
        reader = csv.DictReader(f, delimiter=settings.output.CSV_DELIMITER)
        header = reader.fieldnames or []
        for name in names:
            if name not in header:
                raise ConfigParseError("missing column", path=str(path), field=name)
        for row in reader:
            for name in names:
                cell = row[name]
                if cell == "":
                    out[name].append(None)
                    continue
                try:
                    out[name].append(float(cell))
                except ValueError as e:
                    raise ConfigParseError(
                        f"not a number: {cell!r}",
                        path=str(path),
                        line=reader.line_num,
                        field=name,
                    ) from e
    return out
