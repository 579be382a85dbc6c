"""Deterministic CSV and JSON writers for result tables."""

import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import config
from utils.surd import Surd

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")


@dataclass
class TableReport:
    """Named table with fixed columns and an optional summary block."""

    name: str
    columns: Sequence[str]
    rows: List[Sequence[Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"{self.name}: expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(values)

    def records(self) -> List[Dict[str, str]]:
        return [{col: render_cell(v) for col, v in zip(self.columns, row)} for row in self.rows]


def render_cell(value) -> str:
    """Text for one cell; surds render as fixed-digit decimals."""
    if value is None:
        return ""
    if isinstance(value, Surd):
        return value.decimal(getattr(config, "DECIMAL_DIGITS", 30))
    if isinstance(value, float):
        return f"{value:.6e}"
    if isinstance(value, (Fraction, int, str)):
        return str(value)
    return str(value)


def sign_label(sign: Optional[int]) -> str:
    if sign is None:
        return "indeterminate"
    return {1: "+", -1: "-", 0: "0"}[sign]


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    return render_cell(value)


def to_text(report: Union[TableReport, Dict], fmt: str = "csv") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"Unknown output format {fmt!r}; choose from {FORMATS}")
    if isinstance(report, dict):
        return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    if fmt == "json":
        payload = {
            "name": report.name,
            "columns": list(report.columns),
            "rows": report.records(),
            "summary": _jsonable(report.summary),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.columns)
    for record in report.records():
        writer.writerow([record[col] for col in report.columns])
    return buffer.getvalue()


def emit(report: Union[TableReport, Dict], fmt: str = "csv", path: Optional[Union[str, Path]] = None) -> str:
    """
    Write a report to path, or to stdout when path is None.

    Output depends only on the report contents: rows keep their order,
    JSON keys are sorted and numbers use fixed renderings.
    """
    text = to_text(report, fmt)
    if path is None:
        sys.stdout.write(text)
        return text
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    name = report.name if isinstance(report, TableReport) else "report"
    logger.info(f"Wrote {name} to {path}")
    return text


def load_report(path: Union[str, Path]) -> Union[TableReport, Dict]:
    """Read a JSON report written by emit."""
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    if {"name", "columns", "rows"} <= set(payload):
        rows = [[record[col] for col in payload["columns"]] for record in payload["rows"]]
        return TableReport(payload["name"], payload["columns"], rows, payload.get("summary", {}))
    return payload
