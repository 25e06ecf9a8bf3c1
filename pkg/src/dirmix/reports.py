"""Convergence tables and their CSV/JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .scalar import Surd, format_scalar

BASE_COLUMNS = ("index", "value_decimal", "value_exact_num", "value_exact_den")


@dataclass
class Row:
    k: int
    value: float
    exact: Fraction | Surd | None = None
    extras: dict[str, Any] = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    quantity: str
    rows: list[Row]
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        ks = [r.k for r in self.rows]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("report rows must have strictly increasing k")

    @property
    def values(self) -> list[float]:
        return [r.value for r in self.rows]

    @property
    def exact_values(self) -> list:
        return [r.exact for r in self.rows]

    def last(self) -> Row:
        return self.rows[-1]

    @property
    def all_exact(self) -> bool:
        return bool(self.rows) and all(r.exact is not None for r in self.rows)


def exact_row(k: int, value, extras=None) -> Row:
    return Row(k, float(value), value, extras or {})


def _decimal(x: float) -> str:
    return repr(float(x))


def _exact_columns(exact) -> tuple[str, str]:
    if exact is None:
        return "", ""
    if isinstance(exact, Surd):
        # irrational: the numerator column carries the canonical surd text
        return format_scalar(exact), ""
    exact = Fraction(exact)
    return str(exact.numerator), str(exact.denominator)


def report_csv(report: ConvergenceReport) -> str:
    extra_keys = sorted({k for r in report.rows for k in r.extras})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(BASE_COLUMNS) + extra_keys)
    for r in report.rows:
        num, den = _exact_columns(r.exact)
        extras = [
            _decimal(r.extras[k]) if isinstance(r.extras.get(k), float) else r.extras.get(k, "")
            for k in extra_keys
        ]
        writer.writerow([r.k, _decimal(r.value), num, den] + extras)
    return buf.getvalue()


def jsonable(x):
    if isinstance(x, (Fraction, Surd)):
        return format_scalar(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def report_sidecar(report: ConvergenceReport) -> str:
    payload = {
        "quantity": report.quantity,
        "rows": len(report.rows),
        "all_exact": report.all_exact,
        "meta": jsonable(report.meta),
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def emit_report(report: ConvergenceReport, path) -> list[Path]:
    """Write ``<path>`` (CSV) and ``<path>.json`` (metadata); returns both paths."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sidecar = path.with_suffix(".json")
    path.write_text(report_csv(report), encoding="utf-8")
    sidecar.write_text(report_sidecar(report), encoding="utf-8")
    return [path, sidecar]
