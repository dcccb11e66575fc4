"""
Report emission: a versioned, self-describing JSON document (structured) and a
one-row-per-cell CSV table (tabular). Defect values are rendered "p/q"; measures
are [point, numerator, denominator] rows.
"""
import io
import json
from typing import Any, Dict, List

import pandas as pd

from components.measure import from_json, to_json
from models.data_models import DefectRow, DeficitReport, Report, StageSummary
from utils.errors import AmenabilityError
from utils.rationals import format_number, parse_number, parse_rational

REPORT_FORMAT = "amenability-report"
REPORT_VERSION = 1
FORMATS = ("structured", "tabular")


class ReportFormatError(AmenabilityError):
    """A structured report document that parse_report cannot read"""


def _values_to_json(values: Dict[str, Any]) -> Dict[str, Any]:
    return {q: format_number(v) for q, v in values.items()}


def _row_to_json(row: DefectRow) -> Dict[str, Any]:
    data = {
        "stage": row.stage,
        "window": row.window,
        "point": row.point,
        "element": row.element,
        "values": _values_to_json(row.values),
        "flags": list(row.flags),
    }
    if row.sample:
        data["sample"] = [[point, element] for point, element in row.sample]
    if row.measures:
        data["measures"] = {label: to_json(m, str) for label, m in row.measures.items()}
    return data


def _deficit_to_json(report: DeficitReport) -> Dict[str, Any]:
    return {
        "suite": report.suite,
        "quantities": list(report.quantities),
        "verdict": report.verdict,
        "trend": report.trend,
        "flags": list(report.flags),
        "summaries": [
            {
                "stage": summary.stage,
                "maxima": _values_to_json(summary.maxima),
                "epsilon": None if summary.epsilon is None else format_number(summary.epsilon),
            }
            for summary in report.summaries
        ],
        "rows": [_row_to_json(row) for row in report.rows],
    }


def to_document(report: Report) -> Dict[str, Any]:
    return {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "provenance": report.provenance,
        "scenario": report.scenario,
        "verdict": report.verdict,
        "suites": {name: [_deficit_to_json(r) for r in reports] for name, reports in report.suites.items()},
    }


def emit_structured(report: Report) -> bytes:
    """Canonical JSON: sorted keys, fixed separators, trailing newline"""
    text = json.dumps(to_document(report), sort_keys=True, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def _values_from_json(values: Dict[str, Any]) -> Dict[str, Any]:
    return {q: parse_number(v) for q, v in values.items()}


def _deficit_from_json(data: Dict[str, Any]) -> DeficitReport:
    return DeficitReport(
        suite=data["suite"],
        quantities=tuple(data["quantities"]),
        rows=[
            DefectRow(
                stage=row["stage"],
                point=row["point"],
                element=row["element"],
                window=row["window"],
                values=_values_from_json(row["values"]),
                flags=list(row["flags"]),
                sample=[(point, element) for point, element in row.get("sample", [])],
                measures={label: from_json(rows, str) for label, rows in row.get("measures", {}).items()},
            )
            for row in data["rows"]
        ],
        summaries=[
            StageSummary(
                stage=summary["stage"],
                maxima=_values_from_json(summary["maxima"]),
                epsilon=None if summary["epsilon"] is None else parse_rational(summary["epsilon"]),
            )
            for summary in data["summaries"]
        ],
        verdict=data["verdict"],
        trend=data["trend"],
        flags=list(data["flags"]),
    )


def parse_report(data: bytes) -> Report:
    """Inverse of emit_structured"""
    try:
        document = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ReportFormatError(f"report is not JSON: {str(e)}")
    if not isinstance(document, dict) or document.get("format") != REPORT_FORMAT:
        raise ReportFormatError("not an amenability report document")
    if document.get("version") != REPORT_VERSION:
        raise ReportFormatError(f"unsupported report version {document.get('version')!r}")
    try:
        suites = {
            name: [_deficit_from_json(r) for r in reports] for name, reports in document["suites"].items()
        }
        return Report(document["scenario"], suites, document["provenance"])
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise ReportFormatError(f"malformed report document: {str(e)}")


def to_frame(report: Report) -> pd.DataFrame:
    """One row per (suite, window, stage, point, element) cell"""
    quantities: List[str] = []
    for reports in report.suites.values():
        for deficit in reports:
            quantities.extend(q for q in deficit.quantities if q not in quantities)
    columns = ["suite", "window", "stage", "point", "element"] + quantities + ["flags"]
    records = []
    for name, reports in report.suites.items():
        for deficit in reports:
            for row in deficit.rows:
                record = {
                    "suite": name,
                    "window": row.window,
                    "stage": row.stage,
                    "point": row.point,
                    "element": row.element,
                    "flags": ";".join(row.flags),
                }
                record.update(_values_to_json(row.values))
                records.append(record)
    return pd.DataFrame.from_records(records, columns=columns)


def emit_tabular(report: Report) -> bytes:
    buffer = io.StringIO()
    to_frame(report).to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue().encode("utf-8")


def emit(report: Report, format: str = "structured") -> bytes:
    if format == "structured":
        return emit_structured(report)
    if format == "tabular":
        return emit_tabular(report)
    raise ValueError(f"unknown report format {format!r}; expected one of {', '.join(FORMATS)}")
