"""Rendering of risk reports as acceptability tables or machine JSON.

The machine format is canonical: sorted keys, compact separators, one
trailing newline.  The HTTP service returns these exact bytes, so
service output and CLI output compare byte-for-byte.
"""

from __future__ import annotations

import json
import math

from riskbn.errors import ScenarioSchemaError
from riskbn.riskmodel.types import (
    HazardRow,
    HazardTable,
    RiskReport,
    SeverityClass,
    SeverityResult,
)

ROW_CRITERIA = "Risk Acceptability Criteria"
ROW_MEDIAN = "Risk Estimate (Median)"
ROW_ACCEPTABILITY = "Risk Acceptability"
ROW_ORR = "Overall Residual Risk (ORR) Acceptability"
ROW_CONTROLS = "Additional risk controls required (criteria 10%)"
ROW_BR = "Benefit-Risk Analysis: ORR Acceptability"

_LABEL_W = 50
_COL_W = 12


def sci2(x: float) -> str:
    """Two-significant-figure scientific notation, e.g. 6.2E-5."""
    if x == 0:
        return "0"
    mantissa, exp = f"{x:.1E}".split("E")
    return f"{mantissa}E{int(exp)}"


def pct(x: float) -> str:
    """Percent in report-table precision (0.13%, 28.8%, 100%)."""
    v = 100.0 * x
    if v >= 99.95:
        s = f"{v:.0f}"
    elif v >= 1.0:
        s = f"{v:.1f}"
    else:
        s = f"{v:.2f}"
    s = s.rstrip("0").rstrip(".") if "." in s else s
    return s + "%"


def pct_int(x: float) -> str:
    """Integer percent, round half up (89/50 -> 70)."""
    v = math.floor(100.0 * x + 0.5)
    return f"{v:.0f}%"


def pct_combined_br(x: float) -> str:
    """Benefit-risk cells keep one decimal when the mean is not integral."""
    v = 100.0 * x
    nearest_tenth = math.floor(10.0 * v + 0.5) / 10.0
    if abs(nearest_tenth - round(nearest_tenth)) < 1e-9:
        return f"{nearest_tenth:.0f}%"
    return f"{nearest_tenth:.1f}%"


def _row(label: str, cells: list[str]) -> str:
    return label.ljust(_LABEL_W) + "".join(c.ljust(_COL_W) for c in cells).rstrip()


def render_report(
    report: RiskReport, fmt: str = "table", product: str = ""
) -> bytes:
    if fmt == "machine":
        payload = report_to_machine_dict(report)
        return (
            json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
        ).encode("utf-8")
    if fmt != "table":
        raise ScenarioSchemaError(f"unknown report format {fmt!r}")

    sevs = SeverityClass.ordered()
    lines = []
    if product:
        lines.append(_row("Product", [product]))
    lines.append(_row("Injury Severity", [s.value.capitalize() for s in sevs]))
    lines.append(
        _row(ROW_CRITERIA, [sci2(report.severities[s].criterion) for s in sevs])
    )
    lines.append(
        _row(ROW_MEDIAN, [sci2(report.severities[s].risk_median) for s in sevs])
    )
    lines.append(
        _row(
            ROW_ACCEPTABILITY,
            [pct(report.severities[s].acceptability_fraction) for s in sevs],
        )
    )
    lines.append(_row(ROW_ORR, [pct(report.orr_acceptability)]))
    lines.append(_row(ROW_CONTROLS, [pct(report.controls_required_fraction)]))
    if report.benefit_risk_acceptability is not None:
        lines.append(_row(ROW_BR, [pct(report.benefit_risk_acceptability)]))
    return ("\n".join(lines) + "\n").encode("utf-8")


def report_to_machine_dict(report: RiskReport) -> dict:
    return {
        "severities": {
            s.value: {
                "criterion": report.severities[s].criterion,
                "median": report.severities[s].risk_median,
                "acceptability": report.severities[s].acceptability_fraction,
            }
            for s in SeverityClass.ordered()
        },
        "orr": {
            "mean": report.orr_acceptability,
            "median": report.orr_median,
        },
        "controls_required": {
            "fraction": report.controls_required_fraction,
            "flag": report.controls_required_flag,
        },
        "benefit_risk": report.benefit_risk_acceptability,
        "meta": dict(report.meta),
    }


def parse_machine_report(data: bytes | str) -> RiskReport:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSchemaError(f"bad machine report: {exc}") from None
    try:
        severities = {}
        for sev in SeverityClass.ordered():
            entry = payload["severities"][sev.value]
            severities[sev] = SeverityResult(
                criterion=float(entry["criterion"]),
                risk_median=float(entry["median"]),
                acceptability_fraction=float(entry["acceptability"]),
            )
        br = payload.get("benefit_risk")
        return RiskReport(
            severities=severities,
            orr_acceptability=float(payload["orr"]["mean"]),
            orr_median=float(payload["orr"]["median"]),
            controls_required_fraction=float(
                payload["controls_required"]["fraction"]
            ),
            controls_required_flag=bool(payload["controls_required"]["flag"]),
            benefit_risk_acceptability=None if br is None else float(br),
            meta=dict(payload.get("meta", {})),
        )
    except (KeyError, TypeError) as exc:
        raise ScenarioSchemaError(f"bad machine report: missing {exc}") from None


# --- multi-hazard table -----------------------------------------------------------


def render_hazard_table(table: HazardTable, fmt: str = "table") -> bytes:
    if fmt == "machine":
        payload = hazard_table_to_machine_dict(table)
        return (
            json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
        ).encode("utf-8")
    if fmt != "table":
        raise ScenarioSchemaError(f"unknown table format {fmt!r}")

    sevs = SeverityClass.ordered()
    header = ["Risk Class"] + [s.value.capitalize() for s in sevs] + [
        "Overall residual risk",
        "Overall residual risk given benefits",
    ]
    lines = ["Risk Acceptability Table"]
    widths = [24] + [12] * 5 + [22, 36]

    def fmt_row(cells: list[str]) -> str:
        return "".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    lines.append(fmt_row(header))
    for row in table.rows:
        lines.append(fmt_row(_hazard_cells(row, combined=False)))
    lines.append(fmt_row(_hazard_cells(table.combined, combined=True)))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _hazard_cells(row: HazardRow, combined: bool) -> list[str]:
    cells = [row.name]
    for sev in SeverityClass.ordered():
        cells.append(pct_int(row.acceptability[sev]))
    cells.append(pct_int(row.orr))
    if row.benefit_risk is None:
        cells.append("-")
    elif combined:
        cells.append(pct_combined_br(row.benefit_risk))
    else:
        cells.append(pct_int(row.benefit_risk))
    return cells


def hazard_table_to_machine_dict(table: HazardTable) -> dict:
    def row_dict(row: HazardRow) -> dict:
        return {
            "name": row.name,
            "acceptability": {
                s.value: row.acceptability[s] for s in SeverityClass.ordered()
            },
            "orr": row.orr,
            "benefit_risk": row.benefit_risk,
        }

    return {
        "rows": [row_dict(r) for r in table.rows],
        "combined": row_dict(table.combined),
    }
