"""Scenario file format, report rendering and the command-line interface."""

from riskbn.scenario.format import parse_scenario, render_scenario
from riskbn.scenario.overrides import apply_override
from riskbn.scenario.render import (
    parse_machine_report,
    render_hazard_table,
    render_report,
    report_to_machine_dict,
)

__all__ = [
    "apply_override",
    "parse_machine_report",
    "parse_scenario",
    "render_hazard_table",
    "render_report",
    "render_scenario",
    "report_to_machine_dict",
]
