"""Scenario files: parsing, schema errors, canonical-form idempotence,
report rendering and the machine JSON round-trip."""

import json

import pytest

from riskbn.errors import ScenarioSchemaError, ScenarioSyntaxError
from riskbn.riskmodel import SeverityClass
from riskbn.scenario import (
    parse_machine_report,
    parse_scenario,
    render_hazard_table,
    render_report,
    render_scenario,
)
from riskbn.scenario.render import (
    ROW_MEDIAN,
    ROW_ORR,
    pct_combined_br,
    pct_int,
)
from riskbn.riskmodel.ops import hazard_table
from riskbn.riskmodel.types import HazardRow
from tests.conftest import SCENARIO_DIR

SC = SeverityClass


class TestParseScenario:
    def test_scenario_one_file(self):
        scenario = parse_scenario((SCENARIO_DIR / "s1.mdra").read_bytes())
        assert scenario.testing.hazards_observed == 5
        assert scenario.testing.demands == 1000
        assert scenario.field_data.demands == 3310
        assert scenario.field_data.injury_count(SC.FATAL) == 3
        assert scenario.field_data.injury_count(SC.MAJOR) == 10
        assert scenario.field_data.injury_count(SC.NEGLIGIBLE) == 2
        assert scenario.criteria[SC.FATAL] == pytest.approx(6.2e-5)
        assert scenario.benefits.patient_population == "very_high"

    def test_injuries_above_occurrences_rejected(self):
        text = (
            "[device]\nname = X\n"
            "[field]\ndemands = 100\noccurrences = 15\nfatal = 16\n"
            "[criteria]\nfatal = 6.2e-5\ncritical = 9.9e-5\nmajor = 2.5e-4\n"
            "minor = 7.6e-3\nnegligible = 1.0e-2\n"
        )
        with pytest.raises(ScenarioSchemaError):
            parse_scenario(text)

    def test_missing_criteria_section(self):
        text = "[device]\nname = X\n[testing]\nhazards = 1\ndemands = 10\n"
        with pytest.raises(ScenarioSchemaError):
            parse_scenario(text)

    def test_syntax_error_carries_line_number(self):
        text = "[device]\nname = X\nnot a key value line\n"
        with pytest.raises(ScenarioSyntaxError) as err:
            parse_scenario(text)
        assert err.value.line == 3

    def test_unknown_section(self):
        with pytest.raises(ScenarioSyntaxError):
            parse_scenario("[mystery]\nx = 1\n")

    def test_blend_without_field_rejected(self):
        text = (
            "[device]\nname = X\n[testing]\nhazards = 1\ndemands = 10\n"
            "[blend]\nweight = 0.5\n"
            "[criteria]\nfatal = 6.2e-5\ncritical = 9.9e-5\nmajor = 2.5e-4\n"
            "minor = 7.6e-3\nnegligible = 1.0e-2\n"
        )
        with pytest.raises(ScenarioSchemaError):
            parse_scenario(text)

    def test_labels_normalize(self):
        text = (
            "[device]\nname = X\n[testing]\nhazards = 1\ndemands = 10\n"
            "[criteria]\nfatal = 6.2e-5\ncritical = 9.9e-5\nmajor = 2.5e-4\n"
            "minor = 7.6e-3\nnegligible = 1.0e-2\n"
            "[benefits]\npatient_population = Very High\n"
            "device_performance = high\nclinical_outcome = very-high\n"
        )
        scenario = parse_scenario(text)
        assert scenario.benefits.patient_population == "very_high"
        assert scenario.benefits.clinical_outcome == "very_high"

    @pytest.mark.parametrize(
        "name", ["s1.mdra", "s2.mdra", "s3.mdra", "s4.mdra", "lifepak.mdra"]
    )
    def test_canonical_idempotence(self, name):
        original = parse_scenario((SCENARIO_DIR / name).read_bytes())
        rendered = render_scenario(original)
        again = parse_scenario(rendered)
        assert again == original
        assert render_scenario(again) == rendered


class TestRenderReport:
    def test_table_has_standard_row_labels(self, report_s1):
        text = render_report(report_s1, "table", product="Defibrillator").decode()
        assert ROW_MEDIAN in text
        assert ROW_ORR in text
        assert "Additional risk controls required (criteria 10%)" in text
        assert "Benefit-Risk Analysis: ORR Acceptability" in text

    def test_machine_round_trips_byte_identically(self, report_s1):
        raw = render_report(report_s1, "machine")
        parsed = parse_machine_report(raw)
        assert render_report(parsed, "machine") == raw

    def test_machine_contains_full_precision(self, report_s1):
        payload = json.loads(render_report(report_s1, "machine"))
        assert payload["severities"]["fatal"]["median"] == pytest.approx(
            report_s1.severities[SC.FATAL].risk_median, rel=1e-12
        )
        assert payload["orr"]["mean"] == report_s1.orr_acceptability
        assert set(payload["meta"]) >= {"seed", "bins", "engine_version"}


class TestHazardTableRendering:
    def _table(self):
        rows = [
            HazardRow(
                "Hazard 1",
                dict(zip(SC.ordered(), [0.89, 0.60, 0.80, 0.25, 0.30])),
                0.67,
                0.85,
            ),
            HazardRow(
                "Hazard 2",
                dict(zip(SC.ordered(), [0.50, 0.75, 1.00, 0.99, 0.75])),
                0.75,
                0.90,
            ),
        ]
        return hazard_table(rows)

    def test_combined_row_rendering(self):
        text = render_hazard_table(self._table()).decode()
        assert "Combined" in text
        combined_line = [l for l in text.splitlines() if l.startswith("Combined")][0]
        for cell in ("70%", "68%", "90%", "62%", "53%", "71%", "87.5%"):
            assert cell in combined_line

    def test_round_half_up(self):
        assert pct_int(0.695) == "70%"
        assert pct_int(0.675) == "68%"
        assert pct_int(0.525) == "53%"
        assert pct_combined_br(0.875) == "87.5%"
        assert pct_combined_br(0.85) == "85%"
