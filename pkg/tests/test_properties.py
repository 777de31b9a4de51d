"""Model-level invariants: monotonicity chains, rework dominance,
self-consistency, and algebraic properties of the aggregation helpers."""

from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from riskbn.riskmodel import (
    SeverityClass,
    TestingInfo as DeviceTestingInfo,
    assess_scenario,
    benefit_risk,
    combine_hazards,
    estimate_p1,
    rpn,
)
from riskbn.riskmodel.types import BenefitsInfo, HazardRow, ReworkInfo
from tests.conftest import scenario_1

SC = SeverityClass

fractions = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def _row(name, values, orr, br):
    return HazardRow(name, dict(zip(SC.ordered(), values)), orr, br)


rows_strategy = st.lists(
    st.builds(
        _row,
        st.text(min_size=1, max_size=8),
        st.lists(fractions, min_size=5, max_size=5),
        fractions,
        fractions,
    ),
    min_size=1,
    max_size=6,
)


class TestMonotonicityChain:
    def test_more_hazards_raise_p1_median(self):
        medians = [
            estimate_p1(DeviceTestingInfo(k, 1000)).median for k in (1, 3, 6, 12)
        ]
        assert all(b > a for a, b in zip(medians, medians[1:]))

    def test_more_hazards_raise_risk_and_lower_orr(self):
        base = scenario_1()
        reports = [
            assess_scenario(replace(base, testing=DeviceTestingInfo(k, 1000)))
            for k in (2, 8, 32)
        ]
        for sev in SC.ordered():
            medians = [r.severities[sev].risk_median for r in reports]
            assert all(b >= a * 0.999 for a, b in zip(medians, medians[1:]))
        orrs = [r.orr_acceptability for r in reports]
        assert all(b <= a + 1e-6 for a, b in zip(orrs, orrs[1:]))


class TestReworkDominance:
    @pytest.mark.parametrize("quality", ["low", "medium", "very_high"])
    def test_every_post_rework_median_not_above_pre(self, quality, report_s1):
        scenario = replace(scenario_1(), rework=ReworkInfo(quality, quality))
        post = assess_scenario(scenario)
        for sev in SC.ordered():
            assert (
                post.severities[sev].risk_median
                <= report_s1.severities[sev].risk_median * (1 + 1e-9)
            )


class TestCriteriaMonotonicity:
    def test_raising_criterion_never_hurts(self, report_s1):
        base = scenario_1()
        thresholds = dict(base.criteria.thresholds)
        thresholds[SC.FATAL] = thresholds[SC.FATAL] * 10
        relaxed = assess_scenario(
            replace(base, criteria=type(base.criteria)(thresholds))
        )
        assert (
            relaxed.severities[SC.FATAL].acceptability_fraction
            >= report_s1.severities[SC.FATAL].acceptability_fraction
        )
        assert relaxed.orr_acceptability >= report_s1.orr_acceptability - 1e-6


class TestReportSelfConsistency:
    def test_controls_complement_orr(self, report_s1, report_s4, report_lifepak):
        for report in (report_s1, report_s4, report_lifepak):
            assert report.controls_required_fraction + report.orr_acceptability == (
                pytest.approx(1.0, abs=1e-6)
            )
            assert report.controls_required_flag == (
                report.controls_required_fraction > 0.10
            )

    def test_fractions_within_bounds(self, report_s1, report_s4):
        for report in (report_s1, report_s4):
            for sev in SC.ordered():
                assert 0.0 <= report.severities[sev].acceptability_fraction <= 1.0
            assert 0.0 <= report.orr_acceptability <= 1.0


class TestCombineProperties:
    @settings(max_examples=50, deadline=None)
    @given(rows=rows_strategy)
    def test_permutation_invariant(self, rows):
        forward = combine_hazards(rows)
        backward = combine_hazards(rows[::-1])
        for sev in SC.ordered():
            assert forward.acceptability[sev] == pytest.approx(
                backward.acceptability[sev], abs=1e-12
            )
        assert forward.orr == pytest.approx(backward.orr, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(row=st.builds(
        _row,
        st.just("h"),
        st.lists(fractions, min_size=5, max_size=5),
        fractions,
        fractions,
    ), copies=st.integers(min_value=1, max_value=5))
    def test_idempotent_on_identical_rows(self, row, copies):
        combined = combine_hazards([row] * copies)
        for sev in SC.ordered():
            assert combined.acceptability[sev] == pytest.approx(
                row.acceptability[sev], abs=1e-12
            )

    @settings(max_examples=50, deadline=None)
    @given(rows=rows_strategy)
    def test_combined_values_stay_in_bounds(self, rows):
        combined = combine_hazards(rows)
        for sev in SC.ordered():
            assert 0.0 <= combined.acceptability[sev] <= 1.0
        assert 0.0 <= combined.orr <= 1.0


class TestBenefitRiskProperties:
    BENEFITS = BenefitsInfo("very_high", "high", "very_high")

    @settings(max_examples=50, deadline=None)
    @given(
        lo=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        delta=st.floats(min_value=1e-6, max_value=1.0, allow_nan=False),
    )
    def test_strictly_increasing_in_orr(self, lo, delta):
        hi = min(lo + delta, 1.0)
        if hi <= lo:
            return
        assert benefit_risk(hi, self.BENEFITS) > benefit_risk(lo, self.BENEFITS)


class TestRpnProperties:
    @settings(max_examples=100, deadline=None)
    @given(
        s=st.integers(min_value=1, max_value=5),
        o=st.integers(min_value=1, max_value=5),
        d=st.integers(min_value=1, max_value=5),
    )
    def test_symmetric_and_bounded(self, s, o, d):
        value = rpn(s, o, d)
        assert value == rpn(d, s, o) == rpn(o, d, s)
        assert 1 <= value <= 125
        assert value == 125 or (s, o, d) != (5, 5, 5)

    def test_maximized_at_five_five_five(self):
        assert all(
            rpn(s, o, d) <= rpn(5, 5, 5)
            for s in range(1, 6)
            for o in range(1, 6)
            for d in range(1, 6)
        )
