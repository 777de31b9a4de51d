"""Risk-model operations against conjugate-posterior oracles."""

import numpy as np
import pytest
from scipy.stats import beta as beta_dist

from riskbn.errors import (
    EmptyInputError,
    InvalidAttachmentPointError,
    MissingCriteriaError,
    NameCollisionError,
    NoOccurrencesError,
    RankOutOfRangeError,
    WeightOutOfRangeError,
)
from riskbn.inference import compile_network, posterior
from riskbn.riskmodel import (
    FieldInfo,
    FragmentSpec,
    HazardRow,
    ManufacturerInfo,
    SeverityClass,
    TestingInfo as DeviceTestingInfo,  # noqa: N814 - avoid pytest collection
    acceptability,
    attach_fragment,
    benefit_risk,
    benefit_score,
    blend_p1,
    build_evidence,
    build_template,
    combine_hazards,
    controls_required,
    estimate_p1,
    estimate_p2,
    injury_risk,
    overall_residual_risk,
    process_quality,
    rework_factor,
    rpn,
)
from riskbn.riskmodel.template import grid_policy_for
from riskbn.riskmodel.types import BenefitsInfo, ReworkInfo, Scenario
from tests.conftest import scenario_1, scenario_3

SC = SeverityClass


class TestEstimateP1:
    def test_five_in_thousand_flat_prior(self):
        s = estimate_p1(DeviceTestingInfo(5, 1000))
        assert s.median == pytest.approx(beta_dist.ppf(0.5, 6, 996), rel=0.05)

    def test_zero_in_thousand_flat_prior(self):
        s = estimate_p1(DeviceTestingInfo(0, 1000))
        assert s.median == pytest.approx(1 - 0.5 ** (1 / 1001), rel=0.05)

    def test_five_in_seven_hundred_flat_prior(self):
        s = estimate_p1(DeviceTestingInfo(5, 700))
        assert s.median == pytest.approx(beta_dist.ppf(0.5, 6, 696), rel=0.05)

    def test_quality_prior_shifts_posterior_down(self):
        flat = estimate_p1(DeviceTestingInfo(5, 1000))
        informed = estimate_p1(DeviceTestingInfo(5, 1000), quality=0.85)
        assert informed.median < flat.median


class TestProcessQuality:
    def test_all_best_evidence(self):
        info = ManufacturerInfo(
            reputation="very_high",
            customer_satisfaction="very_high",
            product_defects=False,
            process_additives=False,
            process_drifts=False,
        )
        assert process_quality(info).mean >= 0.85

    def test_no_evidence_symmetric(self):
        assert process_quality(None).mean == pytest.approx(0.5, abs=0.02)

    def test_scenario_one_manufacturer(self):
        info = ManufacturerInfo(
            reputation="very_high",
            customer_satisfaction="high",
            product_defects=False,
            process_additives=False,
            process_drifts=False,
        )
        assert process_quality(info).mean > 0.8


class TestBlendP1:
    def test_weight_one_is_identity(self):
        s = estimate_p1(DeviceTestingInfo(5, 700))
        assert blend_p1(s, s, 1.0) is s

    def test_point_mass_arithmetic(self):
        from riskbn.inference.summary import PosteriorSummary

        edges = np.linspace(0, 1, 129)

        def point(node, v):
            masses = np.zeros(128)
            idx = int(np.searchsorted(edges, v, side="right") - 1)
            masses[idx] = 1.0
            reps = 0.5 * (edges[:-1] + edges[1:])
            reps[idx] = v
            return PosteriorSummary.from_bins(node, edges, masses, reps)

        blended = blend_p1(point("a", 8.1e-3), point("b", 4.53e-3), 0.6)
        expected = 0.6 * 8.1e-3 + 0.4 * 4.53e-3
        assert blended.mean == pytest.approx(expected, abs=1e-12)
        assert blended.median == pytest.approx(expected, abs=1e-12)

    def test_blended_median_near_scenario_two_value(self):
        p1_test = estimate_p1(DeviceTestingInfo(5, 700))
        p1_field = estimate_p1(DeviceTestingInfo(15, 3310))
        blended = blend_p1(p1_test, p1_field, 0.6)
        assert 6.7e-3 / 1.5 <= blended.median <= 6.7e-3 * 1.5

    def test_weight_out_of_range(self):
        s = estimate_p1(DeviceTestingInfo(5, 700))
        with pytest.raises(WeightOutOfRangeError):
            blend_p1(s, s, 1.2)


class TestEstimateP2:
    def test_three_fatal_of_fifteen(self):
        field = FieldInfo(3310, 15, {SC.FATAL: 3})
        s = estimate_p2(field, SC.FATAL)
        assert s.median == pytest.approx(beta_dist.ppf(0.5, 4, 13), rel=0.05)

    def test_zero_critical_of_fifteen(self):
        field = FieldInfo(3310, 15, {})
        s = estimate_p2(field, SC.CRITICAL)
        assert s.median == pytest.approx(beta_dist.ppf(0.5, 1, 16), rel=0.05)

    def test_ten_major_of_fifteen(self):
        field = FieldInfo(3310, 15, {SC.MAJOR: 10})
        s = estimate_p2(field, SC.MAJOR)
        assert s.median == pytest.approx(beta_dist.ppf(0.5, 11, 6), rel=0.05)

    def test_no_occurrences(self):
        with pytest.raises(NoOccurrencesError):
            estimate_p2(FieldInfo(100, 0, {}), SC.FATAL)


class TestInjuryRisk:
    def test_product_of_posteriors(self):
        p1 = estimate_p1(DeviceTestingInfo(5, 1000))
        p2 = estimate_p2(FieldInfo(3310, 15, {SC.FATAL: 3}), SC.FATAL)
        risk = injury_risk(p1, p2)
        assert risk.median == pytest.approx(p1.median * p2.median, rel=0.25)
        assert 1.1e-3 / 1.5 <= risk.median <= 1.1e-3 * 1.5

    def test_zero_annihilates(self):
        from riskbn.inference.summary import PosteriorSummary

        p1 = estimate_p1(DeviceTestingInfo(5, 1000))
        edges = np.linspace(0, 1, 129)
        masses = np.zeros(128)
        masses[0] = 1.0
        reps = 0.5 * (edges[:-1] + edges[1:])
        reps[0] = 0.0
        zero = PosteriorSummary.from_bins("p2", edges, masses, reps)
        risk = injury_risk(p1, zero)
        assert risk.mean == pytest.approx(0.0, abs=1e-12)


class TestAcceptability:
    def test_point_mass_fully_acceptable(self):
        from riskbn.inference.summary import PosteriorSummary

        edges = np.linspace(0, 1, 129)
        masses = np.zeros(128)
        masses[0] = 1.0
        reps = 0.5 * (edges[:-1] + edges[1:])
        reps[0] = 1e-6
        s = PosteriorSummary.from_bins("risk", edges, masses, reps)
        result = acceptability(s, 6.2e-5)
        assert result.fraction == pytest.approx(1.0)
        assert result.median_flag


class TestOverallResidualRisk:
    def test_all_acceptable(self):
        s = overall_residual_risk([1.0, 1.0, 1.0, 1.0, 1.0])
        assert s.mean == pytest.approx(1.0, abs=0.03)

    def test_lifepak_pattern(self):
        s = overall_residual_risk([0.0, 0.999, 1.0, 1.0, 1.0])
        assert s.mean == pytest.approx(0.50, abs=0.01)

    def test_scenario_four_pattern(self):
        s = overall_residual_risk([0.47, 0.63, 0.72, 1.0, 1.0])
        assert s.mean == pytest.approx(0.619, abs=0.01)


class TestControlsRequired:
    def test_sixty_two_percent(self):
        result = controls_required(0.62)
        assert result.fraction == pytest.approx(0.38)
        assert result.flag

    def test_fully_acceptable(self):
        result = controls_required(1.0)
        assert result.fraction == pytest.approx(0.0)
        assert not result.flag

    def test_fifty_percent(self):
        result = controls_required(0.50)
        assert result.fraction == pytest.approx(0.50)
        assert result.flag


class TestRework:
    def test_very_high_factor_near_one_fifth(self):
        f = rework_factor(ReworkInfo("very_high", "very_high"))
        assert f == pytest.approx(0.2, abs=0.01)

    def test_absent_is_identity(self):
        assert rework_factor(None) == 1.0


class TestBenefitRisk:
    BENEFITS = BenefitsInfo("very_high", "high", "very_high")

    def test_table3_pair(self):
        assert benefit_risk(0.142, self.BENEFITS) == pytest.approx(0.666, abs=0.03)

    def test_table8_pair(self):
        assert benefit_risk(0.50, self.BENEFITS) == pytest.approx(0.80, abs=0.03)

    def test_equal_inputs_pass_through(self):
        # with benefit score b and orr both x, the weighted mean returns x
        b = benefit_score(self.BENEFITS)
        assert benefit_risk(b, self.BENEFITS) == pytest.approx(b)


class TestCombineHazards:
    def _rows(self):
        table9 = {
            "Hazard 1": ([0.89, 0.60, 0.80, 0.25, 0.30], 0.67, 0.85),
            "Hazard 2": ([0.50, 0.75, 1.00, 0.99, 0.75], 0.75, 0.90),
        }
        rows = []
        for name, (accs, orr, br) in table9.items():
            rows.append(
                HazardRow(
                    name=name,
                    acceptability=dict(zip(SC.ordered(), accs)),
                    orr=orr,
                    benefit_risk=br,
                )
            )
        return rows

    def test_fatal_column(self):
        combined = combine_hazards(self._rows())
        assert combined.acceptability[SC.FATAL] == pytest.approx(0.695)

    def test_orr_column(self):
        combined = combine_hazards(self._rows())
        assert combined.orr == pytest.approx(0.71)

    def test_single_row_identity(self):
        row = self._rows()[0]
        combined = combine_hazards([row])
        assert combined.acceptability == row.acceptability
        assert combined.orr == row.orr

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            combine_hazards([])

    def test_permutation_invariant(self):
        rows = self._rows()
        a = combine_hazards(rows)
        b = combine_hazards(rows[::-1])
        assert a.acceptability == b.acceptability and a.orr == b.orr

    def test_idempotent_on_identical_rows(self):
        row = self._rows()[0]
        combined = combine_hazards([row, row, row])
        for sev in SC.ordered():
            assert combined.acceptability[sev] == pytest.approx(
                row.acceptability[sev], abs=1e-12
            )
        assert combined.orr == pytest.approx(row.orr, abs=1e-12)


class TestRpn:
    def test_unit(self):
        assert rpn(1, 1, 1) == 1

    def test_boundary(self):
        assert rpn(5, 5, 5) == 125

    def test_product(self):
        assert rpn(2, 3, 4) == 24

    def test_symmetric(self):
        assert rpn(2, 3, 4) == rpn(4, 2, 3) == rpn(3, 4, 2)

    def test_out_of_range(self):
        with pytest.raises(RankOutOfRangeError):
            rpn(0, 3, 4)
        with pytest.raises(RankOutOfRangeError):
            rpn(2, 6, 4)


class TestBuildTemplate:
    def test_scenario_one_validates_with_five_acceptability_nodes(self):
        net = build_template(scenario_1())
        assert net.validate().ok
        acc_nodes = [n for n in net.node_ids if n.startswith("acceptability_")]
        assert len(acc_nodes) == 5

    def test_missing_criteria(self):
        from dataclasses import replace

        scenario = scenario_1()
        object.__delattr__  # silence linters; construct invalid via __new__
        bad = object.__new__(Scenario)
        for field_name, value in vars(scenario).items():
            object.__setattr__(bad, field_name, value)
        object.__setattr__(bad, "criteria", None)
        with pytest.raises(MissingCriteriaError):
            build_template(bad)

    def test_band_only_scenario_gets_uniform_band_prior(self):
        net = build_template(scenario_3())
        from riskbn.nptlang import expr_to_text

        text = expr_to_text(net.npts["p1_test"])
        assert text.startswith("Uniform(")
        assert "0.0001" in text and "0.001" in text


class TestFragments:
    def test_process_fragment_lowers_prior_mean(self):
        scenario = scenario_1()
        frag = FragmentSpec(
            name="software",
            kind="process",
            parents={"team_experience": "very_high", "process_maturity": "very_high"},
        )
        base_net = build_template(scenario)
        with_frag = attach_fragment(base_net, frag)
        from riskbn.nptlang import expr_to_text

        def prior_mean(net):
            text = expr_to_text(net.npts["p1_test"])
            alpha, beta = text[len("Beta("):-1].split(",")
            return float(alpha) / (float(alpha) + float(beta))

        assert prior_mean(with_frag) < prior_mean(base_net)

    def test_name_collision(self):
        scenario = scenario_1()
        net = build_template(scenario)
        frag = FragmentSpec(name="p1", kind="process", parents={"test": "high"})
        with pytest.raises(NameCollisionError):
            attach_fragment(net, frag)

    def test_device_use_fragment_raises_individual_median(self):
        scenario = scenario_1()
        net = build_template(scenario)
        frag = FragmentSpec(
            name="usage", kind="device_use", parents={"intensity": "very_high"}
        )
        merged = attach_fragment(net, frag)
        assert merged.validate().ok
        evidence = build_evidence(scenario)
        evidence["usage_intensity"] = __import__(
            "riskbn.inference", fromlist=["StateObservation"]
        ).StateObservation("very_high")
        cnet = compile_network(merged, grid_policy_for(scenario))
        population = posterior(cnet, evidence, "p1_field")
        individual = posterior(cnet, evidence, "p1_field_individual")
        assert individual.median >= population.median

    def test_device_use_requires_field_route(self):
        from dataclasses import replace

        scenario = replace(scenario_1(), field_data=None, blend_weight=1.0)
        net = build_template(scenario)
        frag = FragmentSpec(
            name="usage", kind="device_use", parents={"intensity": "high"}
        )
        with pytest.raises(InvalidAttachmentPointError):
            attach_fragment(net, frag)
