"""Medical-device risk assessment model built on the inference engine."""

from riskbn.riskmodel.types import (
    AcceptabilityCriteria,
    BenefitsInfo,
    DeviceInfo,
    FieldInfo,
    FragmentSpec,
    GENERIC_BANDS,
    HazardRow,
    HazardTable,
    ManufacturerInfo,
    ReworkInfo,
    RiskReport,
    Scenario,
    SeverityClass,
    SeverityResult,
    TestingInfo,
)
from riskbn.riskmodel.scores import (
    benefit_score,
    p1_prior_params,
    process_quality,
    rework_factor,
)
from riskbn.riskmodel.template import build_evidence, build_template
from riskbn.riskmodel.ops import (
    acceptability,
    apply_rework,
    assess_scenario,
    benefit_risk,
    blend_p1,
    combine_hazards,
    controls_required,
    estimate_p1,
    estimate_p2,
    injury_risk,
    overall_residual_risk,
    rpn,
)
from riskbn.riskmodel.fragments import attach_fragment

__all__ = [
    "AcceptabilityCriteria",
    "BenefitsInfo",
    "FieldInfo",
    "FragmentSpec",
    "GENERIC_BANDS",
    "HazardRow",
    "HazardTable",
    "ManufacturerInfo",
    "ReworkInfo",
    "RiskReport",
    "Scenario",
    "DeviceInfo",
    "SeverityClass",
    "SeverityResult",
    "TestingInfo",
    "acceptability",
    "apply_rework",
    "assess_scenario",
    "attach_fragment",
    "benefit_risk",
    "benefit_score",
    "blend_p1",
    "build_evidence",
    "build_template",
    "combine_hazards",
    "controls_required",
    "estimate_p1",
    "estimate_p2",
    "injury_risk",
    "overall_residual_risk",
    "p1_prior_params",
    "process_quality",
    "rework_factor",
    "rpn",
]
