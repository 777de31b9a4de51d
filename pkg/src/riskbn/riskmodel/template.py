"""Instantiation of the device risk network for a scenario.

The concrete template:

* hazard probability per demand estimated from product testing counts
  (Binomial evidence on a Beta prior set by manufacturing process
  quality), from a generic occurrence band (uniform prior over the
  band), and/or from field hazard counts; blended by a convex weight
  when both routes are present;
* per-severity injury probabilities from field injury counts (Binomial
  evidence, flat priors);
* per-severity injury risk as the product of the two probabilities;
* acceptability comparisons against the criteria, translated through
  hidden 0/1 score nodes into the overall-residual-risk weighted mean
  (weights 10/4/3/2/1, variance 0.001);
* optional benefits subnetwork feeding a benefit-risk node.

Rework, when present, multiplies the hazard probability by the
reduction factor derived from rework quality/effort.
"""

from __future__ import annotations

import numpy as np

from riskbn.bn import Continuous, FIVE_POINT, Labelled, Network, Ranked
from riskbn.errors import MissingCriteriaError, NoHazardEvidenceError
from riskbn.inference.evidence import CountObservation, StateObservation
from riskbn.inference.grids import GridPolicy, GridSpec
from riskbn.nptlang import parse
from riskbn.riskmodel.scores import (
    p1_prior_params,
    process_quality,
    rework_factor,
)
from riskbn.riskmodel.types import (
    GENERIC_BANDS,
    ORR_WEIGHTS,
    Scenario,
    SeverityClass,
)

ACCEPT = "Acceptable"
REJECT = "Not Acceptable"

PROB_BINS = 128
RISK_BINS = 240  # risk medians interpolate on this grid; finer for accuracy
SCORE_BINS = 128
ORR_VARIANCE = 0.001
BENEFIT_WEIGHT = 1.6
ORR_WEIGHT_IN_BR = 1.0

#: Multiplier shape for the device-use fragment: neutral at score 0.5,
#: monotone increasing in usage intensity.
DEVICE_USE_MODIFIER = "(0.2 + 1.6 * {score})"


def _num(x: float) -> str:
    return repr(float(x))


def quality_mean_for(scenario: Scenario) -> float | None:
    """Combined process-quality score driving the hazard-probability prior."""
    from riskbn.riskmodel.scores import SCORE_VARIANCE, ranked_midpoint
    from riskbn.nptlang.dists import tnormal_mean

    sources: list[float] = []
    if scenario.manufacturer is not None and not scenario.manufacturer.empty:
        sources.append(process_quality(scenario.manufacturer).mean)
    for frag in scenario.fragments:
        if frag.kind == "process":
            mids = [ranked_midpoint(lbl) for lbl in frag.parents.values()]
            sources.append(
                tnormal_mean(float(np.mean(mids)), SCORE_VARIANCE, 0.0, 1.0)
            )
    if not sources:
        return None
    return float(np.mean(sources))


def build_template(scenario: Scenario) -> Network:
    """The scenario's risk network; see the module docstring for shape."""
    if scenario.criteria is None:
        raise MissingCriteriaError("scenario has no acceptability criteria")
    if (
        scenario.testing is None
        and scenario.field_data is None
        and scenario.generic_band is None
    ):
        raise NoHazardEvidenceError(
            "scenario provides no testing, field, or generic-band evidence"
        )

    net = Network()
    f = rework_factor(scenario.rework)

    # --- hazard probability (P1) routes -------------------------------------
    test_side = scenario.testing is not None or scenario.generic_band is not None
    field_side = scenario.field_data is not None

    if test_side:
        net.add_node("p1_test", Continuous(0.0, 1.0))
        if scenario.generic_band is not None:
            lo, hi = GENERIC_BANDS[scenario.generic_band]
            lo = max(lo, 1e-12)
            net.set_npt("p1_test", parse(f"Uniform({_num(lo)}, {_num(hi)})"))
        else:
            alpha, beta = p1_prior_params(quality_mean_for(scenario))
            net.set_npt("p1_test", parse(f"Beta({_num(alpha)}, {_num(beta)})"))
        if scenario.testing is not None:
            n = scenario.testing.demands
            net.add_node("test_count", Continuous(0.0, float(n)))
            net.add_edge("p1_test", "test_count")
            net.set_npt("test_count", parse(f"Binomial({n}, p1_test)"))

    if field_side:
        net.add_node("p1_field", Continuous(0.0, 1.0))
        net.set_npt("p1_field", parse("Beta(1, 1)"))
        n = scenario.field_data.demands
        net.add_node("field_count", Continuous(0.0, float(n)))
        net.add_edge("p1_field", "field_count")
        net.set_npt("field_count", parse(f"Binomial({n}, p1_field)"))

    field_p1_ref = "p1_field"
    for frag in scenario.fragments:
        if frag.kind == "device_use":
            if not field_side:
                from riskbn.errors import InvalidAttachmentPointError

                raise InvalidAttachmentPointError(
                    "device-use fragments revise field-estimated hazard "
                    "probability; the scenario has no field data"
                )
            score = _merge_fragment_nodes(net, frag)
            net.add_node("p1_field_individual", Continuous(0.0, 1.0))
            net.add_edge("p1_field", "p1_field_individual")
            net.add_edge(score, "p1_field_individual")
            modifier = DEVICE_USE_MODIFIER.format(score=score)
            net.set_npt(
                "p1_field_individual", parse(f"p1_field * {modifier}")
            )
            field_p1_ref = "p1_field_individual"
        elif frag.kind == "process":
            _merge_fragment_nodes(net, frag)  # prior handled in quality_mean_for

    net.add_node("p1", Continuous(0.0, 1.0))
    if test_side and field_side:
        w = scenario.blend_weight
        net.add_edge("p1_test", "p1")
        net.add_edge(field_p1_ref, "p1")
        net.set_npt(
            "p1",
            parse(f"{_num(w)} * p1_test + {_num(1.0 - w)} * {field_p1_ref}"),
        )
    elif test_side:
        net.add_edge("p1_test", "p1")
        net.set_npt("p1", parse("p1_test"))
    else:
        net.add_edge(field_p1_ref, "p1")
        net.set_npt("p1", parse(field_p1_ref))

    p1_eff = "p1"
    if scenario.rework is not None:
        net.add_node("p1_residual", Continuous(0.0, 1.0))
        net.add_edge("p1", "p1_residual")
        net.set_npt("p1_residual", parse(f"{_num(f)} * p1"))
        p1_eff = "p1_residual"

    # --- per-severity injury probability (P2) and risk ------------------------
    occurrences = (
        scenario.field_data.hazard_occurrences if field_side else 0
    )
    for severity in SeverityClass.ordered():
        s = severity.value
        net.add_node(f"p2_{s}", Continuous(0.0, 1.0))
        net.set_npt(f"p2_{s}", parse("Beta(1, 1)"))
        if field_side and occurrences >= 1:
            net.add_node(f"injury_count_{s}", Continuous(0.0, float(occurrences)))
            net.add_edge(f"p2_{s}", f"injury_count_{s}")
            net.set_npt(
                f"injury_count_{s}", parse(f"Binomial({occurrences}, p2_{s})")
            )
        net.add_node(f"risk_{s}", Continuous(0.0, 1.0))
        net.add_edge(p1_eff, f"risk_{s}")
        net.add_edge(f"p2_{s}", f"risk_{s}")
        net.set_npt(f"risk_{s}", parse(f"{p1_eff} * p2_{s}"))

        criterion = scenario.criteria[severity]
        net.add_node(f"acceptability_{s}", Labelled((ACCEPT, REJECT)))
        net.add_edge(f"risk_{s}", f"acceptability_{s}")
        net.set_npt(
            f"acceptability_{s}",
            parse(f'if(risk_{s} <= {_num(criterion)}, "{ACCEPT}", "{REJECT}")'),
        )
        # hidden translation node: discrete acceptability -> [0, 1] score
        net.add_node(f"t_{s}", Continuous(0.0, 1.0))
        net.add_edge(f"acceptability_{s}", f"t_{s}")
        net.set_npt(
            f"t_{s}",
            parse(f'partition(acceptability_{s}){{"{ACCEPT}": 1.0, "{REJECT}": 0.0}}'),
        )

    # --- overall residual risk -------------------------------------------------
    net.add_node("orr", Continuous(0.0, 1.0))
    terms = ", ".join(
        f"{_num(ORR_WEIGHTS[sev])}, t_{sev.value}"
        for sev in SeverityClass.ordered()
    )
    for sev in SeverityClass.ordered():
        net.add_edge(f"t_{sev.value}", "orr")
    net.set_npt(
        "orr", parse(f"TNormal(wmean({terms}), {_num(ORR_VARIANCE)}, 0, 1)")
    )

    # --- benefits and benefit-risk ----------------------------------------------
    if scenario.benefits is not None:
        for parent in ("patient_population", "device_performance", "clinical_outcome"):
            name = f"benefit_{parent}"
            net.add_node(name, Ranked(FIVE_POINT))
            net.set_npt(name, parse("Uniform(0, 1)"))
        net.add_node("benefit_score", Continuous(0.0, 1.0))
        for parent in ("patient_population", "device_performance", "clinical_outcome"):
            net.add_edge(f"benefit_{parent}", "benefit_score")
        net.set_npt(
            "benefit_score",
            parse(
                "TNormal(wmean(1, benefit_patient_population, "
                "1, benefit_device_performance, 1, benefit_clinical_outcome), "
                "0.01, 0, 1)"
            ),
        )
        net.add_node("benefit_ok", Labelled(("Adequate", "Inadequate")))
        net.add_edge("benefit_score", "benefit_ok")
        net.set_npt(
            "benefit_ok",
            parse('if(benefit_score >= 0.5, "Adequate", "Inadequate")'),
        )
        net.add_node("t_benefit", Continuous(0.0, 1.0))
        net.add_edge("benefit_ok", "t_benefit")
        net.set_npt(
            "t_benefit",
            parse('partition(benefit_ok){"Adequate": 1.0, "Inadequate": 0.0}'),
        )
        net.add_node("benefit_risk", Continuous(0.0, 1.0))
        net.add_edge("t_benefit", "benefit_risk")
        net.add_edge("orr", "benefit_risk")
        net.set_npt(
            "benefit_risk",
            parse(
                f"TNormal(wmean({_num(BENEFIT_WEIGHT)}, t_benefit, "
                f"{_num(ORR_WEIGHT_IN_BR)}, orr), {_num(ORR_VARIANCE)}, 0, 1)"
            ),
        )

    return net


def _merge_fragment_nodes(net: Network, frag) -> str:
    """Add a fragment's ranked parents and score node; returns the score id."""
    from riskbn.errors import NameCollisionError

    score = f"{frag.name}_score"
    parent_ids = [f"{frag.name}_{p}" for p in frag.parents]
    for node_id in parent_ids + [score]:
        if node_id in net.kinds:
            raise NameCollisionError(
                f"fragment node {node_id!r} collides with an existing node"
            )
    for node_id in parent_ids:
        net.add_node(node_id, Ranked(FIVE_POINT))
        net.set_npt(node_id, parse("Uniform(0, 1)"))
    net.add_node(score, Continuous(0.0, 1.0))
    terms = ", ".join(f"1, {pid}" for pid in parent_ids)
    for pid in parent_ids:
        net.add_edge(pid, score)
    net.set_npt(score, parse(f"TNormal(wmean({terms}), 0.01, 0, 1)"))
    return score


def build_evidence(scenario: Scenario) -> dict:
    """Observation map matching :func:`build_template`'s node names."""
    evidence: dict = {}
    if scenario.testing is not None:
        evidence["test_count"] = CountObservation(scenario.testing.hazards_observed)
    if scenario.field_data is not None:
        evidence["field_count"] = CountObservation(
            scenario.field_data.hazard_occurrences
        )
        if scenario.field_data.hazard_occurrences >= 1:
            for severity in SeverityClass.ordered():
                evidence[f"injury_count_{severity.value}"] = CountObservation(
                    scenario.field_data.injury_count(severity)
                )
    if scenario.benefits is not None:
        evidence["benefit_patient_population"] = StateObservation(
            scenario.benefits.patient_population
        )
        evidence["benefit_device_performance"] = StateObservation(
            scenario.benefits.device_performance
        )
        evidence["benefit_clinical_outcome"] = StateObservation(
            scenario.benefits.clinical_outcome
        )
    for frag in scenario.fragments:
        for parent, label in frag.parents.items():
            evidence[f"{frag.name}_{parent}"] = StateObservation(label)
    return evidence


def grid_policy_for(scenario: Scenario) -> GridPolicy:
    """Grid policy suited to small probabilities and score nodes."""
    overrides: dict[str, GridSpec] = {}
    prob = GridSpec(bins=PROB_BINS, scheme="probability")
    for name in ("p1_test", "p1_field", "p1", "p1_residual", "p1_field_individual"):
        overrides[name] = prob
    for severity in SeverityClass.ordered():
        s = severity.value
        overrides[f"p2_{s}"] = prob
        overrides[f"risk_{s}"] = GridSpec(
            bins=RISK_BINS,
            scheme="probability",
            hi_bins=12,
            extra_edges=(scenario.criteria[severity],),
        )
        overrides[f"t_{s}"] = GridSpec(bins=2)
    overrides["orr"] = GridSpec(bins=SCORE_BINS)
    overrides["benefit_score"] = GridSpec(bins=SCORE_BINS, extra_edges=(0.5,))
    overrides["t_benefit"] = GridSpec(bins=2)
    overrides["benefit_risk"] = GridSpec(bins=SCORE_BINS)
    for frag in scenario.fragments:
        overrides[f"{frag.name}_score"] = GridSpec(bins=SCORE_BINS, extra_edges=(0.5,))
    return GridPolicy(default_bins=PROB_BINS, overrides=overrides)
