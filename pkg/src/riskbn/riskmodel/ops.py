"""Risk-model operations: estimation, acceptability, ORR, what-if, combination."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from riskbn import __version__
from riskbn.bn import BinnedPrior, Boolean, Continuous, Network, Table
from riskbn.errors import (
    EmptyInputError,
    NoOccurrencesError,
    RankOutOfRangeError,
    WeightOutOfRangeError,
)
from riskbn.inference import (
    CountObservation,
    GridPolicy,
    GridSpec,
    PosteriorSummary,
    compile_network,
    posterior,
)
from riskbn.nptlang import parse
from riskbn.riskmodel.scores import benefit_score, p1_prior_params
from riskbn.riskmodel.template import (
    BENEFIT_WEIGHT,
    ORR_WEIGHT_IN_BR,
    PROB_BINS,
    build_evidence,
    build_template,
    grid_policy_for,
)
from riskbn.riskmodel.types import (
    FieldInfo,
    HazardRow,
    HazardTable,
    ORR_WEIGHTS,
    RiskReport,
    Scenario,
    SeverityClass,
    SeverityResult,
    TestingInfo,
)

CONTROLS_CRITERION = 0.10

_PROB_GRID = GridSpec(bins=PROB_BINS, scheme="probability")


def _num(x: float) -> str:
    return repr(float(x))


def _prior_npt(summary: PosteriorSummary):
    """Turn a posterior summary into a root NPT (point or binned)."""
    if summary.is_point:
        return parse(_num(summary.point_value))
    return BinnedPrior(
        edges=tuple(float(e) for e in summary.edges),
        masses=tuple(float(m) for m in summary.masses),
        reps=tuple(float(r) for r in summary.reps),
    )


# --- estimation ----------------------------------------------------------------


def estimate_p1(
    testing: TestingInfo, quality: PosteriorSummary | float | None = None
) -> PosteriorSummary:
    """Posterior hazard probability per demand from testing counts.

    The prior follows manufacturing process quality when given (see
    ``p1_prior_params``), otherwise it is flat.
    """
    q = quality.mean if isinstance(quality, PosteriorSummary) else quality
    alpha, beta = p1_prior_params(q)
    net = Network()
    net.add_node("p1_test", Continuous(0.0, 1.0))
    net.set_npt("p1_test", parse(f"Beta({_num(alpha)}, {_num(beta)})"))
    net.add_node("test_count", Continuous(0.0, float(testing.demands)))
    net.add_edge("p1_test", "test_count")
    net.set_npt("test_count", parse(f"Binomial({testing.demands}, p1_test)"))
    cnet = compile_network(
        net, GridPolicy(default_bins=PROB_BINS, overrides={"p1_test": _PROB_GRID})
    )
    return posterior(
        cnet, {"test_count": CountObservation(testing.hazards_observed)}, "p1_test"
    )


def estimate_p2(field: FieldInfo, severity: SeverityClass) -> PosteriorSummary:
    """Posterior probability that an occurred hazard causes this severity."""
    if field.hazard_occurrences < 1:
        raise NoOccurrencesError(
            "injury probabilities need at least one hazard occurrence"
        )
    k = field.injury_count(severity)
    n = field.hazard_occurrences
    net = Network()
    node = f"p2_{severity.value}"
    net.add_node(node, Continuous(0.0, 1.0))
    net.set_npt(node, parse("Beta(1, 1)"))
    net.add_node("injury_count", Continuous(0.0, float(n)))
    net.add_edge(node, "injury_count")
    net.set_npt("injury_count", parse(f"Binomial({n}, {node})"))
    cnet = compile_network(
        net, GridPolicy(default_bins=PROB_BINS, overrides={node: _PROB_GRID})
    )
    return posterior(cnet, {"injury_count": CountObservation(k)}, node)


def blend_p1(
    p1_test: PosteriorSummary, p1_field: PosteriorSummary, w: float
) -> PosteriorSummary:
    """Distribution of w * p1_test + (1 - w) * p1_field.

    Computed inside a network as a deterministic mixture node, not as a
    mixture of densities.
    """
    if not 0.0 <= w <= 1.0:
        raise WeightOutOfRangeError(f"blend weight must lie in [0, 1], got {w!r}")
    if w == 1.0:
        return p1_test
    if w == 0.0:
        return p1_field
    net = Network()
    net.add_node("p1_test", Continuous(0.0, 1.0))
    net.set_npt("p1_test", _prior_npt(p1_test))
    net.add_node("p1_field", Continuous(0.0, 1.0))
    net.set_npt("p1_field", _prior_npt(p1_field))
    net.add_node("p1", Continuous(0.0, 1.0))
    net.add_edge("p1_test", "p1")
    net.add_edge("p1_field", "p1")
    net.set_npt("p1", parse(f"{_num(w)} * p1_test + {_num(1.0 - w)} * p1_field"))
    policy = GridPolicy(
        default_bins=PROB_BINS,
        overrides={n: _PROB_GRID for n in ("p1_test", "p1_field", "p1")},
    )
    return posterior(compile_network(net, policy), {}, "p1")


def injury_risk(p1: PosteriorSummary, p2: PosteriorSummary) -> PosteriorSummary:
    """Posterior of the product node risk = p1 * p2."""
    net = Network()
    net.add_node("p1", Continuous(0.0, 1.0))
    net.set_npt("p1", _prior_npt(p1))
    net.add_node("p2", Continuous(0.0, 1.0))
    net.set_npt("p2", _prior_npt(p2))
    net.add_node("risk", Continuous(0.0, 1.0))
    net.add_edge("p1", "risk")
    net.add_edge("p2", "risk")
    net.set_npt("risk", parse("p1 * p2"))
    policy = GridPolicy(
        default_bins=PROB_BINS,
        overrides={n: _PROB_GRID for n in ("p1", "p2", "risk")},
    )
    return posterior(compile_network(net, policy), {}, "risk")


# --- acceptability and aggregation -----------------------------------------------


@dataclass(frozen=True)
class AcceptabilityResult:
    fraction: float
    median_flag: bool  # True when the risk median itself is acceptable


def acceptability(risk: PosteriorSummary, criterion: float) -> AcceptabilityResult:
    if not 0.0 < criterion < 1.0:
        raise WeightOutOfRangeError(
            f"criterion must lie in (0, 1), got {criterion!r}"
        )
    return AcceptabilityResult(
        fraction=risk.prob_leq(criterion),
        median_flag=bool(risk.median <= criterion),
    )


def overall_residual_risk(acceptabilities) -> PosteriorSummary:
    """ORR posterior given per-severity acceptability fractions.

    The in-network route (shared-evidence correlations included) is what
    ``assess_scenario`` reports; this standalone operation treats the
    per-severity indicators as independent with the given probabilities.
    """
    fractions = {}
    if isinstance(acceptabilities, dict):
        for sev in SeverityClass.ordered():
            fractions[sev] = float(acceptabilities[sev])
    else:
        values = list(acceptabilities)
        if len(values) != 5:
            raise EmptyInputError("need five per-severity fractions")
        for sev, v in zip(SeverityClass.ordered(), values):
            fractions[sev] = float(v)
    for sev, v in fractions.items():
        if not 0.0 <= v <= 1.0:
            raise WeightOutOfRangeError(
                f"{sev.value} acceptability must lie in [0, 1], got {v!r}"
            )

    net = Network()
    for sev in SeverityClass.ordered():
        s = sev.value
        p = fractions[sev]
        net.add_node(f"acceptable_{s}", Boolean())
        net.set_npt(
            f"acceptable_{s}",
            Table.root({"False": 1.0 - p, "True": p}, ("False", "True")),
        )
        net.add_node(f"t_{s}", Continuous(0.0, 1.0))
        net.add_edge(f"acceptable_{s}", f"t_{s}")
        net.set_npt(
            f"t_{s}", parse(f'partition(acceptable_{s}){{"False": 0.0, "True": 1.0}}')
        )
    net.add_node("orr", Continuous(0.0, 1.0))
    terms = ", ".join(
        f"{_num(ORR_WEIGHTS[sev])}, t_{sev.value}" for sev in SeverityClass.ordered()
    )
    for sev in SeverityClass.ordered():
        net.add_edge(f"t_{sev.value}", "orr")
    net.set_npt("orr", parse(f"TNormal(wmean({terms}), 0.001, 0, 1)"))
    policy = GridPolicy(
        default_bins=128,
        overrides={f"t_{sev.value}": GridSpec(bins=2) for sev in SeverityClass.ordered()},
    )
    return posterior(compile_network(net, policy), {}, "orr")


@dataclass(frozen=True)
class ControlsResult:
    fraction: float
    flag: bool


def controls_required(orr) -> ControlsResult:
    """Additional-risk-controls fraction (1 - ORR acceptability), flag at 10%."""
    value = orr.mean if isinstance(orr, PosteriorSummary) else float(orr)
    fraction = 1.0 - value
    return ControlsResult(fraction=fraction, flag=fraction > CONTROLS_CRITERION)


def benefit_risk(orr, benefits) -> float:
    """ORR acceptability revised by device benefits (weighted mean 1.6 : 1)."""
    value = orr.mean if isinstance(orr, PosteriorSummary) else float(orr)
    b = benefit_score(benefits)
    return (BENEFIT_WEIGHT * b + ORR_WEIGHT_IN_BR * value) / (
        BENEFIT_WEIGHT + ORR_WEIGHT_IN_BR
    )


def apply_rework(scenario: Scenario, rework) -> RiskReport:
    """Report with additional risk controls applied (identity when absent)."""
    if rework is None:
        return assess_scenario(scenario)
    return assess_scenario(replace(scenario, rework=rework))


def combine_hazards(rows) -> HazardRow:
    """Column-wise mean of per-hazard acceptability rows."""
    rows = list(rows)
    if not rows:
        raise EmptyInputError("no hazard rows to combine")
    for row in rows:
        for sev in SeverityClass.ordered():
            v = row.acceptability[sev]
            if not 0.0 <= v <= 1.0:
                raise WeightOutOfRangeError(
                    f"acceptability {v!r} outside [0, 1] in row {row.name!r}"
                )
    combined_acc = {
        sev: float(np.mean([row.acceptability[sev] for row in rows]))
        for sev in SeverityClass.ordered()
    }
    orr = float(np.mean([row.orr for row in rows]))
    brs = [row.benefit_risk for row in rows]
    br = float(np.mean(brs)) if all(b is not None for b in brs) else None
    return HazardRow(name="Combined", acceptability=combined_acc, orr=orr, benefit_risk=br)


def hazard_table(named_rows) -> HazardTable:
    rows = tuple(named_rows)
    return HazardTable(rows=rows, combined=combine_hazards(rows))


def rpn(severity: int, occurrence: int, detection: int) -> int:
    """Risk priority number: product of 1-5 FMEA ranks."""
    for name, rank in (
        ("severity", severity),
        ("occurrence", occurrence),
        ("detection", detection),
    ):
        if not isinstance(rank, (int, np.integer)) or not 1 <= rank <= 5:
            raise RankOutOfRangeError(f"{name} rank must be an integer in 1..5")
    return int(severity) * int(occurrence) * int(detection)


# --- full assessment ----------------------------------------------------------------


def assess_scenario(scenario: Scenario, refine_grids: bool = False) -> RiskReport:
    """Assess one hazard end to end and return its risk report.

    With ``refine_grids`` the per-severity risk grids are additionally
    refined under the scenario evidence before summarizing; convergence
    is recorded in the report metadata.
    """
    net = build_template(scenario)
    evidence = build_evidence(scenario)
    policy = grid_policy_for(scenario)
    cnet = compile_network(net, policy)

    refinement_meta = {}
    if refine_grids:
        from riskbn.inference import refine

        targets = [f"risk_{s.value}" for s in SeverityClass.ordered()]
        cnet = refine(cnet, targets, evidence)
        refinement_meta = {
            "refined": True,
            "refinement_converged": cnet.refinement.converged,
            "refinement_rounds": cnet.refinement.rounds,
        }

    severities = {}
    for severity in SeverityClass.ordered():
        s = severity.value
        summary = posterior(cnet, evidence, f"risk_{s}")
        criterion = scenario.criteria[severity]
        severities[severity] = SeverityResult(
            criterion=criterion,
            risk_median=summary.median,
            acceptability_fraction=summary.prob_leq(criterion),
        )

    orr = posterior(cnet, evidence, "orr")
    controls = controls_required(orr.mean)
    br = benefit_risk(orr.mean, scenario.benefits) if scenario.benefits else None

    return RiskReport(
        severities=severities,
        orr_acceptability=orr.mean,
        orr_median=orr.median,
        controls_required_fraction=controls.fraction,
        controls_required_flag=controls.flag,
        benefit_risk_acceptability=br,
        meta={
            "seed": 0,
            "bins": PROB_BINS,
            "engine_version": __version__,
            **refinement_meta,
        },
    )
