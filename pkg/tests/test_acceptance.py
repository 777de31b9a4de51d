"""Acceptance suite: one test per release criterion, at the stated
tolerances.  Run with ``pytest tests/test_acceptance.py -v -s`` to see
one PASS line per criterion."""

import json
import subprocess
import sys
import time
from dataclasses import replace

import numpy as np
import pytest

from riskbn.inference import (
    CountObservation,
    GridPolicy,
    StateObservation,
    compile_network,
    discretize_to_network,
    enumerate_exact,
    posterior,
    sample,
)
from riskbn.riskmodel import (
    ReworkInfo,
    SeverityClass,
    TestingInfo as DeviceTestingInfo,
    assess_scenario,
    benefit_risk,
    combine_hazards,
    estimate_p1,
)
from riskbn.riskmodel.template import build_evidence, build_template, grid_policy_for
from riskbn.riskmodel.types import HazardRow
from riskbn.scenario.render import pct_combined_br, pct_int
from tests.conftest import (
    SCENARIO_DIR,
    make_fig3_network,
    scenario_1,
    scenario_2,
    scenario_3,
)
from tests.test_inference import beta_binomial_net, two_node_chain

SC = SeverityClass


def _report(label: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"{status}: {label}" + (f" ({detail})" if detail else ""))
    assert ok, f"{label}: {detail}"


def _within_factor(value: float, target: float, factor: float) -> bool:
    return target / factor <= value <= target * factor


@pytest.fixture(scope="module")
def report_s1_rework(report_s1):
    return assess_scenario(replace(scenario_1(), rework=ReworkInfo("very_high", "very_high")))


def test_criterion_fig3_means(fig3):
    start = time.time()
    cnet = compile_network(fig3, GridPolicy(default_bins=128))
    surface = posterior(cnet, {}, "surface_hot").mean
    burnt = posterior(cnet, {}, "patient_burnt").mean
    elapsed = time.time() - start
    ok = (
        abs(surface - 0.004) <= 0.10 * 0.004
        and abs(burnt - 0.0016) <= 0.15 * 0.0016
        and elapsed < 1.0
    )
    _report(
        "Fig-3 example: risk means 0.004 (±10%) and 0.0016 (±15%) at 128 bins, < 1 s",
        ok,
        f"surface {surface:.5f}, burnt {burnt:.5f}, {elapsed:.2f}s",
    )


def test_criterion_oracle_equivalence(fig3):
    failures = []

    def check_mean(net, evidence, target, cnet, n=1_000_000, seed=29):
        engine = posterior(cnet, evidence, target)
        oracle = sample(net, evidence, target, n, seed=seed)
        samples, weights = oracle._samples, oracle._weights
        var = float(np.sum(weights * (samples - oracle.mean) ** 2))
        se3 = 3.0 * np.sqrt(var / max(oracle.ess or n, 1.0))
        tolerance = max(se3, 0.02 * abs(engine.mean))
        if abs(engine.mean - oracle.mean) > tolerance:
            failures.append(
                f"{target}: engine {engine.mean:.4e} vs oracle {oracle.mean:.4e}"
            )

    cnet_fig3 = compile_network(fig3, GridPolicy(default_bins=128))
    check_mean(fig3, {}, "surface_hot", cnet_fig3)
    check_mean(fig3, {}, "patient_burnt", cnet_fig3)

    bb = beta_binomial_net(1000)
    from riskbn.inference import GridSpec

    cnet_bb = compile_network(
        bb, GridPolicy(overrides={"p": GridSpec(bins=128, scheme="probability")})
    )
    check_mean(bb, {"count": CountObservation(5)}, "p", cnet_bb)

    # testing-only scenario network, checked through the full ORR pipeline
    lite = replace(scenario_1(), field_data=None)
    net = build_template(lite)
    evidence = build_evidence(lite)
    cnet = compile_network(net, grid_policy_for(lite))
    check_mean(net, evidence, "orr", cnet, n=1_000_000, seed=31)
    check_mean(net, evidence, "p1", cnet, n=1_000_000, seed=37)

    # discrete-only exactness against full enumeration
    chain = two_node_chain()
    cnet_chain = compile_network(chain)
    exact_fail = []
    for evidence, target in (
        ({}, "b"),
        ({"b": StateObservation("True")}, "a"),
    ):
        s1 = posterior(cnet_chain, evidence, target)
        s2 = enumerate_exact(chain, evidence, target)
        if not np.allclose(s1.probs, s2.probs, atol=1e-9):
            exact_fail.append(target)
    fig3_2bin = compile_network(fig3, GridPolicy(default_bins=2))
    discrete_twin = discretize_to_network(fig3_2bin)
    s1 = posterior(fig3_2bin, {}, "surface_hot")
    s2 = enumerate_exact(discrete_twin, {}, "surface_hot")
    if not np.allclose(s1.masses, s2.probs, atol=1e-9):
        exact_fail.append("surface_hot-2bin")

    ok = not failures and not exact_fail
    _report(
        "Oracle equivalence: engine vs 1e6-sample likelihood weighting within "
        "max(3 SE, 2%); discrete nets exact to 1e-9",
        ok,
        "; ".join(failures + exact_fail) or "all targets agree",
    )


def test_criterion_scenario1(report_s1):
    published_medians = {
        SC.FATAL: 1.1e-3,
        SC.CRITICAL: 2.07e-4,
        SC.MAJOR: 3.25e-3,
        SC.MINOR: 2.07e-4,
        SC.NEGLIGIBLE: 8.0e-4,
    }
    problems = []
    for sev, target in published_medians.items():
        value = report_s1.severities[sev].risk_median
        if not _within_factor(value, target, 1.5):
            problems.append(f"{sev.value} median {value:.3e} vs {target:.2e}")
    for sev in (SC.FATAL, SC.MAJOR):
        if report_s1.severities[sev].acceptability_fraction >= 0.05:
            problems.append(f"{sev.value} acceptability >= 5%")
    for sev in (SC.MINOR, SC.NEGLIGIBLE):
        if abs(report_s1.severities[sev].acceptability_fraction - 1.0) > 0.005:
            problems.append(f"{sev.value} acceptability not 100% +- 0.5")
    orr_ok = (
        abs(report_s1.orr_acceptability - 0.142) <= 0.10
        or abs(report_s1.orr_median - 0.142) <= 0.10
    )
    if not orr_ok:
        problems.append(
            f"ORR mean {report_s1.orr_acceptability:.3f} / median "
            f"{report_s1.orr_median:.3f} vs 0.142"
        )
    _report(
        "Scenario 1 (Table 3): medians within factor 1.5, acceptability bands, "
        "ORR within ±10 points of 14.2%",
        not problems,
        "; ".join(problems) or "all within tolerance",
    )


def test_criterion_scenario1_rework(report_s1, report_s1_rework):
    problems = []
    for sev in SC.ordered():
        pre = report_s1.severities[sev].risk_median
        post = report_s1_rework.severities[sev].risk_median
        ratio = post / pre
        if abs(ratio / 0.2 - 1.0) > 0.10:
            problems.append(f"{sev.value} ratio {ratio:.3f}")
    fatal = report_s1_rework.severities[SC.FATAL].risk_median
    if not _within_factor(fatal, 2.2e-4, 1.5):
        problems.append(f"fatal median {fatal:.3e} vs 2.2e-4")
    _report(
        "Scenario 1 + rework (Table 4): every post-rework median ≈ 0.2× pre "
        "(±10%), fatal within factor 1.5 of 2.2E-4",
        not problems,
        "; ".join(problems) or "all within tolerance",
    )


def test_criterion_scenario2():
    report = assess_scenario(scenario_2())
    fatal = report.severities[SC.FATAL].risk_median
    ok = _within_factor(fatal, 1.4e-3, 1.5)
    _report(
        "Scenario 2 (Table 5): fatal median within factor 1.5 of 1.4E-3 "
        "under the 0.60/0.40 blend",
        ok,
        f"fatal median {fatal:.3e}",
    )


def test_criterion_scenario3():
    report = assess_scenario(scenario_3())
    fatal = report.severities[SC.FATAL].risk_median
    ok = _within_factor(fatal, 4.8e-4, 1.5)
    _report(
        "Scenario 3 (Table 6): fatal median within factor 1.5 of 4.8E-4 "
        "under the probable band prior",
        ok,
        f"fatal median {fatal:.3e}",
    )


def test_criterion_scenario4(report_s4):
    problems = []
    if abs(report_s4.orr_acceptability - 0.62) > 0.05:
        problems.append(f"ORR mean {report_s4.orr_acceptability:.3f} vs 0.62")
    if abs(report_s4.controls_required_fraction - 0.38) > 0.05:
        problems.append(
            f"controls {report_s4.controls_required_fraction:.3f} vs 0.38"
        )
    negligible = report_s4.severities[SC.NEGLIGIBLE].risk_median
    if not _within_factor(negligible, 4.3e-3, 1.5):
        problems.append(f"negligible median {negligible:.3e} vs 4.3e-3")
    _report(
        "Scenario 4 (Table 7): ORR mean 62% ±5, controls 38% ±5, negligible "
        "median within factor 1.5 of 4.3E-3",
        not problems,
        "; ".join(problems) or "all within tolerance",
    )


def test_criterion_lifepak(report_lifepak):
    problems = []
    fatal_acc = report_lifepak.severities[SC.FATAL].acceptability_fraction
    critical_acc = report_lifepak.severities[SC.CRITICAL].acceptability_fraction
    if fatal_acc >= 0.01:
        problems.append(f"fatal acceptability {fatal_acc:.4f} >= 1%")
    if critical_acc < 0.99:
        problems.append(f"critical acceptability {critical_acc:.4f} < 99%")
    if abs(report_lifepak.orr_acceptability - 0.50) > 0.05:
        problems.append(f"ORR {report_lifepak.orr_acceptability:.3f} vs 0.50")
    if not report_lifepak.controls_required_flag:
        problems.append("controls-required flag not set")
    _report(
        "LIFEPAK validation (Table 8): fatal < 1% acceptable, critical ≥ 99%, "
        "ORR 50% ±5, controls flag set (supports the recall decision)",
        not problems,
        "; ".join(problems) or "model supports the recall",
    )


def test_criterion_table9_combination():
    rows = [
        HazardRow("Hazard 1", dict(zip(SC.ordered(), [0.89, 0.60, 0.80, 0.25, 0.30])), 0.67, 0.85),
        HazardRow("Hazard 2", dict(zip(SC.ordered(), [0.50, 0.75, 1.00, 0.99, 0.75])), 0.75, 0.90),
    ]
    combined = combine_hazards(rows)
    rendered = {
        "fatal": pct_int(combined.acceptability[SC.FATAL]),
        "critical": pct_int(combined.acceptability[SC.CRITICAL]),
        "major": pct_int(combined.acceptability[SC.MAJOR]),
        "minor": pct_int(combined.acceptability[SC.MINOR]),
        "negligible": pct_int(combined.acceptability[SC.NEGLIGIBLE]),
        "orr": pct_int(combined.orr),
        "benefit_risk": pct_combined_br(combined.benefit_risk),
    }
    expected = {
        "fatal": "70%",
        "critical": "68%",
        "major": "90%",
        "minor": "62%",
        "negligible": "53%",
        "orr": "71%",
        "benefit_risk": "87.5%",
    }
    ok = rendered == expected
    _report(
        "Table 9 combination: all seven combined cells exact "
        "(round half up; benefit-risk keeps one decimal)",
        ok,
        json.dumps(rendered),
    )


def test_criterion_benefit_risk_calibration():
    pairs = [
        (0.142, 0.666),
        (0.287, 0.723),
        (0.128, 0.660),
        (0.196, 0.687),
        (0.620, 0.850),
        (0.500, 0.810),
    ]
    benefits = scenario_1().benefits
    worst = 0.0
    for orr, expected in pairs:
        predicted = benefit_risk(orr, benefits)
        worst = max(worst, abs(predicted - expected))
    _report(
        "Benefit-risk calibration: all six table pairs reproduced within "
        "±3 percentage points",
        worst <= 0.03,
        f"worst residual {100 * worst:.2f} points",
    )


def test_criterion_property_suites(report_s1, report_s4, report_s1_rework):
    problems = []

    # monotonicity: hazard counts up => P1 median up
    medians = [estimate_p1(DeviceTestingInfo(k, 1000)).median for k in (2, 6, 18)]
    if not all(b > a for a, b in zip(medians, medians[1:])):
        problems.append("P1 monotonicity")

    # rework dominance
    for sev in SC.ordered():
        if (
            report_s1_rework.severities[sev].risk_median
            > report_s1.severities[sev].risk_median * (1 + 1e-9)
        ):
            problems.append(f"rework dominance ({sev.value})")

    # normalization of posteriors across node kinds
    fig3 = make_fig3_network()
    cnet = compile_network(fig3, GridPolicy(default_bins=64))
    for node in fig3.node_ids:
        summary = posterior(cnet, {}, node)
        if abs(summary.total_mass - 1.0) > 1e-6:
            problems.append(f"normalization ({node})")

    # grid convergence: Cauchy sequence of posterior means
    bb = beta_binomial_net(100)
    means = []
    for bins in (32, 64, 128):
        c = compile_network(bb, GridPolicy(default_bins=bins))
        means.append(posterior(c, {"count": CountObservation(7)}, "p").mean)
    d1 = abs(means[1] - means[0]) / abs(means[1])
    d2 = abs(means[2] - means[1]) / abs(means[2])
    if not d2 <= d1 / 2 + 1e-9:
        problems.append("grid convergence")

    # CLI determinism: identical input bytes => identical output bytes
    cmd = [
        sys.executable,
        "-m",
        "riskbn.scenario.cli",
        "assess",
        "--scenario",
        str(SCENARIO_DIR / "s4.mdra"),
        "--format",
        "machine",
    ]
    out1 = subprocess.run(cmd, capture_output=True, check=True).stdout
    out2 = subprocess.run(cmd, capture_output=True, check=True).stdout
    if out1 != out2:
        problems.append("CLI determinism")

    # service output equals CLI machine bytes
    from fastapi.testclient import TestClient

    from riskbn.service.app import create_app

    client = TestClient(create_app())
    s4_text = (SCENARIO_DIR / "s4.mdra").read_text()
    session = client.post("/v1/sessions", json={"scenario": s4_text}).json()["id"]
    service_bytes = client.get(f"/v1/sessions/{session}/report").content
    if service_bytes != out1:
        problems.append("service/CLI byte equality")

    _report(
        "Property suites: monotonicity, rework dominance, normalization, "
        "grid-convergence Cauchy, CLI determinism, service/CLI byte equality",
        not problems,
        "; ".join(problems) or "all properties hold",
    )
