"""Shared fixtures: example networks and the defibrillator scenarios."""

from __future__ import annotations

from pathlib import Path

import pytest

from riskbn.bn import Boolean, Continuous, Network, Table
from riskbn.nptlang import parse
from riskbn.riskmodel import (
    AcceptabilityCriteria,
    BenefitsInfo,
    DeviceInfo,
    FieldInfo,
    ManufacturerInfo,
    Scenario,
    SeverityClass,
    TestingInfo,
    assess_scenario,
)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

SC = SeverityClass

CRITERIA = AcceptabilityCriteria(
    {
        SC.FATAL: 6.2e-5,
        SC.CRITICAL: 9.9e-5,
        SC.MAJOR: 2.5e-4,
        SC.MINOR: 7.6e-3,
        SC.NEGLIGIBLE: 1.0e-2,
    }
)

ZIJLSTRA_FIELD = FieldInfo(
    demands=3310,
    hazard_occurrences=15,
    injuries={SC.FATAL: 3, SC.MAJOR: 10, SC.NEGLIGIBLE: 2},
)

MANUFACTURER = ManufacturerInfo(
    reputation="very_high",
    customer_satisfaction="high",
    product_defects=False,
    process_additives=False,
    process_drifts=False,
)

BENEFITS = BenefitsInfo("very_high", "high", "very_high")


def make_fig3_network() -> Network:
    """The hot-surface defibrillator example network."""
    net = Network()
    net.add_node("wrong_setting", Continuous(0, 1))
    net.add_node("switch_off", Boolean())
    net.add_node("controller", Boolean())
    net.add_node("surface_hot", Continuous(0, 1))
    net.add_node("patient_burnt", Continuous(0, 1))
    net.add_edge("wrong_setting", "surface_hot")
    net.add_edge("switch_off", "surface_hot")
    net.add_edge("surface_hot", "patient_burnt")
    net.add_edge("controller", "patient_burnt")
    net.set_npt("wrong_setting", parse("Exponential(10)"))
    net.set_npt(
        "switch_off", Table.root({"False": 0.2, "True": 0.8}, ("False", "True"))
    )
    net.set_npt(
        "controller", Table.root({"False": 0.7, "True": 0.3}, ("False", "True"))
    )
    net.set_npt(
        "surface_hot",
        parse(
            'partition(switch_off){"False": 0.2 * wrong_setting, '
            '"True": wrong_setting * 0.001}'
        ),
    )
    net.set_npt(
        "patient_burnt",
        parse(
            'partition(controller){"False": Triangle(0.2 * surface_hot, '
            'surface_hot, 0.5 * surface_hot), "True": 1.0e-4 * surface_hot}'
        ),
    )
    return net


def scenario_1() -> Scenario:
    return Scenario(
        device=DeviceInfo(name="Defibrillator"),
        criteria=CRITERIA,
        testing=TestingInfo(hazards_observed=5, demands=1000, test_realism="medium"),
        field_data=ZIJLSTRA_FIELD,
        manufacturer=MANUFACTURER,
        benefits=BENEFITS,
    )


def scenario_2() -> Scenario:
    return Scenario(
        device=DeviceInfo(name="Defibrillator"),
        criteria=CRITERIA,
        testing=TestingInfo(hazards_observed=5, demands=700),
        field_data=ZIJLSTRA_FIELD,
        blend_weight=0.6,
        manufacturer=MANUFACTURER,
        benefits=BENEFITS,
    )


def scenario_3() -> Scenario:
    return Scenario(
        device=DeviceInfo(name="Defibrillator"),
        criteria=CRITERIA,
        generic_band="probable",
        field_data=ZIJLSTRA_FIELD,
        blend_weight=0.6,
        manufacturer=MANUFACTURER,
        benefits=BENEFITS,
    )


def scenario_4() -> Scenario:
    return Scenario(
        device=DeviceInfo(name="Defibrillator"),
        criteria=CRITERIA,
        field_data=FieldInfo(
            demands=10000,
            hazard_occurrences=50,
            injuries={SC.MAJOR: 1, SC.NEGLIGIBLE: 49},
        ),
        benefits=BENEFITS,
    )


def scenario_lifepak() -> Scenario:
    return Scenario(
        device=DeviceInfo(name="LIFEPAK 1000 Defibrillator"),
        criteria=CRITERIA,
        field_data=FieldInfo(
            demands=133330,
            hazard_occurrences=133330,
            injuries={SC.FATAL: 133330},
        ),
        benefits=BENEFITS,
    )


@pytest.fixture(scope="session")
def fig3():
    return make_fig3_network()


@pytest.fixture(scope="session")
def report_s1():
    return assess_scenario(scenario_1())


@pytest.fixture(scope="session")
def report_s4():
    return assess_scenario(scenario_4())


@pytest.fixture(scope="session")
def report_lifepak():
    return assess_scenario(scenario_lifepak())
