"""Dotted-path overrides on scenarios, shared by the CLI what-if and the
HTTP service's PATCH endpoint."""

from __future__ import annotations

from dataclasses import replace

from riskbn.errors import InvalidOverrideError, ScenarioSchemaError
from riskbn.riskmodel.types import (
    BenefitsInfo,
    FieldInfo,
    ManufacturerInfo,
    ReworkInfo,
    Scenario,
    SeverityClass,
    TestingInfo,
)
from riskbn.scenario.format import normalize_label

_SEVERITIES = {s.value for s in SeverityClass.ordered()}


def _to_int(value, path: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise InvalidOverrideError(f"{path} needs an integer, got {value!r}") from None


def _to_float(value, path: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidOverrideError(f"{path} needs a number, got {value!r}") from None


def _to_bool(value, path: str) -> bool:
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise InvalidOverrideError(f"{path} needs true/false, got {value!r}")


def apply_override(scenario: Scenario, path: str, value) -> Scenario:
    """A new scenario with one field overridden; rejects unknown paths."""
    section, _, key = path.strip().lower().partition(".")
    if not key:
        raise InvalidOverrideError(f"override path {path!r} needs a section.key form")

    try:
        if section == "testing":
            return _override_testing(scenario, key, value, path)
        if section == "field":
            return _override_field(scenario, key, value, path)
        if section == "criteria":
            if key not in _SEVERITIES:
                raise InvalidOverrideError(f"unknown severity {key!r} in {path!r}")
            thresholds = dict(scenario.criteria.thresholds)
            thresholds[SeverityClass.from_name(key)] = _to_float(value, path)
            return replace(scenario, criteria=type(scenario.criteria)(thresholds))
        if section == "manufacturer":
            return _override_manufacturer(scenario, key, value, path)
        if section == "benefits":
            return _override_benefits(scenario, key, value, path)
        if section == "rework":
            return _override_rework(scenario, key, value, path)
        if section == "blend":
            if key != "weight":
                raise InvalidOverrideError(f"unknown blend field {key!r}")
            return replace(scenario, blend_weight=_to_float(value, path))
        if section == "generic":
            if key != "band":
                raise InvalidOverrideError(f"unknown generic field {key!r}")
            return replace(scenario, generic_band=normalize_label(str(value)))
        if section == "device":
            if key not in (
                "name",
                "description",
                "life_cycle_phase",
                "hazard",
                "hazardous_situation",
            ):
                raise InvalidOverrideError(f"unknown device field {key!r}")
            return replace(
                scenario, device=replace(scenario.device, **{key: str(value)})
            )
    except ScenarioSchemaError as exc:
        raise InvalidOverrideError(str(exc)) from None
    raise InvalidOverrideError(f"unknown override section {section!r}")


def _override_testing(scenario, key, value, path):
    base = scenario.testing
    if key == "hazards":
        if base is None:
            raise InvalidOverrideError(
                "scenario has no testing section; set testing.demands first"
            )
        new = TestingInfo(_to_int(value, path), base.demands, base.test_realism)
    elif key == "demands":
        new = TestingInfo(
            base.hazards_observed if base else 0,
            _to_int(value, path),
            base.test_realism if base else None,
        )
    elif key == "realism":
        if base is None:
            raise InvalidOverrideError("scenario has no testing section")
        new = TestingInfo(
            base.hazards_observed, base.demands, normalize_label(str(value))
        )
    else:
        raise InvalidOverrideError(f"unknown testing field {key!r}")
    return replace(scenario, testing=new)


def _override_field(scenario, key, value, path):
    base = scenario.field_data
    if base is None:
        raise InvalidOverrideError("scenario has no field section")
    if key == "demands":
        new = FieldInfo(_to_int(value, path), base.hazard_occurrences, base.injuries)
    elif key == "occurrences":
        new = FieldInfo(base.demands, _to_int(value, path), base.injuries)
    elif key in _SEVERITIES:
        injuries = dict(base.injuries)
        injuries[SeverityClass.from_name(key)] = _to_int(value, path)
        new = FieldInfo(base.demands, base.hazard_occurrences, injuries)
    else:
        raise InvalidOverrideError(f"unknown field entry {key!r}")
    return replace(scenario, field_data=new)


def _override_manufacturer(scenario, key, value, path):
    base = scenario.manufacturer or ManufacturerInfo()
    if key in ("reputation", "customer_satisfaction"):
        new = replace(base, **{key: normalize_label(str(value))})
    elif key in ("product_defects", "process_additives", "process_drifts"):
        new = replace(base, **{key: _to_bool(value, path)})
    else:
        raise InvalidOverrideError(f"unknown manufacturer field {key!r}")
    return replace(scenario, manufacturer=new)


def _override_benefits(scenario, key, value, path):
    if key not in ("patient_population", "device_performance", "clinical_outcome"):
        raise InvalidOverrideError(f"unknown benefits field {key!r}")
    label = normalize_label(str(value))
    base = scenario.benefits
    if base is None:
        # starting from nothing, the other two panels default to medium
        fields = {
            "patient_population": "medium",
            "device_performance": "medium",
            "clinical_outcome": "medium",
            key: label,
        }
        return replace(scenario, benefits=BenefitsInfo(**fields))
    return replace(scenario, benefits=replace(base, **{key: label}))


def _override_rework(scenario, key, value, path):
    if key not in ("quality", "effort"):
        raise InvalidOverrideError(f"unknown rework field {key!r}")
    label = normalize_label(str(value))
    base = scenario.rework
    if base is None:
        # one label implies the other until overridden separately
        return replace(scenario, rework=ReworkInfo(label, label))
    fields = {
        "rework_quality": base.rework_quality,
        "rework_effort": base.rework_effort,
    }
    fields["rework_quality" if key == "quality" else "rework_effort"] = label
    return replace(scenario, rework=ReworkInfo(**fields))
