"""Domain types for device risk assessment."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from riskbn.errors import ScenarioSchemaError


class SeverityClass(Enum):
    """Injury severity, ordered most to least severe."""

    FATAL = "fatal"
    CRITICAL = "critical"
    MAJOR = "major"
    MINOR = "minor"
    NEGLIGIBLE = "negligible"

    @classmethod
    def ordered(cls) -> tuple["SeverityClass", ...]:
        return (cls.FATAL, cls.CRITICAL, cls.MAJOR, cls.MINOR, cls.NEGLIGIBLE)

    @classmethod
    def from_name(cls, name: str) -> "SeverityClass":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ScenarioSchemaError(f"unknown severity class {name!r}") from None


#: Weights of the overall-residual-risk weighted mean, most severe first.
ORR_WEIGHTS: dict[SeverityClass, float] = {
    SeverityClass.FATAL: 10.0,
    SeverityClass.CRITICAL: 4.0,
    SeverityClass.MAJOR: 3.0,
    SeverityClass.MINOR: 2.0,
    SeverityClass.NEGLIGIBLE: 1.0,
}

RANKED_LABELS = ("very_low", "low", "medium", "high", "very_high")

#: Generic hazard-occurrence bands: decade-wide P1 intervals, descending.
GENERIC_BANDS: dict[str, tuple[float, float]] = {
    "frequent": (1e-3, 1.0),
    "probable": (1e-4, 1e-3),
    "occasional": (1e-5, 1e-4),
    "remote": (1e-6, 1e-5),
    "improbable": (0.0, 1e-6),
}


@dataclass(frozen=True)
class TestingInfo:
    hazards_observed: int
    demands: int
    test_realism: str | None = None  # ranked label; stored, not yet modelled

    def __post_init__(self):
        if self.demands < 1:
            raise ScenarioSchemaError("testing demands must be >= 1")
        if not 0 <= self.hazards_observed <= self.demands:
            raise ScenarioSchemaError(
                "hazards observed must lie in [0, demands]"
            )


@dataclass(frozen=True)
class FieldInfo:
    demands: int
    hazard_occurrences: int
    injuries: Mapping[SeverityClass, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.demands < 1:
            raise ScenarioSchemaError("field demands must be >= 1")
        if not 0 <= self.hazard_occurrences <= self.demands:
            raise ScenarioSchemaError(
                "hazard occurrences must lie in [0, demands]"
            )
        total = sum(self.injuries.values())
        if any(v < 0 for v in self.injuries.values()):
            raise ScenarioSchemaError("injury counts must be non-negative")
        if total > self.hazard_occurrences:
            raise ScenarioSchemaError(
                f"injuries ({total}) exceed hazard occurrences "
                f"({self.hazard_occurrences})"
            )

    def injury_count(self, severity: SeverityClass) -> int:
        return int(self.injuries.get(severity, 0))


@dataclass(frozen=True)
class ManufacturerInfo:
    """All fields optional; absent fields contribute the prior."""

    reputation: str | None = None
    customer_satisfaction: str | None = None
    product_defects: bool | None = None
    process_additives: bool | None = None
    process_drifts: bool | None = None

    @property
    def empty(self) -> bool:
        return all(
            getattr(self, f) is None
            for f in (
                "reputation",
                "customer_satisfaction",
                "product_defects",
                "process_additives",
                "process_drifts",
            )
        )


@dataclass(frozen=True)
class AcceptabilityCriteria:
    thresholds: Mapping[SeverityClass, float]

    def __post_init__(self):
        missing = [s for s in SeverityClass.ordered() if s not in self.thresholds]
        if missing:
            raise ScenarioSchemaError(
                "criteria missing for: " + ", ".join(s.value for s in missing)
            )
        for sev, value in self.thresholds.items():
            if not 0.0 < value < 1.0:
                raise ScenarioSchemaError(
                    f"criterion for {sev.value} must lie in (0, 1), got {value!r}"
                )

    def __getitem__(self, severity: SeverityClass) -> float:
        return float(self.thresholds[severity])


@dataclass(frozen=True)
class BenefitsInfo:
    patient_population: str
    device_performance: str
    clinical_outcome: str

    def __post_init__(self):
        for name in ("patient_population", "device_performance", "clinical_outcome"):
            label = getattr(self, name)
            if label not in RANKED_LABELS:
                raise ScenarioSchemaError(
                    f"benefit {name} must be one of {RANKED_LABELS}, got {label!r}"
                )


@dataclass(frozen=True)
class ReworkInfo:
    rework_quality: str
    rework_effort: str

    def __post_init__(self):
        for name in ("rework_quality", "rework_effort"):
            label = getattr(self, name)
            if label not in RANKED_LABELS:
                raise ScenarioSchemaError(
                    f"rework {name} must be one of {RANKED_LABELS}, got {label!r}"
                )


@dataclass(frozen=True)
class FragmentSpec:
    """Configurable ranked fragment merged into the risk network.

    ``kind`` is ``process`` (output informs the hazard-probability prior,
    e.g. a software development process fragment) or ``device_use``
    (output revises the field-estimated hazard probability for an
    individual user).
    """

    name: str
    kind: str  # process | device_use
    parents: Mapping[str, str]  # parent name -> observed ranked label

    def __post_init__(self):
        if self.kind not in ("process", "device_use"):
            raise ScenarioSchemaError(
                f"fragment kind must be process or device_use, got {self.kind!r}"
            )
        if not self.parents:
            raise ScenarioSchemaError(f"fragment {self.name!r} has no parents")
        for parent, label in self.parents.items():
            if label not in RANKED_LABELS:
                raise ScenarioSchemaError(
                    f"fragment parent {parent!r} label must be one of "
                    f"{RANKED_LABELS}, got {label!r}"
                )


@dataclass(frozen=True)
class DeviceInfo:
    name: str
    description: str = ""
    life_cycle_phase: str = ""
    hazard: str = ""
    hazardous_situation: str = ""


@dataclass(frozen=True)
class Scenario:
    """One hazard's complete evidence set."""

    device: DeviceInfo
    criteria: AcceptabilityCriteria
    testing: TestingInfo | None = None
    field_data: FieldInfo | None = None
    generic_band: str | None = None
    blend_weight: float = 1.0  # 1.0 = testing/band evidence only
    manufacturer: ManufacturerInfo | None = None
    benefits: BenefitsInfo | None = None
    rework: ReworkInfo | None = None
    fragments: tuple[FragmentSpec, ...] = ()
    injury_map: Mapping[str, SeverityClass] = field(default_factory=dict)

    def __post_init__(self):
        if self.testing is None and self.field_data is None and self.generic_band is None:
            raise ScenarioSchemaError(
                "scenario needs at least one hazard-probability evidence "
                "source (testing, field data, or a generic band)"
            )
        if not 0.0 <= self.blend_weight <= 1.0:
            raise ScenarioSchemaError(
                f"blend weight must lie in [0, 1], got {self.blend_weight!r}"
            )
        if self.blend_weight < 1.0 and self.field_data is None:
            raise ScenarioSchemaError(
                "a blend weight below 1 requires field data"
            )
        if self.generic_band is not None and self.generic_band not in GENERIC_BANDS:
            raise ScenarioSchemaError(
                f"unknown generic band {self.generic_band!r}; expected one of "
                + ", ".join(GENERIC_BANDS)
            )


@dataclass(frozen=True)
class SeverityResult:
    criterion: float
    risk_median: float
    acceptability_fraction: float


@dataclass(frozen=True)
class RiskReport:
    """One assessed hazard: the numbers behind one results table."""

    severities: Mapping[SeverityClass, SeverityResult]
    orr_acceptability: float  # posterior mean of the ORR node
    orr_median: float
    controls_required_fraction: float
    controls_required_flag: bool
    benefit_risk_acceptability: float | None
    meta: Mapping[str, object] = field(default_factory=dict)

    def severity(self, severity: SeverityClass) -> SeverityResult:
        return self.severities[severity]


@dataclass(frozen=True)
class HazardRow:
    """Per-hazard acceptability row of the multi-hazard table."""

    name: str
    acceptability: Mapping[SeverityClass, float]
    orr: float
    benefit_risk: float | None = None

    @classmethod
    def from_report(cls, name: str, report: RiskReport) -> "HazardRow":
        return cls(
            name=name,
            acceptability={
                s: report.severities[s].acceptability_fraction
                for s in SeverityClass.ordered()
            },
            orr=report.orr_acceptability,
            benefit_risk=report.benefit_risk_acceptability,
        )


@dataclass(frozen=True)
class HazardTable:
    rows: tuple[HazardRow, ...]
    combined: HazardRow
