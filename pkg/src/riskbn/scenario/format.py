"""The ``.mdra`` scenario file format.

Line-oriented sections, chosen for hand-editability by risk analysts:

    [device]
    name = Defibrillator
    hazard = Incorrect shock advice

    [testing]
    hazards = 5
    demands = 1000
    realism = medium

    [field]
    demands = 3310
    occurrences = 15
    asystole = 3          # raw injury names resolve via [injury_map]
    fatal = 0             # or severity-class names directly

    [criteria]
    fatal = 6.2e-5
    ...

``#`` starts a comment.  Counts are integers, probabilities
decimal/scientific literals, ranked labels bare words (``very high``,
``very-high`` and ``very_high`` are equivalent).  A network can be
embedded through ``[network nodes]`` / ``[network edges]`` /
``[network npts]`` sections.
"""

from __future__ import annotations

from riskbn.bn_text import network_from_sections, network_to_text
from riskbn.errors import ScenarioSchemaError, ScenarioSyntaxError
from riskbn.riskmodel.types import (
    AcceptabilityCriteria,
    BenefitsInfo,
    DeviceInfo,
    FieldInfo,
    FragmentSpec,
    GENERIC_BANDS,
    ManufacturerInfo,
    RANKED_LABELS,
    ReworkInfo,
    Scenario,
    SeverityClass,
    TestingInfo,
)

_SEVERITY_NAMES = {s.value for s in SeverityClass.ordered()}

_SECTION_ORDER = (
    "device",
    "testing",
    "field",
    "generic",
    "blend",
    "manufacturer",
    "criteria",
    "benefits",
    "rework",
    "injury_map",
)

_KNOWN_SECTIONS = set(_SECTION_ORDER)


def normalize_label(value: str) -> str:
    return value.strip().lower().replace("-", "_").replace(" ", "_")


def _parse_sections(text: str):
    """Split into {section: {key: (line, value)}}, preserving fragment and
    network sections separately."""
    plain: dict[str, dict[str, tuple[int, str]]] = {}
    fragments: list[tuple[int, str, dict[str, tuple[int, str]]]] = []
    network: dict[str, list[tuple[int, str]]] = {}
    current: dict[str, tuple[int, str]] | None = None
    current_net: list[tuple[int, str]] | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioSyntaxError("unterminated section header", lineno)
            header = line[1:-1].strip().lower()
            current_net = None
            if header.startswith("network"):
                sub = header[len("network"):].strip(" .")
                if sub not in ("nodes", "edges", "npts"):
                    raise ScenarioSyntaxError(
                        f"unknown network section {header!r}", lineno
                    )
                current_net = network.setdefault(sub, [])
                current = None
                continue
            if header.startswith("fragment"):
                name = normalize_label(header[len("fragment"):])
                if not name:
                    raise ScenarioSyntaxError("fragment section needs a name", lineno)
                body: dict[str, tuple[int, str]] = {}
                fragments.append((lineno, name, body))
                current = body
                continue
            if header not in _KNOWN_SECTIONS:
                raise ScenarioSyntaxError(f"unknown section [{header}]", lineno)
            if header in plain:
                raise ScenarioSyntaxError(f"duplicate section [{header}]", lineno)
            current = plain.setdefault(header, {})
            continue
        if current_net is not None:
            current_net.append((lineno, line))
            continue
        if current is None:
            raise ScenarioSyntaxError("content before first section", lineno)
        key, sep, value = line.partition("=")
        if not sep:
            raise ScenarioSyntaxError("expected 'key = value'", lineno)
        key = normalize_label(key)
        if key in current:
            raise ScenarioSyntaxError(f"duplicate key {key!r}", lineno)
        current[key] = (lineno, value.strip())
    return plain, fragments, network


def _get_int(section: dict, key: str, section_name: str) -> int | None:
    if key not in section:
        return None
    lineno, value = section[key]
    try:
        return int(value)
    except ValueError:
        raise ScenarioSyntaxError(
            f"[{section_name}] {key} must be an integer, got {value!r}", lineno
        ) from None


def _get_float(section: dict, key: str, section_name: str) -> float | None:
    if key not in section:
        return None
    lineno, value = section[key]
    try:
        return float(value)
    except ValueError:
        raise ScenarioSyntaxError(
            f"[{section_name}] {key} must be a number, got {value!r}", lineno
        ) from None


def _get_bool(section: dict, key: str, section_name: str) -> bool | None:
    if key not in section:
        return None
    lineno, value = section[key]
    v = value.strip().lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise ScenarioSyntaxError(
        f"[{section_name}] {key} must be true/false, got {value!r}", lineno
    )


def _get_label(section: dict, key: str) -> str | None:
    if key not in section:
        return None
    _, value = section[key]
    return normalize_label(value)


def parse_scenario(data: bytes | str) -> Scenario:
    """Parse scenario text; errors carry the offending line number."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioSyntaxError(f"not valid UTF-8: {exc}") from None
    else:
        text = data
    plain, fragment_raw, network_raw = _parse_sections(text)

    device_sec = plain.get("device", {})
    device = DeviceInfo(
        name=device_sec.get("name", (0, "unnamed device"))[1],
        description=device_sec.get("description", (0, ""))[1],
        life_cycle_phase=device_sec.get("life_cycle_phase", (0, ""))[1],
        hazard=device_sec.get("hazard", (0, ""))[1],
        hazardous_situation=device_sec.get("hazardous_situation", (0, ""))[1],
    )

    if "criteria" not in plain:
        raise ScenarioSchemaError("scenario lacks a [criteria] section")
    crit_sec = plain["criteria"]
    thresholds = {}
    for sev in SeverityClass.ordered():
        value = _get_float(crit_sec, sev.value, "criteria")
        if value is None:
            raise ScenarioSchemaError(
                f"[criteria] missing {sev.value}",
                crit_sec[next(iter(crit_sec))][0] if crit_sec else None,
            )
        thresholds[sev] = value
    criteria = AcceptabilityCriteria(thresholds)

    testing = None
    if "testing" in plain:
        sec = plain["testing"]
        hazards = _get_int(sec, "hazards", "testing")
        demands = _get_int(sec, "demands", "testing")
        if hazards is None or demands is None:
            raise ScenarioSchemaError(
                "[testing] needs hazards and demands",
                next(iter(sec.values()))[0] if sec else None,
            )
        realism = _get_label(sec, "realism")
        if realism is not None and realism not in RANKED_LABELS:
            raise ScenarioSchemaError(
                f"[testing] realism must be one of {RANKED_LABELS}",
                sec["realism"][0],
            )
        testing = TestingInfo(hazards, demands, realism)

    injury_map: dict[str, SeverityClass] = {}
    if "injury_map" in plain:
        for key, (lineno, value) in plain["injury_map"].items():
            injury_map[key] = SeverityClass.from_name(value)

    field_data = None
    if "field" in plain:
        sec = plain["field"]
        demands = _get_int(sec, "demands", "field")
        occurrences = _get_int(sec, "occurrences", "field")
        if demands is None or occurrences is None:
            raise ScenarioSchemaError(
                "[field] needs demands and occurrences",
                next(iter(sec.values()))[0] if sec else None,
            )
        injuries: dict[SeverityClass, int] = {}
        for key, (lineno, value) in sec.items():
            if key in ("demands", "occurrences"):
                continue
            if key in _SEVERITY_NAMES:
                sev = SeverityClass.from_name(key)
            elif key in injury_map:
                sev = injury_map[key]
            else:
                raise ScenarioSchemaError(
                    f"[field] unknown injury {key!r}; add it to [injury_map] "
                    "or use a severity class name",
                    lineno,
                )
            try:
                count = int(value)
            except ValueError:
                raise ScenarioSyntaxError(
                    f"[field] {key} must be an integer", lineno
                ) from None
            injuries[sev] = injuries.get(sev, 0) + count
        field_data = FieldInfo(demands, occurrences, injuries)

    generic_band = None
    if "generic" in plain:
        generic_band = _get_label(plain["generic"], "band")
        if generic_band is not None and generic_band not in GENERIC_BANDS:
            raise ScenarioSchemaError(
                f"unknown generic band {generic_band!r}",
                plain["generic"]["band"][0],
            )

    blend_weight = 1.0
    if "blend" in plain:
        w = _get_float(plain["blend"], "weight", "blend")
        if w is not None:
            blend_weight = w

    manufacturer = None
    if "manufacturer" in plain:
        sec = plain["manufacturer"]
        manufacturer = ManufacturerInfo(
            reputation=_get_label(sec, "reputation"),
            customer_satisfaction=_get_label(sec, "customer_satisfaction"),
            product_defects=_get_bool(sec, "product_defects", "manufacturer"),
            process_additives=_get_bool(sec, "process_additives", "manufacturer"),
            process_drifts=_get_bool(sec, "process_drifts", "manufacturer"),
        )

    benefits = None
    if "benefits" in plain:
        sec = plain["benefits"]
        labels = {}
        for key in ("patient_population", "device_performance", "clinical_outcome"):
            label = _get_label(sec, key)
            if label is None:
                raise ScenarioSchemaError(
                    f"[benefits] missing {key}",
                    next(iter(sec.values()))[0] if sec else None,
                )
            labels[key] = label
        benefits = BenefitsInfo(**labels)

    rework = None
    if "rework" in plain:
        sec = plain["rework"]
        quality = _get_label(sec, "quality")
        effort = _get_label(sec, "effort")
        if quality is None and effort is None:
            raise ScenarioSchemaError(
                "[rework] needs quality and effort",
                next(iter(sec.values()))[0] if sec else None,
            )
        rework = ReworkInfo(quality or effort, effort or quality)

    fragments = []
    for lineno, name, body in fragment_raw:
        kind = _get_label(body, "kind")
        if kind is None:
            raise ScenarioSchemaError(f"[fragment {name}] needs kind", lineno)
        parents = {
            key: normalize_label(value)
            for key, (_, value) in body.items()
            if key != "kind"
        }
        fragments.append(FragmentSpec(name=name, kind=kind, parents=parents))

    embedded = network_from_sections(network_raw) if network_raw else None

    scenario = Scenario(
        device=device,
        criteria=criteria,
        testing=testing,
        field_data=field_data,
        generic_band=generic_band,
        blend_weight=blend_weight,
        manufacturer=manufacturer,
        benefits=benefits,
        rework=rework,
        fragments=tuple(fragments),
        injury_map=injury_map,
    )
    if embedded is not None:
        object.__setattr__(scenario, "embedded_network", embedded)
    return scenario


def _fmt_float(x: float) -> str:
    return repr(float(x))


def render_scenario(scenario: Scenario) -> str:
    """Canonical text form; parse(render(parse(x))) == parse(x)."""
    lines: list[str] = []

    lines.append("[device]")
    lines.append(f"name = {scenario.device.name}")
    for key in ("description", "life_cycle_phase", "hazard", "hazardous_situation"):
        value = getattr(scenario.device, key)
        if value:
            lines.append(f"{key} = {value}")
    lines.append("")

    if scenario.testing is not None:
        lines.append("[testing]")
        lines.append(f"hazards = {scenario.testing.hazards_observed}")
        lines.append(f"demands = {scenario.testing.demands}")
        if scenario.testing.test_realism:
            lines.append(f"realism = {scenario.testing.test_realism}")
        lines.append("")

    if scenario.field_data is not None:
        lines.append("[field]")
        lines.append(f"demands = {scenario.field_data.demands}")
        lines.append(f"occurrences = {scenario.field_data.hazard_occurrences}")
        for sev in SeverityClass.ordered():
            count = scenario.field_data.injury_count(sev)
            if count:
                lines.append(f"{sev.value} = {count}")
        lines.append("")

    if scenario.generic_band is not None:
        lines.append("[generic]")
        lines.append(f"band = {scenario.generic_band}")
        lines.append("")

    if scenario.blend_weight != 1.0:
        lines.append("[blend]")
        lines.append(f"weight = {_fmt_float(scenario.blend_weight)}")
        lines.append("")

    m = scenario.manufacturer
    if m is not None and not m.empty:
        lines.append("[manufacturer]")
        if m.reputation is not None:
            lines.append(f"reputation = {m.reputation}")
        if m.customer_satisfaction is not None:
            lines.append(f"customer_satisfaction = {m.customer_satisfaction}")
        for key in ("product_defects", "process_additives", "process_drifts"):
            value = getattr(m, key)
            if value is not None:
                lines.append(f"{key} = {'true' if value else 'false'}")
        lines.append("")

    lines.append("[criteria]")
    for sev in SeverityClass.ordered():
        lines.append(f"{sev.value} = {_fmt_float(scenario.criteria[sev])}")
    lines.append("")

    if scenario.benefits is not None:
        lines.append("[benefits]")
        lines.append(f"patient_population = {scenario.benefits.patient_population}")
        lines.append(f"device_performance = {scenario.benefits.device_performance}")
        lines.append(f"clinical_outcome = {scenario.benefits.clinical_outcome}")
        lines.append("")

    if scenario.rework is not None:
        lines.append("[rework]")
        lines.append(f"quality = {scenario.rework.rework_quality}")
        lines.append(f"effort = {scenario.rework.rework_effort}")
        lines.append("")

    if scenario.injury_map:
        lines.append("[injury_map]")
        for key, sev in scenario.injury_map.items():
            lines.append(f"{key} = {sev.value}")
        lines.append("")

    for frag in scenario.fragments:
        lines.append(f"[fragment {frag.name}]")
        lines.append(f"kind = {frag.kind}")
        for parent, label in frag.parents.items():
            lines.append(f"{parent} = {label}")
        lines.append("")

    embedded = getattr(scenario, "embedded_network", None)
    if embedded is not None:
        lines.append(network_to_text(embedded, prefix="network "))

    return "\n".join(lines).rstrip() + "\n"
