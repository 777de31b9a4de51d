"""Text serialization of networks.

Uses the same sectioned ``[section]`` / ``key = value`` style as
scenario files, so a network can stand alone in its own file or be
embedded in a scenario (sections ``[network nodes]``, ``[network
edges]``, ``[network npts]``).  Round-trips exactly: floats are written
with ``repr`` and expressions through the expression serializer.
"""

from __future__ import annotations

from riskbn.bn import (
    BinnedPrior,
    Boolean,
    Continuous,
    Labelled,
    Network,
    Ranked,
    RankedScale,
    Table,
)
from riskbn.errors import ScenarioSyntaxError
from riskbn.nptlang import expr_to_text, parse


def _quote(state: str) -> str:
    if state and all(c.isalnum() or c == "_" for c in state):
        return state
    return f'"{state}"'


def _fmt(x: float) -> str:
    return repr(float(x))


def network_to_text(net: Network, prefix: str = "") -> str:
    """Serialize; ``prefix`` namespaces the section headers (e.g. "network ")."""
    lines = [f"[{prefix}nodes]"]
    for name, kind in net.kinds.items():
        if isinstance(kind, Continuous):
            lines.append(f"{name} = continuous {_fmt(kind.lo)} {_fmt(kind.hi)}")
        elif isinstance(kind, Boolean):
            lines.append(f"{name} = boolean")
        elif isinstance(kind, Ranked):
            scale = kind.scale
            body = " ".join(_quote(s) for s in scale.labels)
            equal = RankedScale.equal_width(scale.labels)
            if scale == equal:
                lines.append(f"{name} = ranked {body}")
            else:
                edges = " ".join(_fmt(e) for e in scale.edges)
                mids = " ".join(_fmt(m) for m in scale.midpoints)
                lines.append(f"{name} = ranked {body} | {edges} | {mids}")
        elif isinstance(kind, Labelled):
            body = " ".join(_quote(s) for s in kind.states)
            lines.append(f"{name} = labelled {body}")
    lines.append("")
    lines.append(f"[{prefix}edges]")
    for child in net.kinds:
        for parent in net.parents(child):
            lines.append(f"{parent} -> {child}")
    lines.append("")
    lines.append(f"[{prefix}npts]")
    for name in net.kinds:
        npt = net.npts.get(name)
        if npt is None:
            continue
        if isinstance(npt, Table):
            cols = []
            for config, probs in npt.columns:
                key = ",".join(_quote(s) for s in config)
                cols.append(f"({key}): " + " ".join(_fmt(p) for p in probs))
            parents = ",".join(npt.parents)
            lines.append(f"{name} = table({parents}) {{" + "; ".join(cols) + "}")
        elif isinstance(npt, BinnedPrior):
            lines.append(
                f"{name} = binned {{edges: "
                + " ".join(_fmt(e) for e in npt.edges)
                + "; masses: "
                + " ".join(_fmt(m) for m in npt.masses)
                + "; reps: "
                + " ".join(_fmt(r) for r in npt.reps)
                + "}"
            )
        else:
            lines.append(f"{name} = {expr_to_text(npt)}")
    lines.append("")
    return "\n".join(lines)


def network_from_sections(sections: dict[str, list[tuple[int, str]]]) -> Network:
    """Build a network from pre-split sections (name -> numbered lines)."""
    net = Network()
    for lineno, line in sections.get("nodes", []):
        name, _, rest = line.partition("=")
        name, rest = name.strip(), rest.strip()
        if not name or not rest:
            raise ScenarioSyntaxError("expected '<node> = <kind>'", lineno)
        net.add_node(name, _parse_kind(rest, lineno))
    for lineno, line in sections.get("edges", []):
        parent, sep, child = line.partition("->")
        if not sep:
            raise ScenarioSyntaxError("expected '<parent> -> <child>'", lineno)
        net.add_edge(parent.strip(), child.strip())
    for lineno, line in sections.get("npts", []):
        name, _, rest = line.partition("=")
        name, rest = name.strip(), rest.strip()
        if not name or not rest:
            raise ScenarioSyntaxError("expected '<node> = <npt>'", lineno)
        net.set_npt(name, _parse_npt(rest, lineno))
    return net


def network_from_text(text: str) -> Network:
    sections: dict[str, list[tuple[int, str]]] = {}
    current: list[tuple[int, str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = sections.setdefault(line[1:-1].strip().lower(), [])
            continue
        if current is None:
            raise ScenarioSyntaxError("content before first section", lineno)
        current.append((lineno, line))
    return network_from_sections(sections)


def _split_states(body: str, lineno: int) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(body):
        c = body[i]
        if c.isspace() or c == ",":
            i += 1
        elif c == '"':
            j = body.find('"', i + 1)
            if j < 0:
                raise ScenarioSyntaxError("unterminated quoted state", lineno)
            out.append(body[i + 1 : j])
            i = j + 1
        else:
            j = i
            while j < len(body) and not body[j].isspace() and body[j] != ",":
                j += 1
            out.append(body[i:j])
            i = j
    return out


def _parse_kind(text: str, lineno: int):
    word, _, rest = text.partition(" ")
    word = word.lower()
    if word == "boolean":
        return Boolean()
    if word == "continuous":
        parts = rest.split()
        if len(parts) != 2:
            raise ScenarioSyntaxError("continuous needs 'lo hi'", lineno)
        return Continuous(float(parts[0]), float(parts[1]))
    if word == "labelled":
        return Labelled(tuple(_split_states(rest, lineno)))
    if word == "ranked":
        if "|" in rest:
            label_part, edge_part, mid_part = (p.strip() for p in rest.split("|"))
            labels = tuple(_split_states(label_part, lineno))
            edges = tuple(float(x) for x in edge_part.split())
            mids = tuple(float(x) for x in mid_part.split())
            return Ranked(RankedScale(labels, edges, mids))
        return Ranked(RankedScale.equal_width(_split_states(rest, lineno)))
    raise ScenarioSyntaxError(f"unknown node kind {word!r}", lineno)


def _parse_npt(text: str, lineno: int):
    if text.startswith("table"):
        head, _, body = text.partition("{")
        if not body.endswith("}"):
            raise ScenarioSyntaxError("table needs a {...} body", lineno)
        body = body[:-1]
        parents_txt = head[len("table"):].strip()
        if parents_txt.startswith("(") and parents_txt.endswith(")"):
            parents_txt = parents_txt[1:-1]
        parents = tuple(p.strip() for p in parents_txt.split(",") if p.strip())
        columns = []
        for chunk in body.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            key_txt, _, probs_txt = chunk.partition(":")
            key_txt = key_txt.strip()
            if not (key_txt.startswith("(") and key_txt.endswith(")")):
                raise ScenarioSyntaxError("table column key must be (states)", lineno)
            key = tuple(
                s for s in _split_states(key_txt[1:-1], lineno) if s
            )
            probs = tuple(float(x) for x in probs_txt.split())
            columns.append((key, probs))
        return Table(parents, tuple(columns))
    if text.startswith("binned"):
        body = text[len("binned"):].strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ScenarioSyntaxError("binned needs a {...} body", lineno)
        parts = {}
        for chunk in body[1:-1].split(";"):
            key, _, vals = chunk.partition(":")
            parts[key.strip().lower()] = tuple(float(x) for x in vals.split())
        try:
            return BinnedPrior(parts["edges"], parts["masses"], parts["reps"])
        except KeyError as exc:
            raise ScenarioSyntaxError(
                f"binned prior missing {exc.args[0]!r}", lineno
            ) from None
    return parse(text)
