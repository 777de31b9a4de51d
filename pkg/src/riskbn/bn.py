"""Network data model: node kinds, ranked scales, edges and NPT attachment.

Networks are built mutably by a single owner (``add_node`` / ``add_edge`` /
``set_npt`` return ``self`` for chaining), then checked with
:meth:`Network.validate`.  A compiled network (see ``riskbn.inference``)
takes an immutable snapshot, so validated networks are safe to share
across concurrent readers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from riskbn.errors import (
    CycleDetectedError,
    DuplicateNodeError,
    MalformedTableError,
    UnknownNodeError,
    UnknownParentReferenceError,
)
from riskbn.nptlang.ast import DistCall, Expr, Partitioned, parent_refs

TABLE_TOL = 1e-9


# --- ranked scales -----------------------------------------------------------

@dataclass(frozen=True)
class RankedScale:
    """Ordered labels mapped onto contiguous subintervals of [0, 1].

    The interval for label i is [edges[i], edges[i+1]) with the last
    interval closed; midpoints are the representative numeric values used
    when a ranked node appears in an expression.
    """

    labels: tuple[str, ...]
    edges: tuple[float, ...]
    midpoints: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) < 2:
            raise ValueError("ranked scale needs at least 2 labels")
        if len(self.edges) != len(self.labels) + 1:
            raise ValueError("ranked scale needs len(labels)+1 interval edges")
        if abs(self.edges[0]) > 1e-12 or abs(self.edges[-1] - 1.0) > 1e-12:
            raise ValueError("ranked intervals must cover [0, 1] exactly")
        for a, b in itertools.pairwise(self.edges):
            if not b > a:
                raise ValueError("ranked intervals must ascend with label order")
        for i, m in enumerate(self.midpoints):
            if not self.edges[i] < m < self.edges[i + 1]:
                raise ValueError("midpoint must lie strictly inside its interval")

    @classmethod
    def equal_width(cls, labels: Iterable[str]) -> "RankedScale":
        labels = tuple(labels)
        n = len(labels)
        edges = tuple(i / n for i in range(n + 1))
        midpoints = tuple((2 * i + 1) / (2 * n) for i in range(n))
        return cls(labels, edges, midpoints)


THREE_POINT = RankedScale.equal_width(("low", "medium", "high"))
FIVE_POINT = RankedScale.equal_width(
    ("very_low", "low", "medium", "high", "very_high")
)


# --- node kinds --------------------------------------------------------------

@dataclass(frozen=True)
class Boolean:
    @property
    def states(self) -> tuple[str, str]:
        return ("False", "True")


@dataclass(frozen=True)
class Labelled:
    states: tuple[str, ...]

    def __post_init__(self):
        if len(self.states) < 2:
            raise ValueError("labelled node needs at least 2 states")
        if len(set(self.states)) != len(self.states):
            raise ValueError("labelled states must be distinct")


@dataclass(frozen=True)
class Ranked:
    scale: RankedScale

    @property
    def states(self) -> tuple[str, ...]:
        return self.scale.labels


@dataclass(frozen=True)
class Continuous:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"continuous domain needs lo < hi, got [{self.lo}, {self.hi}]")


NodeKind = Union[Boolean, Labelled, Ranked, Continuous]


def is_discrete(kind: NodeKind) -> bool:
    return isinstance(kind, (Boolean, Labelled, Ranked))


# --- NPT attachments ---------------------------------------------------------

@dataclass(frozen=True)
class Table:
    """Explicit probability table for a discrete node.

    One column per parent configuration; configurations enumerate the
    parents' states lexicographically in ``parents`` order.  A root table
    has ``parents == ()`` and a single column keyed by ``()``.
    """

    parents: tuple[str, ...]
    columns: tuple[tuple[tuple[str, ...], tuple[float, ...]], ...]

    def column_map(self) -> dict[tuple[str, ...], tuple[float, ...]]:
        return dict(self.columns)

    @classmethod
    def root(cls, probs: Mapping[str, float], states: Iterable[str]) -> "Table":
        ordered = tuple(float(probs[s]) for s in states)
        return cls((), (((), ordered),))


@dataclass(frozen=True)
class BinnedPrior:
    """Pre-discretized prior for a continuous root (used to chain posteriors)."""

    edges: tuple[float, ...]
    masses: tuple[float, ...]
    reps: tuple[float, ...]


Npt = Union[Expr, Table, BinnedPrior]


# --- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    node: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, node: str, message: str) -> None:
        self.violations.append(Violation(kind, node, message))

    def __iter__(self):
        return iter(self.violations)

    def __len__(self):
        return len(self.violations)


# --- the network -------------------------------------------------------------

class Network:
    """Directed acyclic graph of typed nodes with attached NPTs."""

    def __init__(self):
        self.kinds: dict[str, NodeKind] = {}
        self._parents: dict[str, list[str]] = {}
        self.npts: dict[str, Npt] = {}

    # structure ---------------------------------------------------------------

    def add_node(self, node_id: str, kind: NodeKind) -> "Network":
        if not node_id:
            raise UnknownNodeError("node id must be a non-empty string")
        if node_id in self.kinds:
            raise DuplicateNodeError(f"node {node_id!r} already exists")
        self.kinds[node_id] = kind
        self._parents[node_id] = []
        return self

    def add_edge(self, parent: str, child: str) -> "Network":
        for name in (parent, child):
            if name not in self.kinds:
                raise UnknownNodeError(f"unknown node {name!r}")
        path = self._find_path(child, parent)
        if path is not None:
            raise CycleDetectedError(path + [child])
        if parent not in self._parents[child]:
            self._parents[child].append(parent)
        return self

    def remove_edge(self, parent: str, child: str) -> "Network":
        if child in self._parents and parent in self._parents[child]:
            self._parents[child].remove(parent)
        return self

    def _find_path(self, start: str, goal: str) -> list[str] | None:
        """Directed path start -> ... -> goal following child->child edges."""
        if start == goal:
            return [start]
        children: dict[str, list[str]] = {n: [] for n in self.kinds}
        for child, parents in self._parents.items():
            for p in parents:
                children[p].append(child)
        stack = [(start, [start])]
        seen = {start}
        while stack:
            cur, path = stack.pop()
            for nxt in children[cur]:
                if nxt == goal:
                    return path + [nxt]
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append((nxt, path + [nxt]))
        return None

    def parents(self, node_id: str) -> tuple[str, ...]:
        if node_id not in self.kinds:
            raise UnknownNodeError(f"unknown node {node_id!r}")
        return tuple(self._parents[node_id])

    def edges(self) -> set[tuple[str, str]]:
        return {
            (p, child) for child, ps in self._parents.items() for p in ps
        }

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(self.kinds)

    def states(self, node_id: str) -> tuple[str, ...]:
        kind = self.kinds[node_id]
        if not is_discrete(kind):
            raise UnknownNodeError(f"node {node_id!r} is continuous")
        return kind.states

    # NPTs ---------------------------------------------------------------------

    def set_npt(self, node_id: str, npt: Npt) -> "Network":
        if node_id not in self.kinds:
            raise UnknownNodeError(f"unknown node {node_id!r}")
        if isinstance(npt, Table):
            self._check_table(node_id, npt)
        elif isinstance(npt, BinnedPrior):
            if self._parents[node_id]:
                raise MalformedTableError(
                    f"binned prior only allowed on root nodes, {node_id!r} has parents"
                )
        else:
            refs = parent_refs(npt)
            extra = refs - set(self._parents[node_id])
            if extra:
                raise UnknownParentReferenceError(
                    f"expression for {node_id!r} references non-parents: "
                    + ", ".join(sorted(extra))
                )
        self.npts[node_id] = npt
        return self

    def _check_table(self, node_id: str, table: Table) -> None:
        if set(table.parents) != set(self._parents[node_id]):
            raise UnknownParentReferenceError(
                f"table for {node_id!r} must cover exactly its parents "
                f"{tuple(self._parents[node_id])}, got {table.parents}"
            )
        for p in table.parents:
            if not is_discrete(self.kinds[p]):
                raise MalformedTableError(
                    f"table parent {p!r} of {node_id!r} is continuous"
                )
        kind = self.kinds[node_id]
        if not is_discrete(kind):
            raise MalformedTableError(
                f"explicit tables require a discrete child, {node_id!r} is continuous"
            )
        n_states = len(kind.states)
        for config, probs in table.columns:
            if len(probs) != n_states:
                raise MalformedTableError(
                    f"table column {config} for {node_id!r} has {len(probs)} "
                    f"entries, expected {n_states}"
                )
            if any(p < -TABLE_TOL for p in probs):
                raise MalformedTableError(
                    f"negative probability in table column {config} of {node_id!r}"
                )
            if abs(sum(probs) - 1.0) > TABLE_TOL:
                raise MalformedTableError(
                    f"table column {config} of {node_id!r} sums to {sum(probs)!r}"
                )

    # validation ----------------------------------------------------------------

    def topological_order(self) -> list[str]:
        indeg = {n: len(ps) for n, ps in self._parents.items()}
        children: dict[str, list[str]] = {n: [] for n in self.kinds}
        for child, ps in self._parents.items():
            for p in ps:
                children[p].append(child)
        frontier = sorted(n for n, d in indeg.items() if d == 0)
        order: list[str] = []
        while frontier:
            cur = frontier.pop(0)
            order.append(cur)
            changed = False
            for ch in children[cur]:
                indeg[ch] -= 1
                if indeg[ch] == 0:
                    frontier.append(ch)
                    changed = True
            if changed:
                frontier.sort()
        if len(order) != len(self.kinds):
            stuck = sorted(set(self.kinds) - set(order))
            raise CycleDetectedError(stuck)
        return order

    def validate(self) -> ValidationReport:
        """Structural integrity report; an empty report means compilable."""
        report = ValidationReport()
        try:
            self.topological_order()
        except CycleDetectedError as exc:
            report.add("cycle", exc.path[0] if exc.path else "", str(exc))
        for node_id, kind in self.kinds.items():
            npt = self.npts.get(node_id)
            if npt is None:
                report.add("missing_npt", node_id, f"node {node_id!r} has no NPT")
                continue
            if isinstance(npt, Table):
                self._validate_table_coverage(node_id, npt, report)
            elif isinstance(npt, BinnedPrior):
                total = sum(npt.masses)
                if abs(total - 1.0) > 1e-6:
                    report.add(
                        "malformed_prior",
                        node_id,
                        f"binned prior masses sum to {total!r}",
                    )
            else:
                extra = parent_refs(npt) - set(self._parents[node_id])
                if extra:
                    report.add(
                        "unknown_parent_reference",
                        node_id,
                        f"references non-parents: {sorted(extra)}",
                    )
                self._validate_partitions(node_id, npt, report)
        return report

    def _validate_table_coverage(
        self, node_id: str, table: Table, report: ValidationReport
    ) -> None:
        expected = list(
            itertools.product(*(self.kinds[p].states for p in table.parents))
        )
        have = {config for config, _ in table.columns}
        for config in expected:
            if tuple(config) not in have:
                report.add(
                    "table_gap",
                    node_id,
                    f"table missing parent configuration {tuple(config)}",
                )
        for config in have:
            if tuple(config) not in {tuple(c) for c in expected}:
                report.add(
                    "table_extra",
                    node_id,
                    f"table has column for impossible configuration {config}",
                )

    def _validate_partitions(
        self, node_id: str, expr: Expr, report: ValidationReport
    ) -> None:
        for part in _partitions_in(expr):
            parent = part.parent
            if parent not in self._parents[node_id]:
                continue  # already reported as unknown_parent_reference
            kind = self.kinds[parent]
            if not is_discrete(kind):
                report.add(
                    "partition_parent",
                    node_id,
                    f"partition parent {parent!r} is continuous",
                )
                continue
            want = set(kind.states)
            have = {s for s, _ in part.cases}
            for missing in sorted(want - have):
                report.add(
                    "partition_gap",
                    node_id,
                    f"partition over {parent!r} misses state {missing!r}",
                )
            for extra in sorted(have - want):
                report.add(
                    "partition_extra",
                    node_id,
                    f"partition over {parent!r} has unknown state {extra!r}",
                )

    # misc -----------------------------------------------------------------------

    def copy(self) -> "Network":
        other = Network()
        other.kinds = dict(self.kinds)
        other._parents = {k: list(v) for k, v in self._parents.items()}
        other.npts = dict(self.npts)
        return other

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.kinds == other.kinds
            and self.edges() == other.edges()
            and self.npts == other.npts
        )

    def __repr__(self) -> str:
        return (
            f"Network({len(self.kinds)} nodes, {len(self.edges())} edges, "
            f"{len(self.npts)} NPTs)"
        )


def _partitions_in(expr: Expr) -> list[Partitioned]:
    from riskbn.nptlang.ast import BinOp, If, Wmean

    found: list[Partitioned] = []

    def walk(e: Expr) -> None:
        if isinstance(e, Partitioned):
            found.append(e)
            for _, sub in e.cases:
                walk(sub)
        elif isinstance(e, DistCall):
            for a in e.args:
                walk(a)
        elif isinstance(e, BinOp):
            walk(e.left)
            walk(e.right)
        elif isinstance(e, Wmean):
            for _, sub in e.terms:
                walk(sub)
        elif isinstance(e, If):
            for sub in (e.left, e.right, e.then, e.orelse):
                walk(sub)

    walk(expr)
    return found
