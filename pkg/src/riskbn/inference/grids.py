"""Discretization grids and grid policies.

A grid is a strictly increasing set of bin edges spanning a node's
domain plus one representative value per bin.  Representatives start as
bin midpoints and are replaced during compilation by mass-weighted
conditional means, which is what keeps posterior means sharp on coarse
grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from riskbn.errors import GridOverflowError
from riskbn.nptlang.ast import DistCall, Expr, Num

MAX_BINS = 256
MIN_BINS = 2


@dataclass
class Grid:
    edges: np.ndarray
    reps: np.ndarray

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        diffs = np.diff(self.edges)
        if len(self.edges) < MIN_BINS + 1 or np.any(diffs <= 0):
            raise GridOverflowError(
                "grid needs at least 2 strictly increasing bins"
            )
        if self.bins > MAX_BINS:
            raise GridOverflowError(f"{self.bins} bins exceed the {MAX_BINS} cap")
        self.reps = np.asarray(self.reps, dtype=float)

    @property
    def bins(self) -> int:
        return len(self.edges) - 1

    @property
    def lo(self) -> float:
        return float(self.edges[0])

    @property
    def hi(self) -> float:
        return float(self.edges[-1])

    def locate(self, value: float) -> int:
        """Bin index containing ``value`` (clamped to the domain)."""
        v = min(max(value, self.lo), self.hi)
        idx = int(np.searchsorted(self.edges, v, side="right") - 1)
        return min(max(idx, 0), self.bins - 1)


@dataclass(frozen=True)
class GridSpec:
    """Per-node grid request.

    ``scheme``:
      * ``uniform``      equal-width bins over the domain
      * ``probability``  geometric spacing at both ends of [0, 1] so that
                         small probabilities and near-certainties both
                         resolve; ``floor`` sets the finest edge and
                         ``hi_bins`` how many bins go to the upper end
    ``extra_edges`` are inserted verbatim (acceptability thresholds go
    here so indicator NPTs cut exactly at the criterion).
    ``edges`` overrides everything (used by refinement).
    """

    bins: int | None = None
    scheme: str = "uniform"
    floor: float = 1e-8
    hi_bins: int = 16
    extra_edges: tuple[float, ...] = ()
    edges: tuple[float, ...] | None = None


@dataclass(frozen=True)
class GridPolicy:
    default_bins: int = 64
    default_scheme: str = "uniform"
    count_max_bins: int = MAX_BINS
    overrides: Mapping[str, GridSpec] = field(default_factory=dict)

    def spec_for(self, node: str) -> GridSpec:
        spec = self.overrides.get(node)
        if spec is None:
            return GridSpec(bins=self.default_bins, scheme=self.default_scheme)
        if spec.bins is None and spec.edges is None:
            spec = GridSpec(
                bins=self.default_bins,
                scheme=spec.scheme,
                floor=spec.floor,
                hi_bins=spec.hi_bins,
                extra_edges=spec.extra_edges,
                edges=spec.edges,
            )
        return spec


def uniform_edges(lo: float, hi: float, bins: int) -> np.ndarray:
    return np.linspace(lo, hi, bins + 1)


def probability_edges(bins: int, floor: float = 1e-8, hi_bins: int = 16) -> np.ndarray:
    """Two-sided geometric edges on [0, 1]."""
    hi_bins = min(hi_bins, bins - 2)
    low = np.geomspace(floor, 0.5, bins - hi_bins)
    high = 1.0 - np.geomspace(floor, 0.5, hi_bins)[::-1]
    return np.concatenate(([0.0], low, high[1:], [1.0]))


def count_edges(n: int, max_bins: int = MAX_BINS) -> np.ndarray:
    """Integer bins up to ``n``; equal integer ranges beyond ``max_bins``."""
    if n + 1 <= max_bins:
        inner = np.arange(n) + 0.5
        return np.concatenate(([0.0], inner, [float(n)]))
    # quantile bins of the flat prior predictive (uniform over 0..n):
    # equal-count integer ranges
    bounds = np.unique(np.round(np.linspace(0, n, max_bins + 1)).astype(int))
    edges = bounds.astype(float)
    edges[1:-1] -= 0.5
    return edges


def insert_edges(edges: np.ndarray, extra: tuple[float, ...]) -> np.ndarray:
    if not extra:
        return edges
    lo, hi = edges[0], edges[-1]
    add = [e for e in extra if lo < e < hi]
    merged = np.union1d(edges, np.asarray(add, dtype=float))
    # drop near-duplicate edges that would create zero-width bins
    keep = [0]
    for i in range(1, len(merged)):
        if merged[i] - merged[keep[-1]] > 1e-15 * max(1.0, abs(merged[i])):
            keep.append(i)
    out = merged[keep]
    out[0], out[-1] = lo, hi
    return out


def binomial_constant_n(npt: Expr | object) -> int | None:
    """The constant n of a Binomial NPT, or None if not a count node."""
    if isinstance(npt, DistCall) and npt.name == "binomial":
        n_expr = npt.args[0]
        if isinstance(n_expr, Num) and abs(n_expr.value - round(n_expr.value)) < 1e-9:
            return int(round(n_expr.value))
    return None


def resolve_edges(
    node: str,
    lo: float,
    hi: float,
    npt,
    policy: GridPolicy,
) -> np.ndarray:
    """Edges for a continuous node under the policy."""
    spec = policy.spec_for(node)
    if spec.edges is not None:
        return insert_edges(np.asarray(spec.edges, dtype=float), spec.extra_edges)

    n = binomial_constant_n(npt)
    if n is not None:
        return count_edges(max(n, 1), policy.count_max_bins)

    bins = spec.bins or policy.default_bins
    if bins > MAX_BINS:
        raise GridOverflowError(f"{bins} bins exceed the {MAX_BINS} cap")
    if spec.scheme == "probability":
        if abs(lo) > 1e-12 or abs(hi - 1.0) > 1e-12:
            raise GridOverflowError(
                f"probability grid requires a [0, 1] domain, node {node!r} "
                f"has [{lo}, {hi}]"
            )
        edges = probability_edges(bins, spec.floor, spec.hi_bins)
    else:
        edges = uniform_edges(lo, hi, bins)
    return insert_edges(edges, spec.extra_edges)
