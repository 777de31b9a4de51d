"""Posterior summaries: binned marginals with interpolated statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from riskbn.errors import DomainError

_POINT_EPS = 1e-9


@dataclass
class PosteriorSummary:
    """Marginal of one node under evidence.

    Continuous nodes carry ``edges``/``masses``/``reps``; discrete nodes
    carry ``states``/``probs`` (ranked nodes additionally ``state_values``,
    their interval midpoints).  Summaries produced by the sampling oracle
    keep the raw weighted samples and compute statistics from them
    directly, independent of any grid.
    """

    node: str
    kind: str  # continuous | boolean | labelled | ranked
    edges: np.ndarray | None = None
    masses: np.ndarray | None = None
    reps: np.ndarray | None = None
    states: tuple[str, ...] | None = None
    probs: np.ndarray | None = None
    state_values: tuple[float, ...] | None = None
    warnings: tuple[str, ...] = ()
    ess: float | None = None
    _samples: np.ndarray | None = field(default=None, repr=False)
    _weights: np.ndarray | None = field(default=None, repr=False)

    # --- constructors ---------------------------------------------------------

    @classmethod
    def from_bins(
        cls, node: str, edges: np.ndarray, masses: np.ndarray, reps: np.ndarray
    ) -> "PosteriorSummary":
        masses = np.clip(np.asarray(masses, dtype=float), 0.0, None)
        total = masses.sum()
        if not np.isfinite(total) or total <= 0:
            raise DomainError(f"empty posterior for {node!r}")
        return cls(
            node=node,
            kind="continuous",
            edges=np.asarray(edges, dtype=float),
            masses=masses / total,
            reps=np.asarray(reps, dtype=float),
        )

    @classmethod
    def from_states(
        cls,
        node: str,
        kind: str,
        states: tuple[str, ...],
        probs: np.ndarray,
        state_values: tuple[float, ...] | None = None,
    ) -> "PosteriorSummary":
        probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
        total = probs.sum()
        if not np.isfinite(total) or total <= 0:
            raise DomainError(f"empty posterior for {node!r}")
        return cls(
            node=node,
            kind=kind,
            states=states,
            probs=probs / total,
            state_values=state_values,
        )

    @classmethod
    def from_weighted_samples(
        cls,
        node: str,
        samples: np.ndarray,
        weights: np.ndarray,
        lo: float,
        hi: float,
        bins: int = 64,
        warnings: tuple[str, ...] = (),
        ess: float | None = None,
    ) -> "PosteriorSummary":
        weights = np.asarray(weights, dtype=float)
        total = weights.sum()
        if not np.isfinite(total) or total <= 0:
            raise DomainError(f"all sample weights vanished for {node!r}")
        weights = weights / total
        span = hi - lo if hi > lo else 1.0
        edges = np.linspace(lo, lo + span, bins + 1)
        masses, _ = np.histogram(samples, bins=edges, weights=weights)
        mids = 0.5 * (edges[:-1] + edges[1:])
        sums, _ = np.histogram(samples, bins=edges, weights=weights * samples)
        with np.errstate(invalid="ignore", divide="ignore"):
            reps = np.where(masses > 0, sums / np.maximum(masses, 1e-300), mids)
        out = cls(
            node=node,
            kind="continuous",
            edges=edges,
            masses=masses / max(masses.sum(), 1e-300),
            reps=reps,
            warnings=warnings,
            ess=ess,
        )
        out._samples = np.asarray(samples, dtype=float)
        out._weights = weights
        return out

    # --- statistics -----------------------------------------------------------

    @property
    def is_point(self) -> bool:
        if self.kind != "continuous" or self.masses is None:
            return False
        return bool(np.max(self.masses) >= 1.0 - _POINT_EPS)

    @property
    def point_value(self) -> float | None:
        if not self.is_point:
            return None
        return float(self.reps[int(np.argmax(self.masses))])

    @property
    def mean(self) -> float:
        if self._samples is not None:
            return float(np.sum(self._samples * self._weights))
        if self.kind == "continuous":
            return float(np.sum(self.masses * self.reps))
        values = self._discrete_values()
        return float(np.sum(self.probs * values))

    @property
    def median(self) -> float:
        return self.percentile(0.5)

    def percentile(self, q: float) -> float:
        if not 0.0 <= q <= 1.0:
            raise DomainError(f"percentile needs q in [0, 1], got {q}")
        if self._samples is not None:
            order = np.argsort(self._samples, kind="stable")
            cum = np.cumsum(self._weights[order])
            idx = int(np.searchsorted(cum, q * cum[-1], side="left"))
            idx = min(idx, len(order) - 1)
            return float(self._samples[order[idx]])
        if self.kind == "continuous":
            if self.is_point:
                return float(self.point_value)
            cum = np.cumsum(self.masses)
            idx = int(np.searchsorted(cum, q, side="left"))
            idx = min(idx, len(self.masses) - 1)
            before = cum[idx] - self.masses[idx]
            width = self.edges[idx + 1] - self.edges[idx]
            frac = 0.0 if self.masses[idx] <= 0 else (q - before) / self.masses[idx]
            return float(self.edges[idx] + min(max(frac, 0.0), 1.0) * width)
        values = self._discrete_values()
        cum = np.cumsum(self.probs)
        idx = int(np.searchsorted(cum, q, side="left"))
        return float(values[min(idx, len(values) - 1)])

    def prob_leq(self, threshold: float) -> float:
        """P(X <= threshold), interpolating linearly inside the cut bin."""
        if self._samples is not None:
            return float(np.sum(self._weights[self._samples <= threshold]))
        if self.kind == "continuous":
            if self.is_point:
                return 1.0 if self.point_value <= threshold else 0.0
            if threshold < self.edges[0]:
                return 0.0
            if threshold >= self.edges[-1]:
                return 1.0
            idx = int(np.searchsorted(self.edges, threshold, side="right") - 1)
            idx = min(max(idx, 0), len(self.masses) - 1)
            before = float(np.sum(self.masses[:idx]))
            width = self.edges[idx + 1] - self.edges[idx]
            frac = (threshold - self.edges[idx]) / width if width > 0 else 1.0
            return float(before + self.masses[idx] * min(max(frac, 0.0), 1.0))
        values = self._discrete_values()
        return float(np.sum(self.probs[values <= threshold]))

    def probability(self, label: str) -> float:
        if self.states is None:
            raise DomainError(f"{self.node!r} is continuous; no state probabilities")
        if label not in self.states:
            raise DomainError(f"{self.node!r} has no state {label!r}")
        return float(self.probs[self.states.index(label)])

    def _discrete_values(self) -> np.ndarray:
        if self.state_values is not None:
            return np.asarray(self.state_values, dtype=float)
        raise DomainError(
            f"{self.node!r} has no numeric state values (labelled node)"
        )

    @property
    def total_mass(self) -> float:
        if self.kind == "continuous":
            return float(np.sum(self.masses))
        return float(np.sum(self.probs))
