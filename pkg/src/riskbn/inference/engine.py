"""Posterior queries by exact factor elimination on the discretized model."""

from __future__ import annotations

import numpy as np

from riskbn.bn import Ranked
from riskbn.errors import (
    DomainError,
    InconsistentEvidenceError,
    UnknownNodeError,
)
from riskbn.inference.compiler import CompiledNetwork
from riskbn.inference.evidence import (
    CountObservation,
    Evidence,
    StateObservation,
    ValueObservation,
)
from riskbn.inference.factors import Factor, multiply_all, reduce_index, sum_out
from riskbn.inference.grids import binomial_constant_n
from riskbn.inference.summary import PosteriorSummary
from riskbn.nptlang.ast import Ref
from riskbn.nptlang.dists import binomial_logpmf


def posterior(
    cnet: CompiledNetwork, evidence: Evidence | None, target: str
) -> PosteriorSummary:
    """Exact marginal of ``target`` under evidence, by factor elimination
    in a min-degree order (ties broken lexicographically)."""
    evidence = dict(evidence or {})
    for name in list(evidence) + [target]:
        if name not in cnet.nodes:
            raise UnknownNodeError(f"unknown node {name!r}")

    pins = {
        n: obs.value
        for n, obs in evidence.items()
        if isinstance(obs, ValueObservation)
    }
    if pins:
        cnet = cnet.with_pinned(pins)

    if target in evidence:
        return _observed_summary(cnet, target, evidence[target])

    factors = _reduced_factors(cnet, evidence)
    marginal = _eliminate(factors, target)

    values = marginal.values
    total = float(values.sum())
    if not np.isfinite(total) or total <= 0:
        raise InconsistentEvidenceError(
            f"evidence has probability zero (querying {target!r})"
        )
    probs = values / total

    cnode = cnet.nodes[target]
    if cnode.grid is not None:
        return PosteriorSummary.from_bins(
            target, cnode.grid.edges, probs, cnode.grid.reps
        )
    kind = (
        "ranked"
        if isinstance(cnode.kind, Ranked)
        else type(cnode.kind).__name__.lower()
    )
    return PosteriorSummary.from_states(
        target, kind, cnode.states, probs, cnode.state_values
    )


def _observed_summary(cnet, target, obs) -> PosteriorSummary:
    """A node observed directly is a point mass at the observation."""
    cnode = cnet.nodes[target]
    if isinstance(obs, StateObservation):
        if cnode.states is None or obs.label not in cnode.states:
            raise DomainError(f"{target!r} has no state {obs.label!r}")
        probs = np.zeros(len(cnode.states))
        probs[cnode.states.index(obs.label)] = 1.0
        kind = (
            "ranked"
            if isinstance(cnode.kind, Ranked)
            else type(cnode.kind).__name__.lower()
        )
        return PosteriorSummary.from_states(
            target, kind, cnode.states, probs, cnode.state_values
        )
    if cnode.grid is None:
        raise DomainError(f"{target!r} is discrete; use StateObservation")
    value = obs.value if isinstance(obs, ValueObservation) else float(obs.count)
    if not cnode.grid.lo <= value <= cnode.grid.hi:
        raise DomainError(f"value {value!r} outside the domain of {target!r}")
    idx = cnode.grid.locate(value)
    masses = np.zeros(cnode.grid.bins)
    masses[idx] = 1.0
    reps = cnode.grid.reps.copy()
    reps[idx] = value
    return PosteriorSummary.from_bins(target, cnode.grid.edges, masses, reps)


def _reduced_factors(
    cnet: CompiledNetwork, evidence: Evidence
) -> list[Factor]:
    """Apply evidence to the compiled factors."""
    replaced: dict[str, Factor | None] = {}

    for name, obs in evidence.items():
        cnode = cnet.nodes[name]
        if isinstance(obs, StateObservation):
            if cnode.states is None:
                raise DomainError(
                    f"{name!r} is continuous; use ValueObservation"
                )
            if obs.label not in cnode.states:
                raise DomainError(f"{name!r} has no state {obs.label!r}")
        elif isinstance(obs, ValueObservation):
            if cnode.grid is None:
                raise DomainError(f"{name!r} is discrete; use StateObservation")
            if not cnode.grid.lo <= obs.value <= cnode.grid.hi:
                raise DomainError(
                    f"value {obs.value!r} outside the domain of {name!r}"
                )
        elif isinstance(obs, CountObservation):
            npt = cnet.network.npts.get(name)
            n = binomial_constant_n(npt)
            if n is None:
                raise DomainError(
                    f"{name!r} is not a Binomial count node; "
                    "CountObservation does not apply"
                )
            if not 0 <= obs.count <= n:
                raise DomainError(
                    f"count {obs.count} outside [0, {n}] for {name!r}"
                )
        else:
            raise DomainError(f"unsupported observation {obs!r}")

    # count nodes that are leaves reduce to an exact pmf likelihood on the
    # parent probability node; everything else reduces its bin/state axis
    children: dict[str, int] = {n: 0 for n in cnet.nodes}
    for child in cnet.nodes:
        for p in cnet.network.parents(child):
            children[p] += 1

    factors: list[Factor] = []
    likelihoods: list[Factor] = []
    axis_cut: dict[str, int] = {}

    for name, obs in evidence.items():
        cnode = cnet.nodes[name]
        if isinstance(obs, StateObservation):
            axis_cut[name] = cnode.states.index(obs.label)
        elif isinstance(obs, ValueObservation):
            axis_cut[name] = cnode.grid.locate(obs.value)
        elif isinstance(obs, CountObservation):
            npt = cnet.network.npts[name]
            n = binomial_constant_n(npt)
            p_expr = npt.args[1]
            if (
                children[name] == 0
                and isinstance(p_expr, Ref)
                and cnet.nodes[p_expr.node].grid is not None
            ):
                parent = p_expr.node
                reps = cnet.nodes[parent].grid.reps
                loglik = binomial_logpmf(obs.count, n, reps)
                peak = np.max(loglik)
                if not np.isfinite(peak):
                    raise InconsistentEvidenceError(
                        f"count evidence on {name!r} has zero likelihood"
                    )
                likelihoods.append(Factor((parent,), np.exp(loglik - peak)))
                replaced[name] = None  # drop the count node's own factor
            else:
                axis_cut[name] = cnode.grid.locate(float(obs.count))

    for name, factor in cnet.factors.items():
        if name in replaced:
            continue
        f = factor
        for var in factor.vars:
            if var in axis_cut:
                f = reduce_index(f, var, axis_cut[var])
        if f.vars:
            peak = float(np.max(f.values))
            if peak > 0 and (peak < 1e-30 or peak > 1e30):
                f = Factor(f.vars, f.values / peak)
            factors.append(f)
        else:
            scalar = float(f.values)
            if scalar <= 0:
                raise InconsistentEvidenceError(
                    "evidence has probability zero"
                )
    factors.extend(likelihoods)
    return factors


def _eliminate(factors: list[Factor], target: str) -> Factor:
    """Sum-product elimination of everything but ``target``."""
    all_vars = sorted({v for f in factors for v in f.vars})
    if target not in all_vars:
        raise UnknownNodeError(
            f"target {target!r} does not appear in any factor"
        )

    # interaction graph for the min-degree heuristic
    neighbors: dict[str, set[str]] = {v: set() for v in all_vars}
    for f in factors:
        for a in f.vars:
            for b in f.vars:
                if a != b:
                    neighbors[a].add(b)

    remaining = [v for v in all_vars if v != target]
    working = list(factors)

    while remaining:
        var = min(remaining, key=lambda v: (len(neighbors[v]), v))
        remaining.remove(var)

        involved = [f for f in working if var in f.vars]
        working = [f for f in working if var not in f.vars]
        if involved:
            product = multiply_all(involved)
            working.append(sum_out(product, var))

        for a in neighbors[var]:
            neighbors[a].discard(var)
        fill = sorted(neighbors[var])
        for i, a in enumerate(fill):
            for b in fill[i + 1 :]:
                neighbors[a].add(b)
                neighbors[b].add(a)
        del neighbors[var]

    result = multiply_all(working)
    if result.vars != (target,):
        # disconnected scalar components multiply in as constants
        extra = [v for v in result.vars if v != target]
        for v in extra:
            result = sum_out(result, v)
    return result
