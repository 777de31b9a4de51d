"""Brute-force enumeration oracle for discrete-only networks."""

from __future__ import annotations

import itertools

import numpy as np

from riskbn.bn import Continuous, Labelled, Network, Ranked, Table
from riskbn.errors import (
    DomainError,
    InconsistentEvidenceError,
    StateSpaceTooLargeError,
    UnknownNodeError,
)
from riskbn.inference.compiler import CompiledNetwork, compile_network
from riskbn.inference.evidence import Evidence, StateObservation
from riskbn.inference.factors import multiply_all, reduce_index, sum_out
from riskbn.inference.summary import PosteriorSummary

MAX_JOINT = 10_000_000


def enumerate_exact(
    net: Network, evidence: Evidence | None, target: str
) -> PosteriorSummary:
    """Posterior by materializing the full joint; discrete nodes only."""
    for name, kind in net.kinds.items():
        if isinstance(kind, Continuous):
            raise DomainError(
                f"enumerate_exact needs a discrete-only network; "
                f"{name!r} is continuous"
            )
    size = 1
    for kind in net.kinds.values():
        size *= len(kind.states)
        if size > MAX_JOINT:
            raise StateSpaceTooLargeError(
                f"joint state space exceeds {MAX_JOINT:,} states"
            )
    evidence = dict(evidence or {})
    for name in list(evidence) + [target]:
        if name not in net.kinds:
            raise UnknownNodeError(f"unknown node {name!r}")

    cnet = compile_network(net)
    joint = multiply_all(list(cnet.factors.values()))

    for name, obs in evidence.items():
        if not isinstance(obs, StateObservation):
            raise DomainError(
                "enumerate_exact accepts StateObservation evidence only"
            )
        states = net.kinds[name].states
        if obs.label not in states:
            raise DomainError(f"{name!r} has no state {obs.label!r}")
        joint = reduce_index(joint, name, states.index(obs.label))

    for var in [v for v in joint.vars if v != target]:
        joint = sum_out(joint, var)

    values = joint.values if joint.vars == (target,) else np.atleast_1d(joint.values)
    total = float(values.sum())
    if not np.isfinite(total) or total <= 0:
        raise InconsistentEvidenceError("evidence has probability zero")
    probs = values / total

    kind = net.kinds[target]
    if target in evidence:
        probs = np.zeros(len(kind.states))
        probs[kind.states.index(evidence[target].label)] = 1.0
    values_axis = kind.scale.midpoints if isinstance(kind, Ranked) else None
    return PosteriorSummary.from_states(
        target,
        "ranked" if isinstance(kind, Ranked) else type(kind).__name__.lower(),
        kind.states,
        probs,
        values_axis,
    )


def discretize_to_network(cnet: CompiledNetwork) -> Network:
    """Replace every continuous node by a labelled node over its bins.

    The resulting discrete network carries exactly the compiled factors as
    explicit tables, so enumerate_exact on it must agree with posterior()
    on the compiled original to machine precision.
    """
    out = Network()
    state_names: dict[str, tuple[str, ...]] = {}
    for name in cnet.order:
        cnode = cnet.nodes[name]
        if cnode.grid is not None:
            states = tuple(f"bin{i}" for i in range(cnode.grid.bins))
        else:
            states = cnode.states
        state_names[name] = states
        out.add_node(name, Labelled(states) if len(states) >= 2 else Labelled(states))
    for name in cnet.order:
        for p in cnet.network.parents(name):
            out.add_edge(p, name)
    for name in cnet.order:
        factor = cnet.factors[name]
        parents = tuple(factor.vars[:-1])
        columns = []
        parent_states = [state_names[p] for p in parents]
        configs = (
            itertools.product(*(range(len(s)) for s in parent_states))
            if parents
            else [()]
        )
        for config in configs:
            probs = factor.values[tuple(config)]
            key = tuple(parent_states[i][c] for i, c in enumerate(config))
            total = float(probs.sum())
            columns.append((key, tuple(float(p) / total for p in probs)))
        out.set_npt(name, Table(parents, tuple(columns)))
    return out
