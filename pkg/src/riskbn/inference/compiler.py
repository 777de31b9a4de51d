"""Compilation of a validated network into a discretized factor model.

Compilation walks the DAG in topological order.  Every continuous node
gets a grid; every NPT is materialized as a conditional probability
factor over the discretized parent/child states.  While walking we also
maintain each node's prior marginal (using the product of its parents'
marginals as the configuration weight), which serves two purposes:

* continuous bins receive mass-weighted representative values, so means
  survive discretization essentially untouched;
* deterministic child nodes place their (exact) values into bins whose
  representatives reflect the values that actually landed there.

Compilation is deterministic given the network and grid policy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from riskbn.bn import BinnedPrior, Continuous, Network, Ranked, Table
from riskbn.errors import DomainError, ValidationFailedError
from riskbn.inference.factors import Factor
from riskbn.inference.grids import Grid, GridPolicy, resolve_edges
from riskbn.nptlang.ast import DistCall, Expr, Partitioned, StateLabel
from riskbn.nptlang.ast import is_deterministic as expr_is_deterministic
from riskbn.nptlang.evaluate import eval_density, eval_value, vector_value

_ZERO = 1e-300


@dataclass
class CompiledNode:
    name: str
    kind: object
    grid: Grid | None = None  # continuous nodes
    states: tuple[str, ...] | None = None  # discrete nodes
    state_values: tuple[float, ...] | None = None  # ranked midpoints

    @property
    def size(self) -> int:
        if self.grid is not None:
            return self.grid.bins
        return len(self.states)


@dataclass
class CompiledNetwork:
    """Immutable snapshot of a network discretized under a grid policy."""

    network: Network
    policy: GridPolicy
    order: tuple[str, ...]
    nodes: dict[str, CompiledNode]
    factors: dict[str, Factor]
    marginals: dict[str, np.ndarray]
    pinned: dict[str, float] = field(default_factory=dict)
    custom_edges: dict[str, tuple[float, ...]] = field(default_factory=dict)
    refinement: object | None = None

    def node(self, name: str) -> CompiledNode:
        return self.nodes[name]

    @property
    def max_bins(self) -> int:
        sizes = [n.grid.bins for n in self.nodes.values() if n.grid is not None]
        return max(sizes) if sizes else 0

    def with_pinned(self, values: Mapping[str, float]) -> "CompiledNetwork":
        """Recompile with continuous nodes pinned at exact observed values."""
        merged = dict(self.pinned)
        merged.update({k: float(v) for k, v in values.items()})
        if merged == self.pinned:
            return self
        return compile_network(
            self.network,
            self.policy,
            pinned=merged,
            custom_edges=self.custom_edges,
        )


def _parent_axis(cnode: CompiledNode):
    """(numeric values, state labels) arrays indexing a parent's axis."""
    if cnode.grid is not None:
        return cnode.grid.reps, None
    labels = cnode.states
    values = cnode.state_values
    return (np.asarray(values, dtype=float) if values is not None else None), labels


def compile_network(
    net: Network,
    policy: GridPolicy | None = None,
    *,
    pinned: Mapping[str, float] | None = None,
    custom_edges: Mapping[str, tuple[float, ...]] | None = None,
) -> CompiledNetwork:
    """Discretize a validated network into factors.

    ``pinned`` maps continuous nodes to exact observed values: the
    containing bin's representative is replaced by the value so that
    descendants condition on it exactly.  ``custom_edges`` overrides grid
    edges per node (refinement uses this).
    """
    policy = policy or GridPolicy()
    report = net.validate()
    if not report.ok:
        raise ValidationFailedError(
            "; ".join(v.message for v in report.violations)
        )
    pinned = dict(pinned or {})
    custom_edges = dict(custom_edges or {})

    order = net.topological_order()
    nodes: dict[str, CompiledNode] = {}
    factors: dict[str, Factor] = {}
    marginals: dict[str, np.ndarray] = {}

    for name in order:
        kind = net.kinds[name]
        npt = net.npts[name]
        parents = net.parents(name)
        parent_nodes = [nodes[p] for p in parents]

        if isinstance(kind, Continuous):
            if name in custom_edges:
                edges = np.asarray(custom_edges[name], dtype=float)
            else:
                edges = resolve_edges(name, kind.lo, kind.hi, npt, policy)
            cpt, marginal, reps = _compile_continuous(
                name, npt, edges, parents, parent_nodes, marginals
            )
            if name in pinned:
                grid = Grid(edges, reps)
                idx = grid.locate(pinned[name])
                v = min(max(pinned[name], grid.lo), grid.hi)
                reps = reps.copy()
                reps[idx] = v
            cnode = CompiledNode(name, kind, grid=Grid(edges, reps))
        else:
            states = kind.states
            values = (
                kind.scale.midpoints if isinstance(kind, Ranked) else None
            )
            cpt, marginal = _compile_discrete(
                name, kind, npt, states, parents, parent_nodes, marginals, net
            )
            cnode = CompiledNode(
                name, kind, states=states, state_values=values
            )

        nodes[name] = cnode
        factor_vars = tuple(parents) + (name,)
        cpt.flags.writeable = False
        factors[name] = Factor(factor_vars, cpt)
        marginals[name] = marginal

    return CompiledNetwork(
        network=net,
        policy=policy,
        order=tuple(order),
        nodes=nodes,
        factors=factors,
        marginals=marginals,
        pinned=pinned,
        custom_edges=custom_edges,
    )


# --- continuous children ------------------------------------------------------


def _config_weights(parent_nodes, marginals):
    """Outer product of parent prior marginals, shaped like the parent axes."""
    weight = np.array(1.0)
    for p in parent_nodes:
        weight = np.multiply.outer(weight, marginals[p.name])
    return weight


def _compile_continuous(
    name: str,
    npt,
    edges: np.ndarray,
    parents: tuple[str, ...],
    parent_nodes: list[CompiledNode],
    marginals: dict[str, np.ndarray],
):
    bins = len(edges) - 1
    mids = 0.5 * (edges[:-1] + edges[1:])

    if isinstance(npt, BinnedPrior):
        if tuple(np.round(npt.edges, 15)) != tuple(np.round(edges, 15)):
            # re-bin the prior onto the requested grid by mass-preserving
            # overlap, carrying representative values through
            cpt, reps = _rebin_prior(npt, edges)
        else:
            cpt = np.asarray(npt.masses, dtype=float)
            reps = np.asarray(npt.reps, dtype=float)
        total = cpt.sum()
        cpt = cpt / total
        return cpt, cpt.copy(), reps

    if isinstance(npt, Table):
        raise DomainError(f"explicit tables are for discrete nodes, not {name!r}")

    expr: Expr = npt
    weight = _config_weights(parent_nodes, marginals)
    shape = tuple(p.size for p in parent_nodes) + (bins,)
    cpt = np.zeros(shape)
    mass_acc = np.zeros(bins)
    value_acc = np.zeros(bins)

    disc_parents = [p for p in parent_nodes if p.states is not None]
    cont_parents = [p for p in parent_nodes if p.grid is not None]
    deterministic = expr_is_deterministic(expr)

    disc_state_iter = (
        itertools.product(*(range(len(p.states)) for p in disc_parents))
        if disc_parents
        else [()]
    )

    for disc_idx in disc_state_iter:
        labs = {
            p.name: p.states[i] for p, i in zip(disc_parents, disc_idx)
        }
        nums_fixed = {
            p.name: (
                float(p.state_values[i]) if p.state_values is not None else None
            )
            for p, i in zip(disc_parents, disc_idx)
        }
        nums_fixed = {k: v for k, v in nums_fixed.items() if v is not None}

        if deterministic and cont_parents:
            # vectorized over the continuous parents' representative meshgrid
            grids = np.meshgrid(
                *(p.grid.reps for p in cont_parents), indexing="ij"
            )
            arrays = dict(nums_fixed)
            arrays.update(
                {p.name: g for p, g in zip(cont_parents, grids)}
            )
            vals = np.broadcast_to(
                np.asarray(vector_value(expr, arrays, labs), dtype=float),
                grids[0].shape,
            )
            vals = np.clip(vals, edges[0], edges[-1])
            bin_idx = np.clip(
                np.searchsorted(edges, vals, side="right") - 1, 0, bins - 1
            )
            _scatter_deterministic(
                cpt,
                parent_nodes,
                disc_parents,
                disc_idx,
                cont_parents,
                bin_idx,
                vals,
                weight,
                mass_acc,
                value_acc,
            )
            continue

        cont_iter = (
            itertools.product(*(range(p.grid.bins) for p in cont_parents))
            if cont_parents
            else [()]
        )
        for cont_idx in cont_iter:
            nums = dict(nums_fixed)
            nums.update(
                {
                    p.name: float(p.grid.reps[i])
                    for p, i in zip(cont_parents, cont_idx)
                }
            )
            dist = eval_density(expr, nums, edges, labs)
            full_idx = _full_index(
                parent_nodes, disc_parents, disc_idx, cont_parents, cont_idx
            )
            cpt[full_idx] = dist.masses
            w = float(weight[full_idx]) if weight.ndim else float(weight)
            mass_acc += w * dist.masses
            value_acc += w * dist.masses * dist.bin_values

    total = mass_acc.sum()
    marginal = mass_acc / total if total > 0 else np.full(bins, 1.0 / bins)
    with np.errstate(invalid="ignore", divide="ignore"):
        reps = np.where(
            mass_acc > _ZERO, value_acc / np.maximum(mass_acc, _ZERO), mids
        )
    reps = np.clip(reps, edges[:-1], edges[1:])
    return cpt, marginal, reps


def _full_index(parent_nodes, disc_parents, disc_idx, cont_parents, cont_idx):
    disc_map = {p.name: i for p, i in zip(disc_parents, disc_idx)}
    cont_map = {p.name: i for p, i in zip(cont_parents, cont_idx)}
    return tuple(
        disc_map[p.name] if p.name in disc_map else cont_map[p.name]
        for p in parent_nodes
    )


def _scatter_deterministic(
    cpt,
    parent_nodes,
    disc_parents,
    disc_idx,
    cont_parents,
    bin_idx,
    vals,
    weight,
    mass_acc,
    value_acc,
):
    """Write one-hot rows for a deterministic child over continuous parents."""
    disc_map = {p.name: i for p, i in zip(disc_parents, disc_idx)}
    # slice of the cpt for the fixed discrete parent states
    slicer = tuple(
        disc_map[p.name] if p.name in disc_map else slice(None)
        for p in parent_nodes
    )
    view = cpt[slicer]  # shape: cont parent sizes + (bins,)
    # the cont-parent axes of `view` are ordered as in parent_nodes
    cont_order = [p for p in parent_nodes if p.grid is not None]
    perm = [cont_parents.index(p) for p in cont_order]
    idx_arr = np.transpose(bin_idx, perm) if bin_idx.ndim > 1 else bin_idx
    val_arr = np.transpose(vals, perm) if vals.ndim > 1 else vals

    grid_ix = np.indices(idx_arr.shape)
    view[(*grid_ix, idx_arr)] = 1.0

    w = weight[slicer] if weight.ndim else np.asarray(weight)
    w_arr = np.broadcast_to(w, idx_arr.shape)
    np.add.at(mass_acc, idx_arr.ravel(), w_arr.ravel())
    np.add.at(value_acc, idx_arr.ravel(), (w_arr * val_arr).ravel())


def _rebin_prior(npt: BinnedPrior, edges: np.ndarray):
    old_edges = np.asarray(npt.edges, dtype=float)
    old_masses = np.asarray(npt.masses, dtype=float)
    old_reps = np.asarray(npt.reps, dtype=float)
    bins = len(edges) - 1
    masses = np.zeros(bins)
    values = np.zeros(bins)
    for i in range(len(old_masses)):
        a, b = old_edges[i], old_edges[i + 1]
        m, rep = old_masses[i], old_reps[i]
        if m <= 0:
            continue
        lo_idx = np.searchsorted(edges, a, side="right") - 1
        hi_idx = np.searchsorted(edges, b, side="left") - 1
        lo_idx = int(np.clip(lo_idx, 0, bins - 1))
        hi_idx = int(np.clip(hi_idx, 0, bins - 1))
        if lo_idx == hi_idx:
            masses[lo_idx] += m
            values[lo_idx] += m * rep
            continue
        # split mass uniformly across overlapped bins
        for j in range(lo_idx, hi_idx + 1):
            seg_lo = max(a, edges[j])
            seg_hi = min(b, edges[j + 1])
            if seg_hi <= seg_lo:
                continue
            frac = (seg_hi - seg_lo) / (b - a)
            masses[j] += m * frac
            values[j] += m * frac * 0.5 * (seg_lo + seg_hi)
    mids = 0.5 * (edges[:-1] + edges[1:])
    with np.errstate(invalid="ignore", divide="ignore"):
        reps = np.where(masses > _ZERO, values / np.maximum(masses, _ZERO), mids)
    reps = np.clip(reps, edges[:-1], edges[1:])
    return masses, reps


# --- discrete children ---------------------------------------------------------


def _compile_discrete(
    name: str,
    kind,
    npt,
    states: tuple[str, ...],
    parents: tuple[str, ...],
    parent_nodes: list[CompiledNode],
    marginals: dict[str, np.ndarray],
    net: Network,
):
    n_states = len(states)
    shape = tuple(p.size for p in parent_nodes) + (n_states,)
    cpt = np.zeros(shape)
    weight = _config_weights(parent_nodes, marginals)
    marginal_acc = np.zeros(n_states)

    if isinstance(npt, Table):
        col_map = npt.column_map()
        table_parents = npt.parents
        configs = (
            itertools.product(*(range(p.size) for p in parent_nodes))
            if parents
            else [()]
        )
        for config in configs:
            labels = {
                p.name: p.states[i] for p, i in zip(parent_nodes, config)
            }
            key = tuple(labels[tp] for tp in table_parents)
            probs = np.asarray(col_map[key], dtype=float)
            probs = probs / probs.sum()
            cpt[config] = probs
            w = float(weight[config]) if weight.ndim else float(weight)
            marginal_acc += w * probs
        return cpt, marginal_acc / marginal_acc.sum()

    if isinstance(npt, BinnedPrior):
        raise DomainError(f"binned priors are for continuous nodes, not {name!r}")

    expr: Expr = npt
    ranked_edges = (
        np.asarray(kind.scale.edges, dtype=float)
        if isinstance(kind, Ranked)
        else None
    )

    configs = (
        itertools.product(*(range(p.size) for p in parent_nodes))
        if parents
        else [()]
    )
    for config in configs:
        nums: dict[str, float] = {}
        labs: dict[str, str] = {}
        for p, i in zip(parent_nodes, config):
            if p.grid is not None:
                nums[p.name] = float(p.grid.reps[i])
            else:
                labs[p.name] = p.states[i]
                if p.state_values is not None:
                    nums[p.name] = float(p.state_values[i])
        if ranked_edges is not None and not _is_label_valued(expr, labs):
            dist = eval_density(expr, nums, ranked_edges, labs)
            probs = dist.masses
        else:
            out = eval_value(expr, nums, labs)
            if isinstance(out, str):
                if out not in states:
                    raise DomainError(
                        f"expression for {name!r} produced unknown state {out!r}"
                    )
                probs = np.zeros(n_states)
                probs[states.index(out)] = 1.0
            else:
                raise DomainError(
                    f"expression for discrete node {name!r} must produce a "
                    f"state label, got numeric {out!r}"
                )
        cpt[config] = probs
        w = float(weight[config]) if weight.ndim else float(weight)
        marginal_acc += w * probs

    return cpt, marginal_acc / marginal_acc.sum()


def _is_label_valued(expr: Expr, labs) -> bool:
    """Heuristic: does the expression produce state labels (vs numbers)?"""
    if isinstance(expr, StateLabel):
        return True
    if isinstance(expr, DistCall):
        return False
    from riskbn.nptlang.ast import If

    if isinstance(expr, If):
        return _is_label_valued(expr.then, labs) or _is_label_valued(
            expr.orelse, labs
        )
    if isinstance(expr, Partitioned):
        return any(_is_label_valued(e, labs) for _, e in expr.cases)
    return False
