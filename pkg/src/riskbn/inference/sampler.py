"""Likelihood-weighted sampling of the original continuous model.

This is the independent verification oracle: it never touches the
discretized factors.  Unobserved nodes are sampled ancestrally from
their NPT distributions (truncated to the node domain); the weight of a
particle is the product of the observed nodes' likelihoods.  Evidence
nodes that are d-separated from the target given the rest of the
evidence are pruned first, which keeps the effective sample size healthy
without changing the answer.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from riskbn.bn import BinnedPrior, Continuous, Network, Ranked, Table
from riskbn.errors import DomainError, InconsistentEvidenceError, UnknownNodeError
from riskbn.inference.compiler import CompiledNetwork
from riskbn.inference.evidence import (
    CountObservation,
    Evidence,
    StateObservation,
    ValueObservation,
)
from riskbn.inference.summary import PosteriorSummary
from riskbn.nptlang.ast import (
    BinOp,
    DistCall,
    Expr,
    If,
    Num,
    Partitioned,
    Ref,
    StateLabel,
    Wmean,
)
from riskbn.nptlang.dists import binomial_logpmf

ESS_FLOOR = 100.0


def sample(
    model: Network | CompiledNetwork,
    evidence: Evidence | None,
    target: str,
    n: int,
    seed: int,
) -> PosteriorSummary:
    """Posterior summary of ``target`` from ``n`` weighted particles.

    Deterministic given ``seed``.  An effective sample size below 100 is
    reported as a warning on the summary, not an error.
    """
    if n < 1:
        raise DomainError("sample count must be at least 1")
    net = model.network if isinstance(model, CompiledNetwork) else model
    evidence = dict(evidence or {})
    for name in list(evidence) + [target]:
        if name not in net.kinds:
            raise UnknownNodeError(f"unknown node {name!r}")

    evidence = _prune_evidence(net, evidence, target)
    keep = _ancestral_closure(net, {target, *evidence})
    order = [v for v in net.topological_order() if v in keep]

    rng = np.random.default_rng(seed)
    nums: dict[str, np.ndarray] = {}
    labs: dict[str, np.ndarray] = {}  # integer state indices
    logw = np.zeros(n)

    for name in order:
        kind = net.kinds[name]
        npt = net.npts[name]
        obs = evidence.get(name)
        if isinstance(kind, Continuous):
            if obs is None:
                nums[name] = _sample_continuous(
                    npt, kind, nums, labs, net, rng, n
                )
            elif isinstance(obs, ValueObservation):
                v = float(obs.value)
                if not kind.lo <= v <= kind.hi:
                    raise DomainError(
                        f"value {v!r} outside the domain of {name!r}"
                    )
                nums[name] = np.full(n, v)
                logw += _log_density_at(npt, kind, v, nums, labs, net, n)
            elif isinstance(obs, CountObservation):
                k = float(obs.count)
                nums[name] = np.full(n, k)
                logw += _count_loglik(npt, obs.count, nums, labs, net, n)
            else:
                raise DomainError(
                    f"{name!r} is continuous; use Value/CountObservation"
                )
        else:
            states = kind.states
            if obs is None:
                idx = _sample_discrete(npt, kind, states, nums, labs, net, rng, n)
            elif isinstance(obs, StateObservation):
                if obs.label not in states:
                    raise DomainError(f"{name!r} has no state {obs.label!r}")
                fixed = states.index(obs.label)
                idx = np.full(n, fixed, dtype=int)
                logw += _log_state_prob(npt, kind, states, fixed, nums, labs, net, n)
            else:
                raise DomainError(f"{name!r} is discrete; use StateObservation")
            labs[name] = idx
            if isinstance(kind, Ranked):
                nums[name] = np.asarray(kind.scale.midpoints)[idx]

    weights = np.exp(logw - np.max(logw))
    total = weights.sum()
    if not np.isfinite(total) or total <= 0:
        raise InconsistentEvidenceError("all particle weights vanished")
    ess = float(total * total / np.sum(weights * weights))
    warnings = ()
    if ess < ESS_FLOOR:
        warnings = (
            f"DegenerateWeights: effective sample size {ess:.1f} < {ESS_FLOOR:.0f}",
        )

    kind = net.kinds[target]
    if isinstance(kind, Continuous):
        return PosteriorSummary.from_weighted_samples(
            target,
            nums[target],
            weights,
            kind.lo,
            kind.hi,
            warnings=warnings,
            ess=ess,
        )
    states = kind.states
    idx = labs[target]
    probs = np.bincount(idx, weights=weights, minlength=len(states))
    values = (
        kind.scale.midpoints if isinstance(kind, Ranked) else None
    )
    out = PosteriorSummary.from_states(
        target,
        "ranked" if isinstance(kind, Ranked) else type(kind).__name__.lower(),
        states,
        probs,
        values,
    )
    out.warnings = warnings
    out.ess = ess
    return out


# --- graph pruning ------------------------------------------------------------


def _ancestral_closure(net: Network, nodes: set[str]) -> set[str]:
    out: set[str] = set()
    stack = list(nodes)
    while stack:
        cur = stack.pop()
        if cur in out:
            continue
        out.add(cur)
        stack.extend(net.parents(cur))
    return out


def _d_separated(net: Network, x: str, y: str, given: set[str]) -> bool:
    """Moral-graph reachability test on the ancestral subgraph."""
    relevant = _ancestral_closure(net, {x, y, *given})
    # moralize: connect co-parents, drop directions
    adj: dict[str, set[str]] = {v: set() for v in relevant}
    for child in relevant:
        ps = [p for p in net.parents(child) if p in relevant]
        for p in ps:
            adj[p].add(child)
            adj[child].add(p)
        for i, a in enumerate(ps):
            for b in ps[i + 1 :]:
                adj[a].add(b)
                adj[b].add(a)
    blocked = set(given)
    if x in blocked or y in blocked:
        return True
    seen = {x}
    stack = [x]
    while stack:
        cur = stack.pop()
        for nxt in adj[cur]:
            if nxt == y:
                return False
            if nxt not in seen and nxt not in blocked:
                seen.add(nxt)
                stack.append(nxt)
    return True


def _prune_evidence(net: Network, evidence: dict, target: str) -> dict:
    kept = dict(evidence)
    changed = True
    while changed:
        changed = False
        for name in sorted(kept):
            if name == target:
                continue
            others = {k for k in kept if k != name}
            if _d_separated(net, target, name, others):
                del kept[name]
                changed = True
    return kept


# --- vectorized evaluation over particles --------------------------------------


def _vec(expr: Expr, nums, labs, net: Network, n: int) -> np.ndarray:
    if isinstance(expr, Num):
        return np.full(n, expr.value)
    if isinstance(expr, Ref):
        if expr.node not in nums:
            raise DomainError(
                f"parent {expr.node!r} has no numeric value in sampling"
            )
        return np.asarray(nums[expr.node])
    if isinstance(expr, BinOp):
        left = _vec(expr.left, nums, labs, net, n)
        right = _vec(expr.right, nums, labs, net, n)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        with np.errstate(divide="ignore", invalid="ignore"):
            return left / right
    if isinstance(expr, Wmean):
        total = sum(w for w, _ in expr.terms)
        acc = np.zeros(n)
        for w, sub in expr.terms:
            acc += w * _vec(sub, nums, labs, net, n)
        return acc / total
    if isinstance(expr, If):
        cond = _cond_mask(expr, nums, labs, net, n)
        return np.where(
            cond,
            _vec(expr.then, nums, labs, net, n),
            _vec(expr.orelse, nums, labs, net, n),
        )
    raise DomainError(f"cannot vectorize {type(expr).__name__} in sampling")


def _cond_mask(expr: If, nums, labs, net, n) -> np.ndarray:
    left = _vec(expr.left, nums, labs, net, n)
    right = _vec(expr.right, nums, labs, net, n)
    return {
        "<": left < right,
        "<=": left <= right,
        ">": left > right,
        ">=": left >= right,
        "==": left == right,
    }[expr.op]


def _case_masks(expr: Partitioned, labs, net: Network, n: int):
    states = net.kinds[expr.parent].states
    idx = labs[expr.parent]
    for case_state, sub in expr.cases:
        yield (idx == states.index(case_state)), sub


# --- continuous sampling --------------------------------------------------------


def _sample_continuous(npt, kind: Continuous, nums, labs, net, rng, n) -> np.ndarray:
    if isinstance(npt, BinnedPrior):
        edges = np.asarray(npt.edges)
        masses = np.asarray(npt.masses, dtype=float)
        masses = masses / masses.sum()
        idx = rng.choice(len(masses), size=n, p=masses)
        u = rng.random(n)
        return edges[idx] + u * (edges[idx + 1] - edges[idx])
    return _sample_expr(npt, kind, nums, labs, net, rng, n)


def _sample_expr(expr: Expr, kind: Continuous, nums, labs, net, rng, n) -> np.ndarray:
    if isinstance(expr, Partitioned):
        out = np.empty(n)
        done = np.zeros(n, dtype=bool)
        for mask, sub in _case_masks(expr, labs, net, n):
            if mask.any():
                out[mask] = _sample_expr(sub, kind, nums, labs, net, rng, n)[mask]
                done |= mask
        if not done.all():
            raise DomainError("partition does not cover every sampled state")
        return out
    if isinstance(expr, If):
        cond = _cond_mask(expr, nums, labs, net, n)
        then = _sample_expr(expr.then, kind, nums, labs, net, rng, n)
        other = _sample_expr(expr.orelse, kind, nums, labs, net, rng, n)
        return np.where(cond, then, other)
    if isinstance(expr, DistCall):
        params = [_vec(a, nums, labs, net, n) for a in expr.args]
        return _draw(expr.name, params, kind.lo, kind.hi, rng, n)
    # deterministic value, clamped to the domain like the engine does
    vals = _vec(expr, nums, labs, net, n)
    return np.clip(vals, kind.lo, kind.hi)


def _draw(name: str, params, lo: float, hi: float, rng, n: int) -> np.ndarray:
    u = rng.random(n)
    if name == "exponential":
        rate = params[0]
        if np.any(rate <= 0):
            raise DomainError("Exponential rate must be > 0")
        flo = -np.expm1(-rate * lo)
        fhi = -np.expm1(-rate * hi)
        uu = flo + u * (fhi - flo)
        return -np.log1p(-uu) / rate
    if name == "uniform":
        a = np.maximum(params[0], lo)
        b = np.minimum(params[1], hi)
        if np.any(b <= a):
            raise DomainError("Uniform support misses the node domain")
        return a + u * (b - a)
    if name == "tnormal":
        mu, var, tlo, thi = params
        if np.any(var <= 0):
            raise DomainError("TNormal variance must be > 0")
        sigma = np.sqrt(var)
        a = np.maximum(tlo, lo)
        b = np.minimum(thi, hi)
        fa = special.ndtr((a - mu) / sigma)
        fb = special.ndtr((b - mu) / sigma)
        uu = np.clip(fa + u * (fb - fa), 1e-15, 1 - 1e-15)
        return np.clip(mu + sigma * special.ndtri(uu), a, b)
    if name == "triangle":
        a, c, b = np.sort(np.stack(params, axis=0), axis=0)
        flo = _triangle_cdf(a, c, b, np.maximum(a, lo))
        fhi = _triangle_cdf(a, c, b, np.minimum(b, hi))
        uu = flo + u * (fhi - flo)
        return np.clip(_triangle_ppf(a, c, b, uu), lo, hi)
    if name == "beta":
        alpha, beta_ = params
        if np.any(alpha <= 0) or np.any(beta_ <= 0):
            raise DomainError("Beta needs positive shape parameters")
        flo = special.betainc(alpha, beta_, np.clip(lo, 0, 1))
        fhi = special.betainc(alpha, beta_, np.clip(hi, 0, 1))
        uu = flo + u * (fhi - flo)
        return special.betaincinv(alpha, beta_, uu)
    if name == "binomial":
        nn, p = params
        nn = np.asarray(nn)
        if np.any(np.abs(nn - np.round(nn)) > 1e-9):
            raise DomainError("Binomial n must be an integer")
        return rng.binomial(np.round(nn).astype(int), np.clip(p, 0, 1)).astype(float)
    raise DomainError(f"unknown distribution {name!r}")


def _triangle_cdf(a, c, b, x):
    span = np.maximum(b - a, 1e-300)
    left_w = np.maximum(c - a, 1e-300)
    right_w = np.maximum(b - c, 1e-300)
    x = np.clip(x, a, b)
    left = (x - a) ** 2 / (span * left_w)
    right = 1.0 - (b - x) ** 2 / (span * right_w)
    return np.where(x <= c, np.where(c > a, left, 0.0), right)


def _triangle_ppf(a, c, b, u):
    span = np.maximum(b - a, 1e-300)
    left_w = np.maximum(c - a, 1e-300)
    right_w = np.maximum(b - c, 1e-300)
    fc = np.where(left_w > 1e-299, left_w / span, 0.0)
    left = a + np.sqrt(np.clip(u * span * left_w, 0, None))
    right = b - np.sqrt(np.clip((1 - u) * span * right_w, 0, None))
    return np.where(u <= fc, left, right)


# --- discrete sampling -----------------------------------------------------------


def _row_probs(npt, kind, states, nums, labs, net, n) -> np.ndarray:
    """(n, n_states) matrix of conditional state probabilities per particle."""
    n_states = len(states)
    if isinstance(npt, Table):
        cols = npt.column_map()
        if not npt.parents:
            row = np.asarray(cols[()], dtype=float)
            return np.broadcast_to(row, (n, n_states))
        axes = [net.kinds[p].states for p in npt.parents]
        flat = np.zeros(n, dtype=int)
        for p, ax in zip(npt.parents, axes):
            flat = flat * len(ax) + labs[p]
        matrix = np.zeros((int(np.prod([len(a) for a in axes])), n_states))
        for config, probs in cols.items():
            pos = 0
            for ax, state in zip(axes, config):
                pos = pos * len(ax) + ax.index(state)
            matrix[pos] = probs
        return matrix[flat]

    expr: Expr = npt
    if isinstance(expr, Partitioned):
        out = np.zeros((n, n_states))
        for mask, sub in _case_masks(expr, labs, net, n):
            if mask.any():
                out[mask] = _row_probs(sub, kind, states, nums, labs, net, n)[mask]
        return out
    if isinstance(expr, If):
        then_lab = isinstance(expr.then, StateLabel) or isinstance(
            expr.orelse, StateLabel
        )
        if then_lab:
            cond = _cond_mask(expr, nums, labs, net, n)
            out = np.zeros((n, n_states))
            for branch, mask in ((expr.then, cond), (expr.orelse, ~cond)):
                if not isinstance(branch, StateLabel):
                    raise DomainError(
                        "comparison branches for discrete nodes must be labels"
                    )
                out[mask, states.index(branch.label)] = 1.0
            return out
    if isinstance(expr, StateLabel):
        out = np.zeros((n, n_states))
        out[:, states.index(expr.label)] = 1.0
        return out
    if isinstance(kind, Ranked):
        # numeric NPT over the ranked [0, 1] scale: interval masses
        edges = np.asarray(kind.scale.edges)
        if isinstance(expr, DistCall):
            params = [_vec(a, nums, labs, net, n) for a in expr.args]
            cdf_vals = np.stack(
                [_vec_cdf(expr.name, params, e) for e in edges], axis=1
            )
            lo_col = cdf_vals[:, :1]
            hi_col = cdf_vals[:, -1:]
            width = np.maximum(hi_col - lo_col, 1e-300)
            return np.diff(cdf_vals, axis=1) / width
        vals = np.clip(_vec(expr, nums, labs, net, n), 0.0, 1.0)
        idx = np.clip(np.searchsorted(edges, vals, side="right") - 1, 0, n_states - 1)
        out = np.zeros((n, n_states))
        out[np.arange(n), idx] = 1.0
        return out
    raise DomainError(
        f"cannot sample discrete node with NPT {type(expr).__name__}"
    )


def _vec_cdf(name: str, params, x: float) -> np.ndarray:
    if name == "uniform":
        a, b = params
        return np.clip((x - a) / np.maximum(b - a, 1e-300), 0.0, 1.0)
    if name == "exponential":
        rate = params[0]
        return -np.expm1(-rate * max(x, 0.0))
    if name == "tnormal":
        mu, var, tlo, thi = params
        sigma = np.sqrt(var)
        fa = special.ndtr((tlo - mu) / sigma)
        fb = special.ndtr((thi - mu) / sigma)
        fx = special.ndtr((np.clip(x, tlo, thi) - mu) / sigma)
        return (fx - fa) / np.maximum(fb - fa, 1e-300)
    if name == "beta":
        alpha, beta_ = params
        return special.betainc(alpha, beta_, np.clip(x, 0.0, 1.0))
    if name == "triangle":
        a, c, b = np.sort(np.stack(params, axis=0), axis=0)
        return _triangle_cdf(a, c, b, np.asarray(x))
    raise DomainError(f"no vectorized CDF for {name!r}")


def _sample_discrete(npt, kind, states, nums, labs, net, rng, n) -> np.ndarray:
    rows = _row_probs(npt, kind, states, nums, labs, net, n)
    cum = np.cumsum(rows, axis=1)
    cum /= cum[:, -1:]
    u = rng.random(n)
    return (u[:, None] > cum).sum(axis=1)


def _log_state_prob(npt, kind, states, fixed: int, nums, labs, net, n) -> np.ndarray:
    rows = _row_probs(npt, kind, states, nums, labs, net, n)
    with np.errstate(divide="ignore"):
        return np.log(rows[:, fixed])


def _log_density_at(npt, kind: Continuous, v: float, nums, labs, net, n) -> np.ndarray:
    expr = npt
    if isinstance(expr, BinnedPrior):
        edges = np.asarray(expr.edges)
        masses = np.asarray(expr.masses, dtype=float)
        masses = masses / masses.sum()
        idx = min(
            max(int(np.searchsorted(edges, v, side="right") - 1), 0),
            len(masses) - 1,
        )
        width = edges[idx + 1] - edges[idx]
        dens = masses[idx] / width if width > 0 else 0.0
        with np.errstate(divide="ignore"):
            return np.full(n, np.log(dens) if dens > 0 else -np.inf)
    if isinstance(expr, Partitioned):
        out = np.full(n, -np.inf)
        for mask, sub in _case_masks(expr, labs, net, n):
            if mask.any():
                out[mask] = _log_density_at(sub, kind, v, nums, labs, net, n)[mask]
        return out
    if isinstance(expr, If):
        cond = _cond_mask(expr, nums, labs, net, n)
        then = _log_density_at(expr.then, kind, v, nums, labs, net, n)
        other = _log_density_at(expr.orelse, kind, v, nums, labs, net, n)
        return np.where(cond, then, other)
    if isinstance(expr, DistCall):
        params = [_vec(a, nums, labs, net, n) for a in expr.args]
        return _log_pdf(expr.name, params, v, kind.lo, kind.hi)
    vals = np.clip(_vec(expr, nums, labs, net, n), kind.lo, kind.hi)
    return np.where(np.abs(vals - v) <= 1e-9, 0.0, -np.inf)


def _log_pdf(name: str, params, v: float, lo: float, hi: float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        if name == "exponential":
            rate = params[0]
            z = -np.expm1(-rate * hi) - (-np.expm1(-rate * lo))
            pdf = rate * np.exp(-rate * v) / np.maximum(z, 1e-300)
            return np.where((lo <= v) & (v <= hi), np.log(pdf), -np.inf)
        if name == "uniform":
            a = np.maximum(params[0], lo)
            b = np.minimum(params[1], hi)
            inside = (a <= v) & (v <= b)
            return np.where(inside, -np.log(np.maximum(b - a, 1e-300)), -np.inf)
        if name == "tnormal":
            mu, var, tlo, thi = params
            sigma = np.sqrt(var)
            a = np.maximum(tlo, lo)
            b = np.minimum(thi, hi)
            z = special.ndtr((b - mu) / sigma) - special.ndtr((a - mu) / sigma)
            logpdf = (
                -0.5 * ((v - mu) / sigma) ** 2
                - np.log(sigma * np.sqrt(2 * np.pi))
                - np.log(np.maximum(z, 1e-300))
            )
            return np.where((a <= v) & (v <= b), logpdf, -np.inf)
        if name == "beta":
            alpha, beta_ = params
            logpdf = (
                (alpha - 1) * np.log(v)
                + (beta_ - 1) * np.log1p(-v)
                - special.betaln(alpha, beta_)
            )
            return np.where((0 < v) & (v < 1), logpdf, -np.inf)
        if name == "triangle":
            a, c, b = np.sort(np.stack(params, axis=0), axis=0)
            span = np.maximum(b - a, 1e-300)
            left = 2 * (v - a) / (span * np.maximum(c - a, 1e-300))
            right = 2 * (b - v) / (span * np.maximum(b - c, 1e-300))
            pdf = np.where(v <= c, left, right)
            pdf = np.where((a <= v) & (v <= b), pdf, 0.0)
            return np.log(np.maximum(pdf, 1e-300))
    raise DomainError(f"no density for {name!r}")


def _count_loglik(npt, k: int, nums, labs, net, n) -> np.ndarray:
    if not isinstance(npt, DistCall) or npt.name != "binomial":
        raise DomainError("CountObservation needs a Binomial NPT")
    n_arr = _vec(npt.args[0], nums, labs, net, n)
    p_arr = np.clip(_vec(npt.args[1], nums, labs, net, n), 0.0, 1.0)
    n0 = float(np.round(n_arr.flat[0]))
    if np.any(np.abs(n_arr - n0) > 1e-9):
        raise DomainError("Binomial n must be constant for count evidence")
    return binomial_logpmf(k, n0, p_arr)

