"""Evaluators for NPT expressions.

Three views of the same expression:

* :func:`eval_value`   -- point value (or state label) once parents are bound
* :func:`eval_mean`    -- analytic mean of the expression's distribution
* :func:`eval_density` -- per-bin probability mass on a grid

Parent bindings come as two maps: ``values`` holds numeric bindings
(continuous values, ranked-interval midpoints), ``states`` holds discrete
state labels used by partitioned expressions.  A plain dict can be passed
for ``values`` with ``states`` defaulting to the same keys when labels are
stored as strings.
"""

from __future__ import annotations

from typing import Mapping, Union

import numpy as np

from riskbn.errors import DomainError, UnboundParentError
from riskbn.nptlang import dists
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

Bindings = Mapping[str, Union[float, str]]


def _split_bindings(
    values: Bindings, states: Mapping[str, str] | None
) -> tuple[dict[str, float], dict[str, str]]:
    nums: dict[str, float] = {}
    labs: dict[str, str] = dict(states or {})
    for key, val in values.items():
        if isinstance(val, str):
            labs.setdefault(key, val)
        else:
            nums[key] = float(val)
    return nums, labs


def _numeric(expr: Expr, nums: dict[str, float], labs: dict[str, str]) -> float:
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Ref):
        if expr.node in nums:
            return nums[expr.node]
        if expr.node in labs:
            raise DomainError(
                f"parent {expr.node!r} is discrete and has no numeric value; "
                "use it as a partition key or comparison label"
            )
        raise UnboundParentError(f"parent {expr.node!r} is not bound")
    if isinstance(expr, BinOp):
        left = _numeric(expr.left, nums, labs)
        right = _numeric(expr.right, nums, labs)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if expr.op == "/":
            if right == 0:
                raise DomainError("division by zero")
            return left / right
        raise DomainError(f"unknown operator {expr.op!r}")
    if isinstance(expr, Wmean):
        total_w = sum(w for w, _ in expr.terms)
        return sum(w * _numeric(e, nums, labs) for w, e in expr.terms) / total_w
    if isinstance(expr, StateLabel):
        raise DomainError(f"state label {expr.label!r} used in numeric context")
    if isinstance(expr, DistCall):
        raise DomainError(
            f"distribution {expr.name} cannot be used as a numeric operand"
        )
    raise DomainError(f"cannot evaluate {type(expr).__name__} numerically")


def _select_branch(expr: If, nums: dict[str, float], labs: dict[str, str]) -> Expr:
    left = _numeric(expr.left, nums, labs)
    right = _numeric(expr.right, nums, labs)
    taken = {
        "<": left < right,
        "<=": left <= right,
        ">": left > right,
        ">=": left >= right,
        "==": left == right,
    }[expr.op]
    return expr.then if taken else expr.orelse


def _select_case(expr: Partitioned, labs: dict[str, str]) -> Expr:
    if expr.parent not in labs:
        raise UnboundParentError(
            f"partition parent {expr.parent!r} has no observed state"
        )
    state = labs[expr.parent]
    for case_state, sub in expr.cases:
        if case_state == state:
            return sub
    raise DomainError(
        f"partition over {expr.parent!r} has no case for state {state!r}"
    )


def eval_value(
    expr: Expr, values: Bindings, states: Mapping[str, str] | None = None
) -> float | str:
    """Point value of a deterministic expression; labels pass through."""
    nums, labs = _split_bindings(values, states)
    return _eval_value(expr, nums, labs)


def _eval_value(expr: Expr, nums: dict[str, float], labs: dict[str, str]):
    if isinstance(expr, StateLabel):
        return expr.label
    if isinstance(expr, If):
        return _eval_value(_select_branch(expr, nums, labs), nums, labs)
    if isinstance(expr, Partitioned):
        return _eval_value(_select_case(expr, labs), nums, labs)
    return _numeric(expr, nums, labs)


def eval_comparison(
    expr: If, values: Bindings, states: Mapping[str, str] | None = None
) -> float | str:
    """Evaluate the comparison of an IF and return the selected branch's value.

    Equality at the boundary follows the operator literally (``<=`` includes
    the boundary value).
    """
    if not isinstance(expr, If):
        raise DomainError("eval_comparison expects an if-expression")
    nums, labs = _split_bindings(values, states)
    return _eval_value(_select_branch(expr, nums, labs), nums, labs)


def eval_mean(
    expr: Expr, values: Bindings, states: Mapping[str, str] | None = None
) -> float:
    """Analytic mean of the expression given fixed parent values.

    Distribution means are those of the untruncated family (an
    Exponential(10) prior has mean 0.1 even though a probability node
    truncates it to [0, 1]).
    """
    nums, labs = _split_bindings(values, states)
    return _eval_mean(expr, nums, labs)


def _eval_mean(expr: Expr, nums: dict[str, float], labs: dict[str, str]) -> float:
    if isinstance(expr, DistCall):
        args = tuple(_eval_mean(a, nums, labs) for a in expr.args)
        return _dist_mean(expr.name, args)
    if isinstance(expr, If):
        return _eval_mean(_select_branch(expr, nums, labs), nums, labs)
    if isinstance(expr, Partitioned):
        return _eval_mean(_select_case(expr, labs), nums, labs)
    if isinstance(expr, Wmean):
        total_w = sum(w for w, _ in expr.terms)
        return sum(w * _eval_mean(e, nums, labs) for w, e in expr.terms) / total_w
    if isinstance(expr, BinOp):
        # means of sums/differences are exact; products/quotients of
        # sub-distributions are not supported analytically
        left_det = isinstance(expr.left, (Num, Ref)) or _is_point(expr.left)
        right_det = isinstance(expr.right, (Num, Ref)) or _is_point(expr.right)
        if expr.op in "+-" or (left_det and right_det):
            left = _eval_mean(expr.left, nums, labs)
            right = _eval_mean(expr.right, nums, labs)
            if expr.op == "+":
                return left + right
            if expr.op == "-":
                return left - right
            if expr.op == "*":
                return left * right
            if right == 0:
                raise DomainError("division by zero")
            return left / right
        # scaling a distribution by a constant is linear in the mean
        if expr.op == "*" and (left_det or right_det):
            return _eval_mean(expr.left, nums, labs) * _eval_mean(
                expr.right, nums, labs
            )
        if expr.op == "/" and right_det:
            divisor = _eval_mean(expr.right, nums, labs)
            if divisor == 0:
                raise DomainError("division by zero")
            return _eval_mean(expr.left, nums, labs) / divisor
        raise DomainError("mean of a nonlinear combination of distributions")
    return _numeric(expr, nums, labs)


def _is_point(expr: Expr) -> bool:
    from riskbn.nptlang.ast import is_deterministic

    return is_deterministic(expr)


def _dist_mean(name: str, args: tuple[float, ...]) -> float:
    if name == "exponential":
        (rate,) = args
        if rate <= 0:
            raise DomainError(f"Exponential rate must be > 0, got {rate}")
        return 1.0 / rate
    if name == "uniform":
        lo, hi = args
        if not hi > lo:
            raise DomainError(f"Uniform needs lo < hi, got [{lo}, {hi}]")
        return 0.5 * (lo + hi)
    if name == "triangle":
        return sum(args) / 3.0
    if name == "tnormal":
        mu, var, lo, hi = args
        return dists.tnormal_mean(mu, var, lo, hi)
    if name == "binomial":
        n, p = args
        if abs(n - round(n)) > 1e-9 or n < 0:
            raise DomainError(f"Binomial n must be a non-negative integer, got {n}")
        if not 0 <= p <= 1:
            raise DomainError(f"Binomial p must lie in [0, 1], got {p}")
        return n * p
    if name == "beta":
        alpha, beta_ = args
        if alpha <= 0 or beta_ <= 0:
            raise DomainError("Beta needs positive shape parameters")
        return alpha / (alpha + beta_)
    raise DomainError(f"unknown distribution {name!r}")


def vector_value(
    expr: Expr,
    arrays: Mapping[str, Union[float, np.ndarray]],
    states: Mapping[str, str] | None = None,
):
    """Broadcasted numeric evaluation of a deterministic expression.

    ``arrays`` binds parents to numpy arrays (or scalars); discrete parents
    referenced by partitions must be fixed labels in ``states``.
    """
    labs = dict(states or {})

    def run(e: Expr):
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Ref):
            if e.node in arrays:
                return arrays[e.node]
            if e.node in labs:
                raise DomainError(
                    f"parent {e.node!r} is discrete and has no numeric value"
                )
            raise UnboundParentError(f"parent {e.node!r} is not bound")
        if isinstance(e, BinOp):
            left, right = run(e.left), run(e.right)
            if e.op == "+":
                return left + right
            if e.op == "-":
                return left - right
            if e.op == "*":
                return left * right
            with np.errstate(divide="ignore", invalid="ignore"):
                return left / right
        if isinstance(e, Wmean):
            total = sum(w for w, _ in e.terms)
            acc = sum(w * run(sub) for w, sub in e.terms)
            return acc / total
        if isinstance(e, If):
            cond = {
                "<": lambda a, b: a < b,
                "<=": lambda a, b: a <= b,
                ">": lambda a, b: a > b,
                ">=": lambda a, b: a >= b,
                "==": lambda a, b: a == b,
            }[e.op](run(e.left), run(e.right))
            return np.where(cond, run(e.then), run(e.orelse))
        if isinstance(e, Partitioned):
            if e.parent not in labs:
                raise UnboundParentError(
                    f"partition parent {e.parent!r} has no observed state"
                )
            state = labs[e.parent]
            for case_state, sub in e.cases:
                if case_state == state:
                    return run(sub)
            raise DomainError(
                f"partition over {e.parent!r} has no case for state {state!r}"
            )
        if isinstance(e, StateLabel):
            raise DomainError(f"state label {e.label!r} used in numeric context")
        raise DomainError(f"cannot vectorize {type(e).__name__}")

    return run(expr)


def eval_density(
    expr: Expr,
    values: Bindings,
    edges: np.ndarray,
    states: Mapping[str, str] | None = None,
) -> dists.BinnedDistribution:
    """Per-bin probability mass of the expression on a grid.

    Masses are renormalized to 1 after restriction to the grid domain.
    Deterministic expressions produce a point mass in the containing bin
    with an exact representative value.
    """
    nums, labs = _split_bindings(values, states)
    return _eval_density(expr, nums, labs, np.asarray(edges, dtype=float))


def _eval_density(
    expr: Expr,
    nums: dict[str, float],
    labs: dict[str, str],
    edges: np.ndarray,
) -> dists.BinnedDistribution:
    if isinstance(expr, If):
        return _eval_density(_select_branch(expr, nums, labs), nums, labs, edges)
    if isinstance(expr, Partitioned):
        return _eval_density(_select_case(expr, labs), nums, labs, edges)
    if isinstance(expr, DistCall):
        args = tuple(_numeric(a, nums, labs) for a in expr.args)
        if expr.name == "binomial":
            return dists.binomial_binned(args[0], args[1], edges)
        return dists.continuous_family(expr.name, args, edges)
    value = _numeric(expr, nums, labs)
    return dists.point_mass(edges, value)
