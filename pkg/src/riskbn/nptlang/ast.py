"""AST node types for the NPT expression language.

All nodes are frozen dataclasses so parsed expressions compare by value,
hash, and round-trip through :func:`expr_to_text`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

#: Distribution functions and their required argument counts.
DIST_ARITY = {
    "exponential": 1,
    "tnormal": 4,
    "uniform": 2,
    "binomial": 2,
    "triangle": 3,
    "beta": 2,
}

COMPARISON_OPS = ("<", "<=", ">", ">=", "==")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Ref:
    """Reference to a parent node by identifier."""

    node: str


@dataclass(frozen=True)
class StateLabel:
    """Quoted state label, e.g. the branches of an acceptability IF."""

    label: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class DistCall:
    name: str  # canonical lowercase key of DIST_ARITY
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Wmean:
    """Weighted mean with literal positive weights."""

    terms: tuple[tuple[float, "Expr"], ...]


@dataclass(frozen=True)
class If:
    left: "Expr"
    op: str  # comparison operator
    right: "Expr"
    then: "Expr"
    orelse: "Expr"


@dataclass(frozen=True)
class Partitioned:
    """Expression partitioned over the states of a discrete parent."""

    parent: str
    cases: tuple[tuple[str, "Expr"], ...]

    def case_map(self) -> dict[str, "Expr"]:
        return dict(self.cases)


Expr = Union[Num, Ref, StateLabel, BinOp, DistCall, Wmean, If, Partitioned]


def parent_refs(expr: Expr) -> set[str]:
    """All node identifiers referenced by the expression."""
    out: set[str] = set()
    _walk_refs(expr, out)
    return out


def _walk_refs(expr: Expr, out: set[str]) -> None:
    if isinstance(expr, Ref):
        out.add(expr.node)
    elif isinstance(expr, BinOp):
        _walk_refs(expr.left, out)
        _walk_refs(expr.right, out)
    elif isinstance(expr, DistCall):
        for a in expr.args:
            _walk_refs(a, out)
    elif isinstance(expr, Wmean):
        for _, e in expr.terms:
            _walk_refs(e, out)
    elif isinstance(expr, If):
        for e in (expr.left, expr.right, expr.then, expr.orelse):
            _walk_refs(e, out)
    elif isinstance(expr, Partitioned):
        out.add(expr.parent)
        for _, e in expr.cases:
            _walk_refs(e, out)


def is_deterministic(expr: Expr) -> bool:
    """True when the expression contains no distribution call, i.e. it
    evaluates to a point value once all parents are bound."""
    if isinstance(expr, DistCall):
        return False
    if isinstance(expr, BinOp):
        return is_deterministic(expr.left) and is_deterministic(expr.right)
    if isinstance(expr, Wmean):
        return all(is_deterministic(e) for _, e in expr.terms)
    if isinstance(expr, If):
        return all(
            is_deterministic(e)
            for e in (expr.left, expr.right, expr.then, expr.orelse)
        )
    if isinstance(expr, Partitioned):
        return all(is_deterministic(e) for _, e in expr.cases)
    return True


def _num_text(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def expr_to_text(expr: Expr) -> str:
    """Serialize an expression back to parseable surface syntax."""
    if isinstance(expr, Num):
        return _num_text(expr.value)
    if isinstance(expr, Ref):
        return expr.node
    if isinstance(expr, StateLabel):
        return f'"{expr.label}"'
    if isinstance(expr, BinOp):
        left = expr_to_text(expr.left)
        right = expr_to_text(expr.right)
        if isinstance(expr.left, BinOp) and expr.left.op in "+-" and expr.op in "*/":
            left = f"({left})"
        if isinstance(expr.right, BinOp) and (
            expr.op in "*/" or (expr.op == "-" and expr.right.op in "+-")
        ):
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    if isinstance(expr, DistCall):
        args = ", ".join(expr_to_text(a) for a in expr.args)
        return f"{expr.name.capitalize()}({args})"
    if isinstance(expr, Wmean):
        parts = ", ".join(
            f"{_num_text(w)}, {expr_to_text(e)}" for w, e in expr.terms
        )
        return f"wmean({parts})"
    if isinstance(expr, If):
        return (
            f"if({expr_to_text(expr.left)} {expr.op} {expr_to_text(expr.right)}, "
            f"{expr_to_text(expr.then)}, {expr_to_text(expr.orelse)})"
        )
    if isinstance(expr, Partitioned):
        cases = ", ".join(f'"{s}": {expr_to_text(e)}' for s, e in expr.cases)
        return f"partition({expr.parent}){{{cases}}}"
    raise TypeError(f"not an expression: {expr!r}")
