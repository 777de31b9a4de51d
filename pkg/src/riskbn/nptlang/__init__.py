"""NPT expression language: AST, parser and evaluators."""

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
    expr_to_text,
    is_deterministic,
    parent_refs,
)
from riskbn.nptlang.dists import BinnedDistribution
from riskbn.nptlang.evaluate import (
    eval_comparison,
    eval_density,
    eval_mean,
    eval_value,
)
from riskbn.nptlang.parser import parse

__all__ = [
    "BinOp",
    "BinnedDistribution",
    "DistCall",
    "Expr",
    "If",
    "Num",
    "Partitioned",
    "Ref",
    "StateLabel",
    "Wmean",
    "expr_to_text",
    "is_deterministic",
    "parent_refs",
    "parse",
    "eval_comparison",
    "eval_density",
    "eval_mean",
    "eval_value",
]
