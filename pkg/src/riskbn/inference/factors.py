"""Dense factors over named axes, with the handful of operations
variable elimination needs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Factor:
    vars: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.vars) != self.values.ndim:
            raise ValueError(
                f"factor over {self.vars} has array of rank {self.values.ndim}"
            )


def _aligned(f: Factor, out_vars: tuple[str, ...]) -> np.ndarray:
    """View of f.values transposed/expanded to the axis order of out_vars."""
    present = [v for v in out_vars if v in f.vars]
    arr = np.transpose(f.values, [f.vars.index(v) for v in present])
    sizes = iter(arr.shape)
    shape = [next(sizes) if v in f.vars else 1 for v in out_vars]
    return arr.reshape(shape)


def multiply(a: Factor, b: Factor) -> Factor:
    out_vars = a.vars + tuple(v for v in b.vars if v not in a.vars)
    return Factor(out_vars, _aligned(a, out_vars) * _aligned(b, out_vars))


def multiply_all(factors: list[Factor]) -> Factor:
    if not factors:
        return Factor((), np.array(1.0).reshape(()))
    out = factors[0]
    for f in factors[1:]:
        out = multiply(out, f)
    return out


def sum_out(f: Factor, var: str) -> Factor:
    axis = f.vars.index(var)
    vars_left = tuple(v for v in f.vars if v != var)
    return Factor(vars_left, f.values.sum(axis=axis))


def reduce_index(f: Factor, var: str, index: int) -> Factor:
    axis = f.vars.index(var)
    vars_left = tuple(v for v in f.vars if v != var)
    return Factor(vars_left, np.take(f.values, index, axis=axis))


def scale_axis(f: Factor, var: str, weights: np.ndarray) -> Factor:
    """Multiply likelihood weights along one axis, keeping the axis."""
    axis = f.vars.index(var)
    shape = [1] * f.values.ndim
    shape[axis] = len(weights)
    return Factor(f.vars, f.values * weights.reshape(shape))
