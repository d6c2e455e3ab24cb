"""Exact calculus for nonincreasing right-continuous step functions.

These are the singular value profiles mu(.; x) of block operators: finitely
many levels v_1 > v_2 > ... held on consecutive intervals [t_{i-1}, t_i)
starting at t_0 = 0, and zero from the last breakpoint on.  Everything
downstream (Lorentz integrals, weak norms) is closed form on this
representation, so no quadrature error enters any inequality verdict.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Operator, singular_pairs
from .errors import ContractViolationError, StructureError

__all__ = [
    "StepFunction",
    "singular_function",
    "distribution",
    "check_submultiplicative",
]

# Adjacent levels within this relative distance are treated as equal when a
# step function is assembled from floating-point singular values.
_MERGE_REL_TOL = 1e-12


@dataclass(frozen=True)
class StepFunction:
    """f(t) = values[i] on [breakpoints[i-1], breakpoints[i]), else 0."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bps = tuple(float(t) for t in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(bps) != len(vals):
            raise ContractViolationError("breakpoints and values must have equal length")
        if any(not np.isfinite(t) or t <= 0.0 for t in bps):
            raise ContractViolationError("breakpoints must be positive and finite")
        if any(not np.isfinite(v) or v <= 0.0 for v in vals):
            raise ContractViolationError("values must be positive and finite")
        if any(b >= a for a, b in zip(bps[1:], bps)):
            raise ContractViolationError("breakpoints must be strictly increasing")
        if any(b <= a for a, b in zip(vals[1:], vals)):
            raise ContractViolationError("values must be strictly decreasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls((), ())

    @classmethod
    def from_levels(cls, values, weights) -> "StepFunction":
        """Assemble from per-level (value, interval length) data.

        ``values`` must be nonincreasing.  Zero values are dropped (they are
        the implicit tail); adjacent values within 1e-12 relative are merged,
        keeping the first representative.
        """
        values = np.asarray(values, dtype=float)
        weights = np.asarray(weights, dtype=float)
        keep = values > 0.0
        values, weights = values[keep], weights[keep]
        if values.size == 0:
            return cls.zero()
        bps: list[float] = []
        vals: list[float] = []
        t = 0.0
        for v, w in zip(values, weights):
            t += w
            if vals and abs(vals[-1] - v) <= _MERGE_REL_TOL * max(vals[-1], v):
                bps[-1] = t
            else:
                vals.append(float(v))
                bps.append(t)
        return cls(tuple(bps), tuple(vals))

    @property
    def is_zero(self) -> bool:
        return not self.values

    @property
    def support_end(self) -> float:
        """Right end of the support (0 for the zero function)."""
        return self.breakpoints[-1] if self.breakpoints else 0.0

    def __call__(self, t):
        """Right-continuous evaluation; accepts scalars or arrays."""
        t_arr = np.asarray(t, dtype=float)
        if not self.values:
            out = np.zeros_like(t_arr)
            return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out
        bps = np.asarray(self.breakpoints)
        vals = np.concatenate([np.asarray(self.values), [0.0]])
        idx = np.searchsorted(bps, t_arr, side="right")
        out = vals[idx]
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def widths(self) -> np.ndarray:
        """Interval lengths matching ``values``."""
        return np.diff(np.concatenate([[0.0], np.asarray(self.breakpoints)]))

    def dilate(self, c: float) -> "StepFunction":
        """t -> f(t / c): stretch the time axis by c > 0."""
        c = float(c)
        if not c > 0.0:
            raise ContractViolationError(f"dilation factor {c} must be positive")
        return StepFunction(tuple(c * t for t in self.breakpoints), self.values)

    def product(self, other: "StepFunction") -> "StepFunction":
        """Pointwise product on the merged breakpoint grid."""
        if self.is_zero or other.is_zero:
            return StepFunction.zero()
        end = min(self.support_end, other.support_end)
        grid = np.unique(np.concatenate([[0.0], self.breakpoints, other.breakpoints]))
        grid = grid[grid <= end]
        if grid[-1] < end:
            grid = np.append(grid, end)
        left = grid[:-1]
        vals = self(left) * other(left)
        return StepFunction.from_levels(vals, np.diff(grid))

    def scale_values(self, c: float) -> "StepFunction":
        if not c > 0.0:
            raise ContractViolationError("value scaling must be positive")
        return StepFunction(self.breakpoints, tuple(c * v for v in self.values))

    def rows(self):
        """(t_left, t_right, value) triples, one per constancy interval."""
        left = 0.0
        for t, v in zip(self.breakpoints, self.values):
            yield (left, t, v)
            left = t


def singular_function(x: Operator) -> StepFunction:
    """The singular value profile mu(.; x) as an exact step function.

    Eigenvalues of |x| are collected with their block weights, sorted
    descending (stable in block order), and laid out on consecutive
    intervals whose lengths are the weights.  The result is the
    right-continuous inverse of the distribution function: at every t >= 0,
    mu(t) = inf{s > 0 : d(s; |x|) <= t}.
    """
    vals, weights = singular_pairs(x)
    return StepFunction.from_levels(vals, weights)


def distribution(x: Operator, s: float) -> float:
    """d(s; |x|): total weight of eigenvalues of |x| strictly above s."""
    s = float(s)
    if s < 0.0:
        raise ContractViolationError(f"threshold s={s} must be >= 0")
    vals, weights = singular_pairs(x)
    return float(np.sum(weights[vals > s]))


def check_submultiplicative(x: Operator, y: Operator):
    """Verify mu(t+s; xy) <= mu(t; x) mu(s; y) on the sufficient corner grid.

    Both sides are piecewise constant on the partition of the (t, s)
    quadrant induced by the breakpoints of mu(x), mu(y) and mu(xy).  The
    left side depends only on t+s and is nonincreasing, so on each cell it
    is largest at the lower-left corner, where the right side (constant per
    rectangle) is also attained.  Evaluating every corner pair with
    t, s in {0} union all breakpoints is therefore exhaustive.

    Returns (max_violation, (t, s)) where max_violation = max of LHS - RHS;
    a value <= 0 means the inequality holds everywhere.
    """
    if x.algebra != y.algebra:
        raise StructureError("operands belong to different algebras")
    mu_x = singular_function(x)
    mu_y = singular_function(y)
    mu_xy = singular_function(x * y)
    corners = np.unique(
        np.concatenate(
            [[0.0], mu_x.breakpoints, mu_y.breakpoints, mu_xy.breakpoints]
        )
    )
    tt, ss = np.meshgrid(corners, corners, indexing="ij")
    lhs = mu_xy(tt + ss)
    rhs = mu_x(tt) * mu_y(ss)
    diff = lhs - rhs
    i, j = np.unravel_index(np.argmax(diff), diff.shape)
    return float(diff[i, j]), (float(corners[i]), float(corners[j]))
