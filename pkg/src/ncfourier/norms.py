"""Closed-form L^p and Lorentz L^{p,q} quasinorms of block operators.

All norms factor through the singular value profile, which is an exact step
function, so every integral below is a finite sum:

    ||x||_{p,q}^q = sum_i v_i^q * (p/q) * (t_i^{q/p} - t_{i-1}^{q/p})
    ||x||_{p,oo}  = max_i v_i * t_i^{1/p}

where v_i are the singular value levels and t_i the cumulative weights.
The q = oo supremum over a constancy interval [t_{i-1}, t_i) equals the
limit at the right endpoint, which is the classical value of the weak norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .algebra import Operator, singular_pairs
from .errors import ContractViolationError, StructureError
from .stepfun import StepFunction

__all__ = [
    "lp_norm",
    "lorentz_norm",
    "weak_norm_via_distribution",
    "check_embedding",
    "check_holder",
    "EmbeddingResult",
    "HolderResult",
    "HormanderExponents",
]


def _levels(x: Union[Operator, StepFunction]):
    """(values, interval lengths) of the singular profile, zeros dropped."""
    if isinstance(x, Operator):
        vals, weights = singular_pairs(x)
    elif isinstance(x, StepFunction):
        vals = np.asarray(x.values, dtype=float)
        weights = x.widths()
    else:
        raise ContractViolationError(f"expected Operator or StepFunction, got {type(x).__name__}")
    keep = vals > 0.0
    return vals[keep], weights[keep]


def lp_norm(x: Operator, p: float) -> float:
    """(tr_w |x|^p)^(1/p) for finite p; the largest singular value for p = oo."""
    p = float(p)
    if not p > 0.0:
        raise ContractViolationError(f"exponent p={p} must be positive")
    vals, weights = singular_pairs(x)
    if vals.size == 0 or vals[0] == 0.0:
        return 0.0
    if math.isinf(p):
        return float(vals[0])
    return float(np.sum(weights * vals**p) ** (1.0 / p))


def lorentz_norm(x: Union[Operator, StepFunction], p: float, q: float) -> float:
    """Lorentz L^{p,q} quasinorm of an operator or of a step function.

    Requires 0 < p < oo and 0 < q <= oo.  Quasinorm exponents below 1 are
    allowed; no triangle inequality is assumed anywhere.
    """
    p, q = float(p), float(q)
    if not (0.0 < p < math.inf):
        raise ContractViolationError(f"first exponent p={p} out of range (0, oo)")
    if not q > 0.0:
        raise ContractViolationError(f"second exponent q={q} out of range (0, oo]")
    vals, widths = _levels(x)
    if vals.size == 0:
        return 0.0
    t = np.cumsum(widths)
    if math.isinf(q):
        return float(np.max(vals * t ** (1.0 / p)))
    tq = t ** (q / p)
    tq_prev = np.concatenate([[0.0], tq[:-1]])
    total = np.sum(vals**q * (p / q) * (tq - tq_prev))
    return float(total ** (1.0 / q))


def weak_norm_via_distribution(x: Operator, r: float) -> float:
    """sup over eigenvalue levels of  lam * d(lam-; |x|)^(1/r).

    The supremum of s * d(s)^(1/r) over s > 0 is approached as s tends to an
    eigenvalue from below, so it suffices to scan the eigenvalue set and
    evaluate the distribution function just under each level.  This is the
    classical weak-norm form of the Hormander condition and coincides with
    the L^{r,oo} quasinorm.
    """
    r = float(r)
    if not (0.0 < r < math.inf):
        raise ContractViolationError(f"exponent r={r} out of range (0, oo)")
    vals, weights = singular_pairs(x)
    keep = vals > 0.0
    vals, weights = vals[keep], weights[keep]
    if vals.size == 0:
        return 0.0
    # d(s) just below level lam counts every eigenvalue >= lam.  This goes
    # through the distribution function on purpose: it is the independent
    # route that the weak-norm identity tests compare against lorentz_norm.
    levels = np.unique(vals)
    mass = np.array([float(np.sum(weights[vals > lam * (1.0 - 1e-12)])) for lam in levels])
    return float(np.max(levels * mass ** (1.0 / r)))


class EmbeddingResult(NamedTuple):
    ratio: float
    passed: bool
    degenerate: bool


def check_embedding(x: Operator, p: float, q: float, rr: float, cap: float) -> EmbeddingResult:
    """Ratio ||x||_{p,rr} / ||x||_{p,q} against a cap, for q <= rr.

    The zero operator gives 0/0, reported as ratio 0 with the degenerate
    flag set.
    """
    p, q, rr = float(p), float(q), float(rr)
    if not (1.0 <= p < math.inf):
        raise ContractViolationError(f"p={p} out of range [1, oo)")
    if not (1.0 <= q <= rr):
        raise ContractViolationError(f"need 1 <= q <= rr, got q={q}, rr={rr}")
    num = lorentz_norm(x, p, rr)
    den = lorentz_norm(x, p, q)
    if den == 0.0:
        if num != 0.0:
            raise AssertionError("nonzero numerator with zero denominator cannot occur")
        return EmbeddingResult(0.0, True, True)
    ratio = num / den
    return EmbeddingResult(float(ratio), bool(ratio <= cap), False)


class HolderResult(NamedTuple):
    lhs: float
    rhs: float
    passed: bool


def check_holder(x: Operator, y: Operator, p0: float, p1: float, q: float) -> HolderResult:
    """||xy||_{p,q} <= 2^(1/p) ||x||_{p0,oo} ||y||_{p1,q} with 1/p = 1/p0 + 1/p1."""
    p0, p1, q = float(p0), float(p1), float(q)
    if not (0.0 < p0 < math.inf and 0.0 < p1 < math.inf):
        raise ContractViolationError("p0, p1 must lie in (0, oo)")
    if not (0.0 < q < math.inf):
        raise ContractViolationError("q must lie in (0, oo)")
    if x.algebra != y.algebra:
        raise StructureError("operands belong to different algebras")
    p = 1.0 / (1.0 / p0 + 1.0 / p1)
    lhs = lorentz_norm(x * y, p, q)
    rhs = 2.0 ** (1.0 / p) * lorentz_norm(x, p0, math.inf) * lorentz_norm(y, p1, q)
    return HolderResult(lhs, rhs, bool(lhs <= rhs * (1.0 + 1e-10)))


def _conjugate(p: float) -> float:
    if math.isinf(p):
        return 1.0
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


@dataclass(frozen=True)
class HormanderExponents:
    """Exponent bookkeeping for the multiplier and Paley inequalities.

    ``r`` solves 1/r = 1/p - 1/q (r = oo when p = q) and feeds the weak-norm
    bound of the multiplier theorem; ``s`` solves 1/s = 2/p - 1 (s = oo when
    p = 2) and feeds the Paley inequality.
    """

    p: float
    q: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        if self.q is not None:
            object.__setattr__(self, "q", float(self.q))

    @classmethod
    def hormander(cls, p: float, q: float) -> "HormanderExponents":
        p, q = float(p), float(q)
        if not (1.0 < p <= 2.0 <= q < math.inf):
            raise ContractViolationError(f"need 1 < p <= 2 <= q < oo, got p={p}, q={q}")
        return cls(p, q)

    @classmethod
    def paley(cls, p: float) -> "HormanderExponents":
        p = float(p)
        if not (1.0 < p <= 2.0):
            raise ContractViolationError(f"need 1 < p <= 2, got p={p}")
        return cls(p, None)

    @property
    def p_conj(self) -> float:
        return _conjugate(self.p)

    @property
    def q_conj(self) -> float:
        if self.q is None:
            raise ContractViolationError("q is not set on a Paley-mode instance")
        return _conjugate(self.q)

    @property
    def r(self) -> float:
        """1/r = 1/p - 1/q."""
        if self.q is None:
            raise ContractViolationError("q is not set on a Paley-mode instance")
        inv = 1.0 / self.p - 1.0 / self.q
        return math.inf if inv <= 0.0 else 1.0 / inv

    @property
    def s(self) -> float:
        """1/s = 2/p - 1."""
        inv = 2.0 / self.p - 1.0
        return math.inf if inv <= 0.0 else 1.0 / inv
