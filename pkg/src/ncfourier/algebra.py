"""Block-diagonal operator algebras with a weighted trace.

An algebra is a finite direct sum of full matrix blocks, each carrying a
positive trace weight.  The trace of an element is

    tr_w(x) = sum_k  w_k * tr(x_k),

so non-uniform weights model non-normalized (semifinite-flavored) traces.
Every finite-dimensional algebra with a faithful trace has this form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ContractViolationError, NumericalError, StructureError

__all__ = [
    "TraceAlgebra",
    "Operator",
    "trace",
    "abs_power",
    "hermitian_eig",
    "random_operator",
    "singular_pairs",
]

# Off-diagonal Frobenius mass below this fraction of the input norm counts
# as converged for the Jacobi sweep.
_JACOBI_REL_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class TraceAlgebra:
    """A weighted direct sum of matrix blocks.

    Parameters
    ----------
    blocks : sequence of (dim, weight)
        Block dimensions (>= 1) and trace weights (> 0), in order.
    name : str
        Display label.
    """

    blocks: tuple[tuple[int, float], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        blocks = tuple((int(d), float(w)) for d, w in self.blocks)
        if not blocks:
            raise ContractViolationError("algebra needs at least one block")
        for d, w in blocks:
            if d < 1:
                raise ContractViolationError(f"block dimension {d} < 1")
            if not (w > 0.0 and math.isfinite(w)):
                raise ContractViolationError(f"block weight {w} must be positive and finite")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.blocks)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.blocks)

    @property
    def total_mass(self) -> float:
        """Trace of the identity: sum_k w_k * d_k."""
        return float(sum(w * d for d, w in self.blocks))

    @cached_property
    def flat_dim(self) -> int:
        return sum(d * d for d, _ in self.blocks)

    @cached_property
    def _flat_slices(self) -> tuple[slice, ...]:
        out, off = [], 0
        for d, _ in self.blocks:
            out.append(slice(off, off + d * d))
            off += d * d
        return tuple(out)

    @cached_property
    def flat_weights(self) -> np.ndarray:
        """Per-entry trace weight, repeating w_k over block k's d_k^2 slots."""
        w = np.concatenate([np.full(d * d, wk) for d, wk in self.blocks])
        w.flags.writeable = False
        return w

    @cached_property
    def _all_dim1(self) -> bool:
        return all(d == 1 for d, _ in self.blocks)

    def operator(self, mats) -> "Operator":
        """Wrap per-block matrices as an element of this algebra."""
        return Operator(self, tuple(np.asarray(m, dtype=complex) for m in mats))

    def identity(self) -> "Operator":
        return self.operator([np.eye(d) for d in self.dims])

    def zero(self) -> "Operator":
        return self.operator([np.zeros((d, d)) for d in self.dims])

    def flatten(self, x: "Operator") -> np.ndarray:
        """Row-major entries of all blocks as one complex vector."""
        if x.algebra != self:
            raise StructureError("operator does not belong to this algebra")
        return np.concatenate([m.reshape(-1) for m in x.mats])

    def unflatten(self, vec: np.ndarray) -> "Operator":
        vec = np.array(vec, dtype=complex)
        if vec.shape != (self.flat_dim,):
            raise StructureError(f"expected flat vector of length {self.flat_dim}, got {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise StructureError("non-finite entries")
        vec.flags.writeable = False
        mats = tuple(vec[s].reshape(d, d) for s, d in zip(self._flat_slices, self.dims))
        return Operator._trusted(self, mats)


def _freeze(arrays):
    out = []
    for a in arrays:
        a.flags.writeable = False
        out.append(a)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Operator:
    """One complex square matrix per block of a :class:`TraceAlgebra`.

    Values are immutable after construction; all arithmetic returns new
    operators.
    """

    algebra: TraceAlgebra
    mats: tuple[np.ndarray, ...]

    def __post_init__(self):
        dims = self.algebra.dims
        if len(self.mats) != len(dims):
            raise StructureError(f"expected {len(dims)} blocks, got {len(self.mats)}")
        frozen = []
        for k, (m, d) in enumerate(zip(self.mats, dims)):
            m = np.array(m, dtype=complex)
            if m.shape != (d, d):
                raise StructureError(f"block {k}: expected shape {(d, d)}, got {m.shape}")
            if not np.all(np.isfinite(m)):
                raise StructureError(f"block {k}: non-finite entries")
            m.flags.writeable = False
            frozen.append(m)
        object.__setattr__(self, "mats", tuple(frozen))

    @classmethod
    def _trusted(cls, algebra: TraceAlgebra, mats) -> "Operator":
        """Construct without re-validating; callers guarantee the invariants."""
        self = object.__new__(cls)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "mats", tuple(mats))
        return self

    def _check_same(self, other: "Operator"):
        if not isinstance(other, Operator):
            raise StructureError(f"expected Operator, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise StructureError("operands belong to different algebras")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same(other)
        return Operator._trusted(self.algebra, _freeze(a + b for a, b in zip(self.mats, other.mats)))

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same(other)
        return Operator._trusted(self.algebra, _freeze(a - b for a, b in zip(self.mats, other.mats)))

    def __neg__(self) -> "Operator":
        return Operator._trusted(self.algebra, _freeze(-a for a in self.mats))

    def __mul__(self, other):
        if isinstance(other, Operator):
            self._check_same(other)
            return Operator._trusted(self.algebra, _freeze(a @ b for a, b in zip(self.mats, other.mats)))
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c: complex) -> "Operator":
        c = complex(c)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise StructureError(f"non-finite scalar {c}")
        return Operator._trusted(self.algebra, _freeze(c * a for a in self.mats))

    def adjoint(self) -> "Operator":
        """Blockwise conjugate transpose."""
        return Operator._trusted(self.algebra, _freeze(np.ascontiguousarray(a.conj().T) for a in self.mats))

    def max_abs(self) -> float:
        """Largest entry magnitude across all blocks."""
        return max(float(np.max(np.abs(m))) if m.size else 0.0 for m in self.mats)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol


def trace(x: Operator) -> complex:
    """Weighted trace  sum_k w_k * tr(x_k)."""
    return complex(sum(w * np.trace(m) for (_, w), m in zip(x.algebra.blocks, x.mats)))


def _offdiag_frobenius(a: np.ndarray) -> float:
    d = np.diag(np.diag(a))
    return float(np.linalg.norm(a - d))


def _jacobi_hermitian(a: np.ndarray, block_index: int = 0):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns (eigenvalues ascending-unsorted on the diagonal, unitary V) with
    a = V diag V*.  Converges when the off-diagonal Frobenius mass drops
    below 1e-12 times the Frobenius norm of the input.
    """
    n = a.shape[0]
    a = np.array(a, dtype=complex)
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a[0, 0].real.reshape(1), v
    target = _JACOBI_REL_TOL * max(float(np.linalg.norm(a)), 1e-300)
    for _ in range(_JACOBI_MAX_SWEEPS):
        if _offdiag_frobenius(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = a[p, q]
                b = abs(beta)
                if b == 0.0:
                    continue
                # Rotation in the (p, q) plane.  With s carrying the phase of
                # conj(beta), the pivot equation reduces to the real tangent
                # equation t^2 - 2*tau*t - 1 = 0; take the small root.
                tau = (a[q, q].real - a[p, p].real) / (2.0 * b)
                t = -math.copysign(1.0, tau) / (abs(tau) + math.hypot(tau, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c * (beta.conjugate() / b)
                g = np.array([[c, -s.conjugate()], [s, c]], dtype=complex)
                a[:, [p, q]] = a[:, [p, q]] @ g
                a[[p, q], :] = g.conj().T @ a[[p, q], :]
                v[:, [p, q]] = v[:, [p, q]] @ g
    else:
        raise NumericalError(f"Jacobi eigensolver did not converge on block {block_index}")
    return np.diag(a).real.copy(), v


def hermitian_eig(x: Operator):
    """Per-block spectral decomposition of a Hermitian operator.

    Returns a list of (eigenvalues, eigenvectors) pairs, one per block, with
    eigenvalues sorted descending (ties kept in stable order) and eigenvectors
    as the matching unitary columns.

    Raises
    ------
    ContractViolationError
        If some block is not Hermitian within 1e-10 (max entry of ``x - x*``,
        relative to the entry scale).
    NumericalError
        If the Jacobi sweep fails to converge.
    """
    out = []
    for k, m in enumerate(x.mats):
        scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
        herm_defect = float(np.max(np.abs(m - m.conj().T)))
        if herm_defect > 1e-10 * scale:
            raise ContractViolationError(
                f"block {k} not Hermitian: max |x - x*| entry = {herm_defect:.3e}"
            )
        h = 0.5 * (m + m.conj().T)
        vals, vecs = _jacobi_hermitian(h, block_index=k)
        order = np.argsort(-vals, kind="stable")
        out.append((vals[order], vecs[:, order]))
    return out


def _spectral_map(x: Operator, fn) -> Operator:
    """Apply fn to the eigenvalues of x*x per block and recompose."""
    mats = []
    for k, m in enumerate(x.mats):
        h = m.conj().T @ m
        vals, vecs = _jacobi_hermitian(h, block_index=k)
        lam_max = float(np.max(vals)) if vals.size else 0.0
        floor = -1e-12 * max(1.0, lam_max)
        if np.any(vals < floor):
            raise NumericalError(
                f"block {k}: eigenvalue {float(np.min(vals)):.3e} of x*x below clip threshold"
            )
        vals = np.clip(vals, 0.0, None)
        mats.append((vecs * fn(vals)) @ vecs.conj().T)
    return Operator(x.algebra, tuple(mats))


def abs_power(x: Operator, p: float) -> Operator:
    """|x|^p with |x| = (x*x)^(1/2), computed blockwise.

    Eigenvalues of x*x are clipped at zero (tiny negatives are roundoff) and
    raised to p/2; the result is positive semidefinite.
    """
    p = float(p)
    if not p > 0.0:
        raise ContractViolationError(f"exponent p={p} must be positive")
    half = p / 2.0
    return _spectral_map(x, lambda lam: lam**half)


def _eigh_block(h: np.ndarray):
    """Eigendecomposition of one Hermitian block, eigenvalues descending.

    Dimensions 1 and 2 use closed forms (what a single Jacobi rotation
    produces); larger blocks run the Jacobi sweep.
    """
    d = h.shape[0]
    if d == 1:
        return np.array([h[0, 0].real]), np.eye(1, dtype=complex)
    if d == 2:
        alpha = h[0, 0].real
        gamma = h[1, 1].real
        beta = h[0, 1]
        half = 0.5 * (alpha + gamma)
        disc = math.hypot(0.5 * (alpha - gamma), abs(beta))
        lam = np.array([half + disc, half - disc])
        if disc <= 1e-300 or (abs(beta) == 0.0 and alpha == gamma):
            return lam, np.eye(2, dtype=complex)
        # eigenvector for lam[0]: proportional to (beta, lam0 - alpha) or
        # ((lam0 - gamma), conj(beta)); pick the better conditioned one
        c1 = np.array([beta, lam[0] - alpha])
        c2 = np.array([lam[0] - gamma, beta.conjugate()])
        v0 = c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2
        nrm = np.linalg.norm(v0)
        if nrm == 0.0:
            return lam, np.eye(2, dtype=complex)
        v0 = v0 / nrm
        v1 = np.array([-v0[1].conjugate(), v0[0].conjugate()])
        return lam, np.stack([v0, v1], axis=1)
    vals, vecs = _jacobi_hermitian(h)
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]


def _sv_block(m: np.ndarray) -> np.ndarray:
    """Singular values of one block, descending."""
    d = m.shape[0]
    if d == 1:
        return np.array([abs(m[0, 0])])
    if d == 2:
        # Eigenvalues of the 2x2 Hermitian m*m in closed form; this is what a
        # single Jacobi rotation produces exactly.
        a00 = abs(m[0, 0]) ** 2 + abs(m[1, 0]) ** 2
        a11 = abs(m[0, 1]) ** 2 + abs(m[1, 1]) ** 2
        a01 = m[0, 0].conjugate() * m[0, 1] + m[1, 0].conjugate() * m[1, 1]
        half = 0.5 * (a00 + a11)
        disc = math.hypot(0.5 * (a00 - a11), abs(a01))
        lo = max(half - disc, 0.0)
        return np.sqrt(np.array([half + disc, lo]))
    h = m.conj().T @ m
    vals, _ = _jacobi_hermitian(h)
    vals = np.clip(vals, 0.0, None)
    return np.sqrt(np.sort(vals)[::-1])


def singular_pairs(x: Operator):
    """All singular values of x with their block weights.

    Returns (values, weights) as float arrays sorted by value descending;
    ties keep the stable (block index, position) order.  Each eigenvalue of
    |x| appears with multiplicity, weighted by its block's trace weight.
    """
    alg = x.algebra
    if alg._all_dim1:
        vals = np.abs(alg.flatten(x))
        weights = np.asarray(alg.flat_weights)
    else:
        parts_v, parts_w = [], []
        for (d, w), m in zip(alg.blocks, x.mats):
            sv = _sv_block(m)
            parts_v.append(sv)
            parts_w.append(np.full(d, w))
        vals = np.concatenate(parts_v)
        weights = np.concatenate(parts_w)
    order = np.argsort(-vals, kind="stable")
    return vals[order], weights[order]


def random_operator(algebra: TraceAlgebra, seed: int, ensemble: str = "general-complex") -> Operator:
    """Deterministic random element of an algebra.

    Ensembles:
      * ``general-complex`` -- independent standard complex Gaussian entries
      * ``hermitian``       -- symmetrized general draw
      * ``positive``        -- x*x of a general draw
      * ``unitary``         -- polar unitary factor of a general draw

    The same (seed, ensemble) always returns bit-identical output.
    """
    rng = np.random.default_rng(seed)
    n = algebra.flat_dim
    flat = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    x = algebra.unflatten(flat)
    if ensemble == "general-complex":
        return x
    if ensemble == "hermitian":
        return Operator._trusted(
            algebra, _freeze(0.5 * (m + m.conj().T) for m in x.mats)
        )
    if ensemble == "positive":
        return Operator._trusted(algebra, _freeze(m.conj().T @ m for m in x.mats))
    if ensemble == "unitary":
        inv_sqrt = _spectral_map(x, lambda lam: np.clip(lam, 1e-300, None) ** -0.5)
        return x * inv_sqrt
    raise ContractViolationError(f"unknown ensemble {ensemble!r}")
