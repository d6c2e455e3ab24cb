"""Finite groups with explicit unitary irreducible representations.

A group is a multiplication table over indices 0..n-1 (identity at 0)
together with the complete list of irreps, each given as one unitary matrix
per element.  Validation is mandatory and exhaustive at this scale:
associativity, identity/inverses, the homomorphism and unitarity of every
irrep, the completeness count sum(d^2) = |G|, and Schur orthogonality of
matrix coefficients.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractViolationError

__all__ = [
    "Irrep",
    "GroupData",
    "cyclic_group",
    "product_group",
    "dihedral_group",
    "symmetric3_group",
    "quaternion8_group",
    "build_group",
    "builtin_group_tokens",
    "load_group_file",
    "parse_complex",
]

_ASSOC_EXHAUSTIVE_MAX = 48


@dataclass(frozen=True, eq=False)
class Irrep:
    """One irreducible representation: matrices[g] is unitary of size dim."""

    dim: int
    matrices: np.ndarray  # shape (order, dim, dim), complex

    def __post_init__(self):
        m = np.array(self.matrices, dtype=complex)
        if m.ndim != 3 or m.shape[1] != self.dim or m.shape[2] != self.dim:
            raise ContractViolationError(f"irrep matrices must have shape (order, {self.dim}, {self.dim})")
        m.flags.writeable = False
        object.__setattr__(self, "matrices", m)
        object.__setattr__(self, "dim", int(self.dim))


@dataclass(frozen=True, eq=False)
class GroupData:
    name: str
    order: int
    mult_table: np.ndarray
    inverse_table: np.ndarray
    irreps: tuple[Irrep, ...]

    def __post_init__(self):
        mult = np.array(self.mult_table, dtype=np.int64)
        n = int(self.order)
        if mult.shape != (n, n):
            raise ContractViolationError(f"multiplication table must be {n}x{n}")
        if np.any(mult < 0) or np.any(mult >= n):
            raise ContractViolationError("multiplication table entries out of range")
        inv = np.array(self.inverse_table, dtype=np.int64)
        if inv.shape != (n,):
            raise ContractViolationError(f"inverse table must have length {n}")
        mult.flags.writeable = False
        inv.flags.writeable = False
        object.__setattr__(self, "order", n)
        object.__setattr__(self, "mult_table", mult)
        object.__setattr__(self, "inverse_table", inv)
        object.__setattr__(self, "irreps", tuple(self.irreps))
        self._validate()

    def _validate(self):
        n, mult, inv = self.order, self.mult_table, self.inverse_table
        idx = np.arange(n)
        if not (np.array_equal(mult[0], idx) and np.array_equal(mult[:, 0], idx)):
            raise ContractViolationError(f"group {self.name}: element 0 is not the identity")
        if not (np.all(mult[idx, inv] == 0) and np.all(mult[inv, idx] == 0)):
            raise ContractViolationError(f"group {self.name}: inverse table is wrong")
        if n <= _ASSOC_EXHAUSTIVE_MAX:
            left = mult[mult]            # [a, b, c] -> (ab)c
            right = mult[:, mult]        # [a, b, c] -> a(bc)
            if not np.array_equal(left, right):
                raise ContractViolationError(f"group {self.name}: multiplication is not associative")
        dims = [ir.dim for ir in self.irreps]
        if sum(d * d for d in dims) != n:
            raise ContractViolationError(
                f"group {self.name}: sum of squared irrep dimensions {sum(d*d for d in dims)} != order {n}"
            )
        eye_like = {d: np.eye(d) for d in set(dims)}
        for a, ir in enumerate(self.irreps):
            mats = ir.matrices
            if mats.shape[0] != n:
                raise ContractViolationError(f"group {self.name}: irrep {a} has wrong element count")
            unit = np.einsum("gji,gjk->gik", mats.conj(), mats)
            if np.max(np.abs(unit - eye_like[ir.dim])) > 1e-10:
                raise ContractViolationError(f"group {self.name}: irrep {a} is not unitary")
            hom = np.einsum("gij,hjk->ghik", mats, mats) - mats[mult]
            if np.max(np.abs(hom)) > 1e-10:
                raise ContractViolationError(f"group {self.name}: irrep {a} is not a homomorphism")
        for a, ir_a in enumerate(self.irreps):
            for b, ir_b in enumerate(self.irreps):
                gram = np.einsum("gij,gkl->ijkl", ir_a.matrices, ir_b.matrices.conj())
                if a == b:
                    d = ir_a.dim
                    expect = (n / d) * np.einsum("ik,jl->ijkl", np.eye(d), np.eye(d))
                else:
                    expect = np.zeros_like(gram)
                if np.max(np.abs(gram - expect)) > 1e-9:
                    raise ContractViolationError(
                        f"group {self.name}: Schur orthogonality fails for irreps {a}, {b}"
                    )

    @property
    def irrep_dims(self) -> tuple[int, ...]:
        return tuple(ir.dim for ir in self.irreps)

    def multiply(self, g: int, h: int) -> int:
        return int(self.mult_table[g, h])

    def inverse(self, g: int) -> int:
        return int(self.inverse_table[g])


def _inverse_from_table(mult: np.ndarray) -> np.ndarray:
    n = mult.shape[0]
    inv = np.full(n, -1, dtype=np.int64)
    rows, cols = np.nonzero(mult == 0)
    inv[rows] = cols
    if np.any(inv < 0):
        raise ContractViolationError("some element has no inverse")
    return inv


def cyclic_group(n: int) -> GroupData:
    """Z_n with character irreps chi_k(g) = exp(2 pi i k g / n)."""
    n = int(n)
    if n < 1:
        raise ContractViolationError(f"cyclic order {n} must be >= 1")
    idx = np.arange(n)
    mult = (idx[:, None] + idx[None, :]) % n
    irreps = []
    for k in range(n):
        chars = np.exp(2j * np.pi * k * idx / n)
        irreps.append(Irrep(1, chars.reshape(n, 1, 1)))
    return GroupData(f"cyclic({n})", n, mult, (-idx) % n, tuple(irreps))


def product_group(orders) -> GroupData:
    """Direct product of cyclic groups, with tensor-product characters."""
    orders = tuple(int(m) for m in orders)
    if not orders or any(m < 1 for m in orders):
        raise ContractViolationError(f"invalid product orders {orders}")
    n = int(np.prod(orders))
    coords = np.stack(np.unravel_index(np.arange(n), orders), axis=1)  # (n, k)
    sums = (coords[:, None, :] + coords[None, :, :]) % np.asarray(orders)
    mult = np.ravel_multi_index(tuple(sums[..., i] for i in range(len(orders))), orders)
    inv = np.ravel_multi_index(tuple((-coords[:, i]) % orders[i] for i in range(len(orders))), orders)
    irreps = []
    for k in range(n):
        kvec = np.unravel_index(k, orders)
        phase = sum(kv * coords[:, i] / orders[i] for i, kv in enumerate(kvec))
        chars = np.exp(2j * np.pi * phase)
        irreps.append(Irrep(1, chars.reshape(n, 1, 1)))
    label = "product(" + ",".join(str(m) for m in orders) + ")"
    return GroupData(label, n, mult, inv, tuple(irreps))


def _dihedral_tables(n: int):
    # element (eps, j): index eps*n + j; s r^a s = r^{-a}
    size = 2 * n
    mult = np.empty((size, size), dtype=np.int64)
    for e1 in (0, 1):
        for a in range(n):
            for e2 in (0, 1):
                for b in range(n):
                    if e1 == 0 and e2 == 0:
                        res = (0, (a + b) % n)
                    elif e1 == 0 and e2 == 1:
                        res = (1, (b - a) % n)
                    elif e1 == 1 and e2 == 0:
                        res = (1, (a + b) % n)
                    else:
                        res = (0, (b - a) % n)
                    mult[e1 * n + a, e2 * n + b] = res[0] * n + res[1]
    return mult


def dihedral_group(n: int, name: str | None = None) -> GroupData:
    """D_n of order 2n: rotations r^j at indices 0..n-1, reflections s r^j after."""
    n = int(n)
    if n < 1:
        raise ContractViolationError(f"dihedral parameter {n} must be >= 1")
    size = 2 * n
    mult = _dihedral_tables(n)
    inv = _inverse_from_table(mult)
    j = np.arange(n)
    irreps = [Irrep(1, np.ones((size, 1, 1), dtype=complex))]
    sign_refl = np.concatenate([np.ones(n), -np.ones(n)])
    irreps.append(Irrep(1, sign_refl.astype(complex).reshape(size, 1, 1)))
    if n % 2 == 0:
        alt = np.concatenate([(-1.0) ** j, (-1.0) ** j])
        irreps.append(Irrep(1, alt.astype(complex).reshape(size, 1, 1)))
        irreps.append(Irrep(1, (alt * sign_refl).astype(complex).reshape(size, 1, 1)))
    for h in range(1, (n + 1) // 2 if n % 2 else n // 2):
        w = np.exp(2j * np.pi * h * j / n)
        mats = np.zeros((size, 2, 2), dtype=complex)
        mats[:n, 0, 0] = w
        mats[:n, 1, 1] = w.conj()
        mats[n:, 0, 1] = w.conj()
        mats[n:, 1, 0] = w
        irreps.append(Irrep(2, mats))
    return GroupData(name or f"dihedral({n})", size, mult, inv, tuple(irreps))


def symmetric3_group() -> GroupData:
    """S_3, realized as the dihedral group of the triangle."""
    return dihedral_group(3, name="symmetric3")


def quaternion8_group() -> GroupData:
    """Q_8 = {+-1, +-i, +-j, +-k}: four characters and one 2-dim irrep."""
    # element index = 2*unit + sign, units ordered (1, i, j, k)
    unit_mul = {
        (0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (0, 3): (3, 0),
        (1, 0): (1, 0), (1, 1): (0, 1), (1, 2): (3, 0), (1, 3): (2, 1),
        (2, 0): (2, 0), (2, 1): (3, 1), (2, 2): (0, 1), (2, 3): (1, 0),
        (3, 0): (3, 0), (3, 1): (2, 0), (3, 2): (1, 1), (3, 3): (0, 1),
    }
    mult = np.empty((8, 8), dtype=np.int64)
    for u1 in range(4):
        for s1 in range(2):
            for u2 in range(4):
                for s2 in range(2):
                    u3, s3 = unit_mul[(u1, u2)]
                    sign = (s1 + s2 + s3) % 2
                    mult[2 * u1 + s1, 2 * u2 + s2] = 2 * u3 + sign
    inv = _inverse_from_table(mult)
    irreps = []
    for a in (1.0, -1.0):
        for b in (1.0, -1.0):
            vals = np.array([1, 1, a, a, b, b, a * b, a * b], dtype=complex)
            irreps.append(Irrep(1, vals.reshape(8, 1, 1)))
    base = {
        0: np.eye(2, dtype=complex),
        1: np.array([[1j, 0], [0, -1j]]),
        2: np.array([[0, 1], [-1, 0]], dtype=complex),
        3: np.array([[0, 1j], [1j, 0]]),
    }
    mats = np.stack([((-1.0) ** s) * base[u] for u in range(4) for s in range(2)])
    irreps.append(Irrep(2, mats))
    return GroupData("quaternion8", 8, mult, inv, tuple(irreps))


_TOKEN_RE = re.compile(r"^\s*([a-z0-9_]+)\s*(?:\(\s*([0-9,\s]*)\s*\))?\s*$")


def build_group(token: str) -> GroupData:
    """Build a group from a text token.

    Accepted forms: ``cyclic(n)``, ``product(n1,n2,...)``, ``dihedral(n)``,
    ``symmetric3``, ``quaternion8``, and ``file:<path>`` for a group
    definition file.
    """
    token = token.strip()
    if token.startswith("file:"):
        return load_group_file(token[len("file:"):])
    m = _TOKEN_RE.match(token)
    if not m:
        raise ContractViolationError(f"cannot parse group token {token!r}")
    kind, args = m.group(1), m.group(2)
    nums = [int(x) for x in args.split(",")] if args else []
    if kind == "cyclic" and len(nums) == 1:
        return cyclic_group(nums[0])
    if kind == "product" and nums:
        return product_group(nums)
    if kind == "dihedral" and len(nums) == 1:
        return dihedral_group(nums[0])
    if kind == "symmetric3" and not nums:
        return symmetric3_group()
    if kind == "quaternion8" and not nums:
        return quaternion8_group()
    raise ContractViolationError(f"unknown group token {token!r}")


def builtin_group_tokens() -> tuple[str, ...]:
    """Tokens of every built-in group, orders 2 through 24."""
    return tuple(
        [f"cyclic({n})" for n in range(2, 13)]
        + ["product(2,2)", "product(2,4)"]
        + [f"dihedral({n})" for n in range(3, 7)]
        + ["symmetric3", "quaternion8"]
    )


_COMPLEX_RE = re.compile(
    r"^\s*(?P<real>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?P<imag>[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)?i?\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse an ``a+bi`` literal: '2', '-1.5i', '0.5-0.25i', 'i', '1+i'."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ContractViolationError("empty complex literal")
    if not s.endswith("i"):
        try:
            return complex(float(s), 0.0)
        except ValueError:
            raise ContractViolationError(f"bad complex literal {text!r}") from None
    body = s[:-1]
    # split off the imaginary coefficient: last sign not part of an exponent
    split = -1
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            split = k
            break
    if split == -1:
        real_part, imag_part = "", body
    else:
        real_part, imag_part = body[:split], body[split:]
    if imag_part in ("", "+"):
        imag = 1.0
    elif imag_part == "-":
        imag = -1.0
    else:
        try:
            imag = float(imag_part)
        except ValueError:
            raise ContractViolationError(f"bad complex literal {text!r}") from None
    if real_part in ("", "+"):
        real = 0.0
    else:
        try:
            real = float(real_part)
        except ValueError:
            raise ContractViolationError(f"bad complex literal {text!r}") from None
    return complex(real, imag)


def load_group_file(path) -> GroupData:
    """Read a group definition file.

    Grammar (line oriented, '#' starts a comment):

        name <label>          optional
        order <n>
        table                 followed by n lines of n indices
        irrep <d>             followed by n lines of d*d entries, row major,
                              entries are a+bi literals; repeatable

    The inverse table is derived from the multiplication table, and the
    result passes the full validation (associativity, unitarity,
    homomorphism, completeness, Schur orthogonality).
    """
    path = Path(path)
    if not path.exists():
        raise ContractViolationError(f"group file {path} does not exist")
    lines = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise ContractViolationError(f"group file {path}: unexpected end of file")
        line = lines[pos]
        pos += 1
        return line

    name = path.stem
    order = None
    mult = None
    irreps: list[Irrep] = []
    while pos < len(lines):
        head = take().split()
        key = head[0].lower()
        if key == "name" and len(head) >= 2:
            name = " ".join(head[1:])
        elif key == "order" and len(head) == 2:
            order = int(head[1])
        elif key == "table":
            if order is None:
                raise ContractViolationError(f"group file {path}: 'order' must precede 'table'")
            rows = []
            for _ in range(order):
                row = [int(tok) for tok in take().split()]
                if len(row) != order:
                    raise ContractViolationError(f"group file {path}: table row has {len(row)} entries")
                rows.append(row)
            mult = np.array(rows, dtype=np.int64)
        elif key == "irrep" and len(head) == 2:
            if order is None:
                raise ContractViolationError(f"group file {path}: 'order' must precede 'irrep'")
            d = int(head[1])
            mats = np.empty((order, d, d), dtype=complex)
            for g in range(order):
                entries = [parse_complex(tok) for tok in take().split()]
                if len(entries) != d * d:
                    raise ContractViolationError(
                        f"group file {path}: irrep of dim {d} needs {d*d} entries per element"
                    )
                mats[g] = np.array(entries, dtype=complex).reshape(d, d)
            irreps.append(Irrep(d, mats))
        else:
            raise ContractViolationError(f"group file {path}: cannot parse line {head!r}")
    if order is None or mult is None:
        raise ContractViolationError(f"group file {path}: missing order or table section")
    if not irreps:
        raise ContractViolationError(f"group file {path}: no irreps given")
    inv = _inverse_from_table(mult)
    return GroupData(name, order, mult, inv, tuple(irreps))
