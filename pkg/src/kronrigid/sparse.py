"""Exact sparse matrices in coordinate form, with the Kronecker toolkit.

Entries are stored as a sorted coordinate list ``(i, j, v)`` with every
stored value nonzero, so ``nnz`` (the wire-count metric everything else is
built on) is canonical.  All arithmetic is exact; results of additions and
products are re-sparsified so cancellations never leave explicit zeros.

Row/column index layout for Kronecker products follows ``IndexCodec``: the
left operand occupies the high digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as _sp

from .errors import ContextMismatch, DimensionCapExceeded, DimensionMismatch
from .fields import FieldCtx

# Guardrail against accidental q**n explosion; configurable.
DIMENSION_CAP = 2**26

# Above this estimated op count, prime-field products go through scipy.
_SCIPY_MATMUL_THRESHOLD = 200_000


def set_dimension_cap(cap: int) -> None:
    global DIMENSION_CAP
    DIMENSION_CAP = cap


@dataclass(frozen=True)
class IndexCodec:
    """Mixed-radix index layout: x in [q]_0^n maps to sum x[i] * q^(n-1-i).

    Slot 0 (the leftmost Kronecker operand) is the most significant digit.
    """

    q: int
    n: int

    def encode(self, digits) -> int:
        if len(digits) != self.n:
            raise ValueError(f"expected {self.n} digits")
        idx = 0
        for d in digits:
            if not 0 <= d < self.q:
                raise ValueError(f"digit {d} out of range for base {self.q}")
            idx = idx * self.q + d
        return idx

    def decode(self, index: int):
        digits = [0] * self.n
        for slot in range(self.n - 1, -1, -1):
            index, digits[slot] = divmod(index, self.q)
        if index:
            raise ValueError("index out of range")
        return tuple(digits)


class SparseMatrix:
    """Immutable exact sparse matrix over a FieldCtx."""

    __slots__ = ("rows", "cols", "ctx", "entries", "_row_map")

    def __init__(self, rows, cols, ctx, entries, _checked=False):
        self.rows = rows
        self.cols = cols
        self.ctx = ctx
        if not _checked:
            entries = sorted(entries)
            prev = None
            for (i, j, v) in entries:
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ValueError(f"entry ({i}, {j}) out of bounds")
                if not v:
                    raise ValueError(f"explicit zero stored at ({i}, {j})")
                if prev == (i, j):
                    raise ValueError(f"duplicate entry at ({i}, {j})")
                prev = (i, j)
        self.entries = tuple(entries)
        self._row_map = None

    @classmethod
    def from_triplets(cls, rows, cols, ctx, triplets):
        """Build from possibly unsorted/duplicated triplets; duplicates sum."""
        acc = {}
        for i, j, v in triplets:
            key = (i, j)
            if key in acc:
                acc[key] = ctx.add_raw(acc[key], ctx.coerce(v))
            else:
                acc[key] = ctx.coerce(v)
        entries = [(i, j, v) for (i, j), v in acc.items() if v]
        entries.sort()
        return cls(rows, cols, ctx, entries)

    @classmethod
    def from_dense(cls, dense_rows, ctx):
        entries = []
        cols = len(dense_rows[0]) if dense_rows else 0
        for i, row in enumerate(dense_rows):
            for j, v in enumerate(row):
                cv = ctx.coerce(v)
                if cv:
                    entries.append((i, j, cv))
        return cls(len(dense_rows), cols, ctx, entries, _checked=True)

    # -- basic queries ----------------------------------------------------

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @property
    def nnz_r(self) -> int:
        counts = {}
        for i, _, _ in self.entries:
            counts[i] = counts.get(i, 0) + 1
        return max(counts.values(), default=0)

    @property
    def nnz_c(self) -> int:
        counts = {}
        for _, j, _ in self.entries:
            counts[j] = counts.get(j, 0) + 1
        return max(counts.values(), default=0)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row_map(self):
        """dict row -> list of (col, value); cached."""
        if self._row_map is None:
            rm = {}
            for i, j, v in self.entries:
                rm.setdefault(i, []).append((j, v))
            self._row_map = rm
        return self._row_map

    def get(self, i, j):
        for jj, v in self.row_map().get(i, ()):
            if jj == j:
                return v
        return self.ctx.zero_raw()

    def to_dense(self):
        zero = self.ctx.zero_raw()
        dense = [[zero] * self.cols for _ in range(self.rows)]
        for i, j, v in self.entries:
            dense[i][j] = v
        return dense

    def to_csr(self):
        """scipy int64 CSR of the residues (prime field only)."""
        if not self.ctx.is_prime_field:
            raise ValueError("csr export requires a prime field")
        if self.entries:
            ii, jj, vv = zip(*self.entries)
        else:
            ii, jj, vv = (), (), ()
        return _sp.csr_matrix(
            (np.array(vv, dtype=np.int64), (np.array(ii), np.array(jj))),
            shape=(self.rows, self.cols),
        )

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.ctx == other.ctx
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.ctx, self.entries))

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, {self.ctx}, nnz={self.nnz})"


def _require_ctx(a: SparseMatrix, b: SparseMatrix):
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx} vs {b.ctx}")


def identity(k: int, ctx: FieldCtx) -> SparseMatrix:
    one = ctx.one_raw()
    return SparseMatrix(k, k, ctx, [(i, i, one) for i in range(k)], _checked=True)


def diagonal(values, ctx: FieldCtx) -> SparseMatrix:
    k = len(values)
    entries = []
    for i, v in enumerate(values):
        cv = ctx.coerce(v)
        if cv:
            entries.append((i, i, cv))
    return SparseMatrix(k, k, ctx, entries, _checked=True)


def transpose(a: SparseMatrix) -> SparseMatrix:
    entries = sorted((j, i, v) for i, j, v in a.entries)
    return SparseMatrix(a.cols, a.rows, a.ctx, entries, _checked=True)


def kron(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """Kronecker product; left operand occupies the high index digits."""
    _require_ctx(a, b)
    rows = a.rows * b.rows
    cols = a.cols * b.cols
    if rows > DIMENSION_CAP or cols > DIMENSION_CAP:
        raise DimensionCapExceeded(f"{rows}x{cols} exceeds cap {DIMENSION_CAP}")
    ctx = a.ctx
    mul = ctx.mul_raw
    entries = []
    for ia, ja, va in a.entries:
        ibase = ia * b.rows
        jbase = ja * b.cols
        for ib, jb, vb in b.entries:
            entries.append((ibase + ib, jbase + jb, mul(va, vb)))
    entries.sort()
    return SparseMatrix(rows, cols, ctx, entries, _checked=True)


def kron_power(m: SparseMatrix, n: int) -> SparseMatrix:
    if n < 1:
        raise ValueError("n must be positive")
    acc = m
    for _ in range(n - 1):
        acc = kron(acc, m)
    return acc


def kron_all(mats) -> SparseMatrix:
    acc = mats[0]
    for m in mats[1:]:
        acc = kron(acc, m)
    return acc


def _matmul_py(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    ctx = a.ctx
    add = ctx.add_raw
    mul = ctx.mul_raw
    b_rows = b.row_map()
    entries = []
    for i, arow in a.row_map().items():
        acc = {}
        for k, va in arow:
            for j, vb in b_rows.get(k, ()):
                if j in acc:
                    acc[j] = add(acc[j], mul(va, vb))
                else:
                    acc[j] = mul(va, vb)
        for j, v in acc.items():
            if v:
                entries.append((i, j, v))
    entries.sort()
    return SparseMatrix(a.rows, b.cols, ctx, entries, _checked=True)


def _matmul_scipy(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    p = a.ctx.modulus
    c = (a.to_csr() @ b.to_csr()).tocoo()
    vals = np.mod(c.data, p)
    mask = vals != 0
    entries = sorted(
        zip(c.row[mask].tolist(), c.col[mask].tolist(), vals[mask].tolist())
    )
    return SparseMatrix(a.rows, b.cols, a.ctx, entries, _checked=True)


def matmul(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    _require_ctx(a, b)
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.rows}x{a.cols} times {b.rows}x{b.cols}")
    if a.ctx.is_prime_field:
        p = a.ctx.modulus
        # int64 accumulation is exact as long as inner products cannot
        # overflow: nnz_c(a-row hits) <= b.rows terms of magnitude < p**2.
        if (
            a.nnz * max(1, b.nnz) > _SCIPY_MATMUL_THRESHOLD
            and (p - 1) * (p - 1) * b.rows < 2**62
        ):
            return _matmul_scipy(a, b)
    return _matmul_py(a, b)


def add_mat(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    _require_ctx(a, b)
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise DimensionMismatch("shape mismatch in addition")
    return SparseMatrix.from_triplets(
        a.rows, a.cols, a.ctx, list(a.entries) + list(b.entries)
    )


def sub_mat(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    neg = a.ctx.neg_raw
    negb = [(i, j, neg(v)) for i, j, v in b.entries]
    _require_ctx(a, b)
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise DimensionMismatch("shape mismatch in subtraction")
    return SparseMatrix.from_triplets(a.rows, a.cols, a.ctx, list(a.entries) + negb)


def scale(a: SparseMatrix, s) -> SparseMatrix:
    sv = a.ctx.coerce(s)
    if not sv:
        return SparseMatrix(a.rows, a.cols, a.ctx, [], _checked=True)
    mul = a.ctx.mul_raw
    entries = [(i, j, mul(v, sv)) for i, j, v in a.entries]
    return SparseMatrix(a.rows, a.cols, a.ctx, entries, _checked=True)


def concat_h(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """(A | B): horizontal concatenation."""
    _require_ctx(a, b)
    if a.rows != b.rows:
        raise DimensionMismatch("row counts differ in concat_h")
    entries = list(a.entries) + [(i, j + a.cols, v) for i, j, v in b.entries]
    entries.sort()
    return SparseMatrix(a.rows, a.cols + b.cols, a.ctx, entries, _checked=True)


def stack_v(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """(A / B): vertical stacking."""
    _require_ctx(a, b)
    if a.cols != b.cols:
        raise DimensionMismatch("column counts differ in stack_v")
    entries = list(a.entries) + [(i + a.rows, j, v) for i, j, v in b.entries]
    return SparseMatrix(a.rows + b.rows, a.cols, a.ctx, entries, _checked=True)


def apply(a: SparseMatrix, x) -> list:
    """A times x for a raw-value vector x of length a.cols."""
    if len(x) != a.cols:
        raise DimensionMismatch(f"vector length {len(x)} != {a.cols}")
    ctx = a.ctx
    add = ctx.add_raw
    mul = ctx.mul_raw
    out = [ctx.zero_raw()] * a.rows
    for i, j, v in a.entries:
        out[i] = add(out[i], mul(v, x[j]))
    return out


def rank(a: SparseMatrix) -> int:
    """Exact rank by Gaussian elimination (modular or over the rationals)."""
    dense = a.to_dense()
    if a.ctx.is_prime_field:
        return _rank_modp(dense, a.ctx.modulus)
    return _rank_fraction(dense)


def _rank_modp(dense, p: int) -> int:
    m = len(dense)
    n = len(dense[0]) if m else 0
    r = 0
    for c in range(n):
        pivot = None
        for i in range(r, m):
            if dense[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        dense[r], dense[pivot] = dense[pivot], dense[r]
        inv = pow(dense[r][c], -1, p)
        prow = dense[r]
        for i in range(r + 1, m):
            f = dense[i][c]
            if f:
                f = f * inv % p
                row = dense[i]
                for j in range(c, n):
                    row[j] = (row[j] - f * prow[j]) % p
        r += 1
        if r == m:
            break
    return r


def _rank_fraction(dense) -> int:
    m = len(dense)
    n = len(dense[0]) if m else 0
    dense = [[Fraction(v) for v in row] for row in dense]
    r = 0
    for c in range(n):
        pivot = None
        for i in range(r, m):
            if dense[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        dense[r], dense[pivot] = dense[pivot], dense[r]
        prow = dense[r]
        inv = 1 / prow[c]
        for i in range(r + 1, m):
            f = dense[i][c]
            if f:
                f = f * inv
                row = dense[i]
                for j in range(c, n):
                    row[j] -= f * prow[j]
        r += 1
        if r == m:
            break
    return r


# -- text format --------------------------------------------------------
#
# Line 1: "rows cols field" where field is p for F_p or 0 for rationals.
# Then one "i j value" line per nonzero, values as residues or "num/den".


def _format_value(v) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def _parse_value(s: str, ctx: FieldCtx):
    if "/" in s:
        num, den = s.split("/")
        return ctx.coerce(Fraction(int(num), int(den)))
    return ctx.coerce(int(s))


def dump_matrix(m: SparseMatrix) -> str:
    lines = [f"{m.rows} {m.cols} {m.ctx.modulus}"]
    for i, j, v in m.entries:
        lines.append(f"{i} {j} {_format_value(v)}")
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> SparseMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    rows, cols, field = lines[0].split()
    ctx = FieldCtx(int(field))
    entries = []
    for ln in lines[1:]:
        i, j, v = ln.split()
        entries.append((int(i), int(j), _parse_value(v, ctx)))
    return SparseMatrix(int(rows), int(cols), ctx, entries)


def save_matrix(m: SparseMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_matrix(m))


def load_matrix(path) -> SparseMatrix:
    with open(path) as fh:
        return parse_matrix(fh.read())
