"""Low-rank-plus-sparse decompositions and the brute-force certifier.

A decomposition witnesses target = B_lr x C_lr + S with rank at most r and
nnz(S) = changes.  Alongside the explicit constructions for the 4x4 and
16x16 Hadamard matrices and the cube of an outer-1 2x2 base, this module
has the exhaustive minimum-changes search, outer-1 normalization, the
product composition rule, and the Fourier (DFT) lower-bound formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from . import sparse
from .errors import (
    DimensionMismatch,
    ExceedsBound,
    NotSquare,
    OmegaZero,
    OuterZero,
    RationalUnsupported,
    WorkCapExceeded,
)
from .fields import FieldCtx, primitive_root_of_unity
from .sparse import SparseMatrix

DEFAULT_WORK_CAP = 10_000_000


@dataclass(frozen=True)
class RigidityDecomposition:
    target: SparseMatrix
    rank_bound: int
    B_lr: SparseMatrix
    C_lr: SparseMatrix
    S: SparseMatrix

    @property
    def changes(self) -> int:
        return self.S.nnz

    @property
    def low_rank(self) -> SparseMatrix:
        return sparse.matmul(self.B_lr, self.C_lr)

    def verify(self) -> bool:
        """target = B_lr x C_lr + S, rank of the low part <= rank_bound."""
        low = self.low_rank
        if sparse.add_mat(low, self.S) != self.target:
            return False
        return sparse.rank(low) <= self.rank_bound

    def report(self) -> dict:
        return {
            "q": self.target.rows,
            "rank_bound": self.rank_bound,
            "changes": self.changes,
            "nnz_r_S": self.S.nnz_r,
            "nnz_c_S": self.S.nnz_c,
        }


def low_rank_factor(m: SparseMatrix, r: int):
    """Rank factorization m = B x C with B m.rows x r, C r x m.cols.

    Requires rank(m) <= r; unused columns/rows stay structurally zero.
    B takes the pivot columns of m, C the nonzero rows of the RREF.
    """
    ctx = m.ctx
    dense = m.to_dense()
    rows, cols = m.rows, m.cols
    rref = [list(row) for row in dense]
    pivots = []
    rr = 0
    for c in range(cols):
        piv = None
        for i in range(rr, rows):
            if rref[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rref[rr], rref[piv] = rref[piv], rref[rr]
        inv = ctx.inv_raw(rref[rr][c])
        rref[rr] = [ctx.mul_raw(v, inv) for v in rref[rr]]
        prow = rref[rr]
        for i in range(rows):
            if i != rr and rref[i][c]:
                f = rref[i][c]
                rref[i] = [
                    ctx.sub_raw(v, ctx.mul_raw(f, pv))
                    for v, pv in zip(rref[i], prow)
                ]
        pivots.append(c)
        rr += 1
    if rr > r:
        raise ValueError(f"rank {rr} exceeds requested bound {r}")
    b_entries = []
    for k, c in enumerate(pivots):
        for i in range(rows):
            if dense[i][c]:
                b_entries.append((i, k, dense[i][c]))
    c_entries = []
    for k in range(rr):
        for j in range(cols):
            if rref[k][j]:
                c_entries.append((k, j, rref[k][j]))
    b = SparseMatrix(rows, r, ctx, sorted(b_entries), _checked=True)
    cmat = SparseMatrix(r, cols, ctx, sorted(c_entries), _checked=True)
    return b, cmat


def decomposition_from_low_rank(
    target: SparseMatrix, low: SparseMatrix, r: int
) -> RigidityDecomposition:
    b, c = low_rank_factor(low, r)
    s = sparse.sub_mat(target, low)
    return RigidityDecomposition(target, r, b, c, s)


# -- brute-force search -------------------------------------------------


def _binom(n, k):
    from math import comb

    return comb(n, k)


def _rank_le(dense, ctx, r) -> bool:
    """True iff rank <= r; elimination aborts as soon as r is exceeded."""
    rows = [list(row) for row in dense]
    m = len(rows)
    n = len(rows[0]) if m else 0
    rr = 0
    for c in range(n):
        piv = None
        for i in range(rr, m):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rr += 1
        if rr > r:
            return False
        rows[rr - 1], rows[piv] = rows[piv], rows[rr - 1]
        prow = rows[rr - 1]
        inv = ctx.inv_raw(prow[c])
        for i in range(rr, m):
            f = rows[i][c]
            if f:
                f = ctx.mul_raw(f, inv)
                row = rows[i]
                for j in range(c, n):
                    row[j] = ctx.sub_raw(row[j], ctx.mul_raw(f, prow[j]))
    return True


def brute_force_rigidity(
    m: SparseMatrix, r: int, max_changes: int, work_cap: int = DEFAULT_WORK_CAP
):
    """Exact minimum number of entry changes bringing rank(m) down to <= r.

    Enumerates change-support patterns in increasing size (lexicographic
    within a size) and all field values on the changed cells; the first
    hit wins, so output is deterministic.  Returns (minimum, witness);
    raises ExceedsBound if no pattern of size <= max_changes works.
    """
    ctx = m.ctx
    if not ctx.is_prime_field:
        raise RationalUnsupported("brute-force search needs a small prime field")
    p = ctx.modulus
    cells = m.rows * m.cols
    est = sum(_binom(cells, k) * (p - 1) ** k for k in range(max_changes + 1))
    if est > work_cap:
        raise WorkCapExceeded(est, work_cap)
    dense = m.to_dense()
    flat = [(i, j) for i in range(m.rows) for j in range(m.cols)]
    for size in range(max_changes + 1):
        for pattern in combinations(range(cells), size):
            coords = [flat[c] for c in pattern]
            originals = [dense[i][j] for i, j in coords]
            # Only values different from the original count as changes;
            # equal values were already covered at a smaller size.
            choices = [
                [v for v in range(p) if v != orig] for orig in originals
            ]
            for assignment in product(*choices):
                for (i, j), v in zip(coords, assignment):
                    dense[i][j] = v
                ok = _rank_le(dense, ctx, r)
                if ok:
                    low = SparseMatrix.from_dense(dense, ctx)
                    for (i, j), v in zip(coords, originals):
                        dense[i][j] = v
                    return size, decomposition_from_low_rank(m, low, r)
            for (i, j), v in zip(coords, originals):
                dense[i][j] = v
    raise ExceedsBound(max_changes)


# -- explicit constructions ---------------------------------------------


def hadamard_matrix(n: int, ctx: FieldCtx) -> SparseMatrix:
    """H_n = H_1^{kron n}, the 2^n-point Walsh-Hadamard transform."""
    h1 = SparseMatrix.from_dense([[1, 1], [1, -1]], ctx)
    return sparse.kron_power(h1, n)


def _rank1(col, row, ctx) -> tuple:
    q = len(col)
    b = SparseMatrix.from_dense([[v] for v in col], ctx)
    c = SparseMatrix.from_dense([row], ctx)
    assert b.rows == q
    return b, c


def h2_rank1_decomposition(ctx: FieldCtx) -> RigidityDecomposition:
    """H_2 = rank-1 + 4 changes: first row of the rank-1 part is
    (-1, 1, 1, 1) and the other rows are its negation; the sparse part is
    twice a permutation, one entry per row and column."""
    target = hadamard_matrix(2, ctx)
    b, c = _rank1([1, -1, -1, -1], [-1, 1, 1, 1], ctx)
    low = sparse.matmul(b, c)
    s = sparse.sub_mat(target, low)
    return RigidityDecomposition(target, 1, b, c, s)


def cube_rank1_decomposition(m: SparseMatrix) -> RigidityDecomposition:
    """Rank-1 approximation of the cube M^{kron 3} of an outer-1 2x2 base.

    With omega = M[1,1], the low part is L[x,y] = omega^{-1} when
    x = y = 0, 1 on the rest of row/column 0, and omega elsewhere; it is
    the outer product of u = (omega^{-1}, 1, ..., 1) and
    v = (1, omega, ..., omega).  L agrees with M^{kron 3} wherever the
    inner product of the index strings is 1, leaving at most 23
    mismatches (22 when omega = -1).
    """
    ctx = m.ctx
    if (m.rows, m.cols) != (2, 2):
        raise DimensionMismatch("base must be 2x2")
    one = ctx.one_raw()
    if m.get(0, 0) != one or m.get(0, 1) != one or m.get(1, 0) != one:
        raise ValueError("base must be outer-1 (normalize first)")
    omega = m.get(1, 1)
    if not omega:
        raise OmegaZero("corner entry is zero; its inverse defines the low part")
    target = sparse.kron_power(m, 3)
    winv = ctx.inv_raw(omega)
    u = [winv] + [one] * 7
    v = [one] + [omega] * 7
    b, c = _rank1(u, v, ctx)
    low = sparse.matmul(b, c)
    s = sparse.sub_mat(target, low)
    return RigidityDecomposition(target, 1, b, c, s)


def h4_rank1_decomposition(ctx: FieldCtx) -> RigidityDecomposition:
    """H_4 = rank-1 + 96 changes: the low part is the square Kronecker
    power of the 4x4 rank-1 matrix used for H_2."""
    target = hadamard_matrix(4, ctx)
    b2, c2 = _rank1([1, -1, -1, -1], [-1, 1, 1, 1], ctx)
    b = sparse.kron(b2, b2)
    c = sparse.kron(c2, c2)
    low = sparse.matmul(b, c)
    s = sparse.sub_mat(target, low)
    return RigidityDecomposition(target, 1, b, c, s)


def normalize_outer1(m: SparseMatrix):
    """Split M = D x M' x D' with D, D' invertible diagonal and M' outer-1.

    Requires every entry of row 0 and column 0 nonzero.
    """
    ctx = m.ctx
    for i in range(m.rows):
        if not m.get(i, 0):
            raise OuterZero(i, 0)
    for j in range(m.cols):
        if not m.get(0, j):
            raise OuterZero(0, j)
    m00 = m.get(0, 0)
    # G scales row i by 1/M[i,0], G' scales col j by M[0,0]/M[0,j];
    # D, D' are their inverses.
    g = sparse.diagonal([ctx.inv_raw(m.get(i, 0)) for i in range(m.rows)], ctx)
    gp = sparse.diagonal(
        [ctx.mul_raw(m00, ctx.inv_raw(m.get(0, j))) for j in range(m.cols)], ctx
    )
    mprime = sparse.matmul(sparse.matmul(g, m), gp)
    d = sparse.diagonal([m.get(i, 0) for i in range(m.rows)], ctx)
    dp = sparse.diagonal(
        [ctx.mul_raw(m.get(0, j), ctx.inv_raw(m00)) for j in range(m.cols)], ctx
    )
    return d, mprime, dp


def compose_nonrigid(
    da: RigidityDecomposition, diag: SparseMatrix, db: RigidityDecomposition
) -> RigidityDecomposition:
    """Decomposition of A x D x B from decompositions of A and B.

    Grouping L_A D (L_B + S_B) + S_A D L_B + S_A D S_B puts everything
    except the last term into the low part, so the rank bound is the sum
    of the two input bounds and the sparse part is S_A x D x S_B; its
    per-row and per-column sparsity multiply.
    """
    a = da.target
    b = db.target
    if a.cols != diag.rows or diag.cols != b.rows:
        raise DimensionMismatch("dimensions do not chain")
    target = sparse.matmul(sparse.matmul(a, diag), b)
    # L_A D B = B_A x (C_A D B); S_A D L_B = (S_A D B_B) x C_B.
    left1 = da.B_lr
    right1 = sparse.matmul(sparse.matmul(da.C_lr, diag), b)
    left2 = sparse.matmul(sparse.matmul(da.S, diag), db.B_lr)
    right2 = db.C_lr
    b_lr = sparse.concat_h(left1, left2)
    c_lr = sparse.stack_v(right1, right2)
    s = sparse.matmul(sparse.matmul(da.S, diag), db.S)
    return RigidityDecomposition(target, da.rank_bound + db.rank_bound, b_lr, c_lr, s)


def shparlinski_bound(n: int, r: int) -> Fraction:
    """(N - r)^2 / (r + 1): changes needed to bring an N-point DFT to rank r."""
    if not n > r >= 0:
        raise ValueError("need N > r >= 0")
    return Fraction((n - r) ** 2, r + 1)


def dft_matrix(n: int, ctx: FieldCtx) -> SparseMatrix:
    """F_N[i,j] = w^(i*j) for a primitive Nth root of unity w in F_p."""
    w = primitive_root_of_unity(ctx, n).value
    p = ctx.modulus
    rows = [[pow(w, i * j, p) for j in range(n)] for i in range(n)]
    return SparseMatrix.from_dense(rows, ctx)


# -- witness file format ------------------------------------------------
#
# Header `rigidity q r changes field`, then the three blocks B_lr, C_lr, S
# in the matrix text format, separated by `---` lines.


def dump_witness(d: RigidityDecomposition) -> str:
    header = (
        f"rigidity {d.target.rows} {d.rank_bound} {d.changes} "
        f"{d.target.ctx.modulus}"
    )
    blocks = [sparse.dump_matrix(x).rstrip("\n") for x in (d.B_lr, d.C_lr, d.S)]
    return header + "\n" + "\n---\n".join(blocks) + "\n"


def parse_witness(text: str) -> RigidityDecomposition:
    head, rest = text.split("\n", 1)
    tag, q, r, changes, field = head.split()
    if tag != "rigidity":
        raise ValueError("not a rigidity witness file")
    parts = rest.split("---")
    if len(parts) != 3:
        raise ValueError("expected three blocks separated by ---")
    b, c, s = (sparse.parse_matrix(p) for p in parts)
    if s.nnz != int(changes):
        raise ValueError("header change count does not match sparse block")
    target = sparse.add_mat(sparse.matmul(b, c), s)
    if target.rows != int(q):
        raise ValueError("header dimension does not match blocks")
    return RigidityDecomposition(target, int(r), b, c, s)


def save_witness(d: RigidityDecomposition, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_witness(d))


def load_witness(path) -> RigidityDecomposition:
    with open(path) as fh:
        return parse_witness(fh.read())
