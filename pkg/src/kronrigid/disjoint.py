"""The disjointness transform R_n and its two sparsity routes.

R_n is the 2^n x 2^n 0/1 matrix with a 1 exactly where the two index
strings have disjoint supports (nnz = 3^n).  This module provides its
generation, the dense row/column removal argument (low rank + sparse
residual), the recursive all-ones partition into squares and 2:1
rectangles with its induced two-factorization, depth-d circuits, and the
entropy/binomial calculators the parameter analysis relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath
import numpy as np
import scipy.sparse as _sp

from . import circuits, sparse
from .errors import CapExceeded
from .fields import FieldCtx
from .rigidity import RigidityDecomposition
from .sparse import SparseMatrix

MATERIALIZE_CAP = 26  # 2^n dimension guard
LIST_CAP = 14  # coordinate-list materialization guard


def disjointness_matrix(n: int, ctx: FieldCtx) -> SparseMatrix:
    """R_n as a coordinate-list matrix; entries 1 where x AND y = 0."""
    if n > MATERIALIZE_CAP:
        raise CapExceeded(f"n = {n} exceeds the cap {MATERIALIZE_CAP}")
    if n > LIST_CAP:
        raise CapExceeded(
            f"n = {n} too large for coordinate lists; use disjointness_csr"
        )
    one = ctx.one_raw()
    size = 1 << n
    entries = []
    for x in range(size):
        free = (size - 1) ^ x
        # enumerate submasks of the complement, descending then 0
        y = free
        row = []
        while True:
            row.append(y)
            if y == 0:
                break
            y = (y - 1) & free
        for y in sorted(row):
            entries.append((x, y, one))
    return SparseMatrix(size, size, ctx, entries, _checked=True)


def disjointness_csr(n: int) -> _sp.csr_matrix:
    """R_n as a scipy CSR over the integers (for large-n verification)."""
    if n > MATERIALIZE_CAP:
        raise CapExceeded(f"n = {n} exceeds the cap {MATERIALIZE_CAP}")
    size = 1 << n
    indptr = np.zeros(size + 1, dtype=np.int64)
    cols = []
    for x in range(size):
        free = (size - 1) ^ x
        row = []
        y = free
        while True:
            row.append(y)
            if y == 0:
                break
            y = (y - 1) & free
        row.sort()
        cols.append(np.array(row, dtype=np.int32))
        indptr[x + 1] = indptr[x] + len(row)
    indices = np.concatenate(cols)
    data = np.ones(len(indices), dtype=np.int64)
    return _sp.csr_matrix((data, indices, indptr), shape=(size, size))


def _popcounts(arr: np.ndarray) -> np.ndarray:
    v = arr.astype(np.int64).copy()
    total = np.zeros_like(v)
    while v.any():
        total += v & 1
        v >>= 1
    return total


# -- dense row/column removal -------------------------------------------


def binom_cum(n: int, k: int, inclusive: bool) -> int:
    """Sum of C(n, i) for i <= k (inclusive) or i < k (exclusive)."""
    top = k if inclusive else k - 1
    return sum(comb(n, i) for i in range(0, top + 1))


@dataclass(frozen=True)
class RemovalReport:
    n: int
    k: int
    removed_rows: frozenset
    removed_cols: frozenset
    residual_row_nnz: int
    residual_col_nnz: int
    removed_count: int
    bound: int
    method: str

    def as_csv_row(self) -> str:
        return (
            f"{self.n},{self.k},{self.removed_count},"
            f"{self.residual_row_nnz},{self.residual_col_nnz},{self.bound}"
        )


def dense_removal(n: int, k: int, method: str = "auto") -> RemovalReport:
    """Remove the dense rows/columns of R_n (popcount < k) and report the
    residual sparsity.

    The scan path enumerates actual surviving entries; the count path
    evaluates the closed-form maximum sum of C(n-w, j) over j in
    [k, n-w] at the sparsest surviving weight w = k.  Both are exact and
    must agree where both run.
    """
    if not 1 <= k <= n / 2:
        raise ValueError("need 1 <= k <= n/2")
    if method == "auto":
        method = "scan" if n <= 20 else "count"
    removed = frozenset(
        x for x in range(1 << n) if bin(x).count("1") < k
    ) if n <= MATERIALIZE_CAP else frozenset()
    removed_count = binom_cum(n, k, inclusive=False)
    bound = binom_cum(n - k, n - 2 * k, inclusive=True)
    if method == "count":
        best = max(
            sum(comb(n - w, j) for j in range(k, n - w + 1))
            for w in range(k, n - k + 1)
        )
        row_nnz = col_nnz = best
    elif method == "scan":
        size = 1 << n
        best = 0
        for x in range(size):
            if bin(x).count("1") < k:
                continue
            free = (size - 1) ^ x
            cnt = 0
            y = free
            while True:
                if bin(y).count("1") >= k:
                    cnt += 1
                if y == 0:
                    break
                y = (y - 1) & free
            if cnt > best:
                best = cnt
        # R_n is symmetric, so columns mirror rows.
        row_nnz = col_nnz = best
    else:
        raise ValueError(f"unknown method {method!r}")
    return RemovalReport(
        n, k, removed, removed, row_nnz, col_nnz, removed_count, bound, method
    )


def removal_split_csr(n: int, k: int):
    """Split R_n = L + S: L carries the removed rows plus the removed
    columns restricted to surviving rows (each a rank-1 update, so
    rank(L) <= 2 * C(n, <k)); S is the surviving-by-surviving residual.

    Returns (R, L, S, structural_rank_bound) as scipy CSR matrices.
    """
    r = disjointness_csr(n).tocoo()
    rowpop = _popcounts(r.row)
    colpop = _popcounts(r.col)
    in_l = (rowpop < k) | ((rowpop >= k) & (colpop < k))
    size = 1 << n
    lmat = _sp.csr_matrix(
        (r.data[in_l], (r.row[in_l], r.col[in_l])), shape=(size, size)
    )
    smat = _sp.csr_matrix(
        (r.data[~in_l], (r.row[~in_l], r.col[~in_l])), shape=(size, size)
    )
    removed = binom_cum(n, k, inclusive=False)
    return r.tocsr(), lmat, smat, 2 * removed


def rn_rigidity_decomposition(
    n: int, a: Fraction, ctx: FieldCtx
) -> RigidityDecomposition:
    """Witness that R_n is non-rigid: rank 2*C(n,<k) plus a sparse
    residual, k = floor(a*n).  Each removed row contributes the rank-1
    update e_x (row x of R_n), each removed column the update
    (col y restricted to surviving rows) e_y^T.
    """
    k = int(a * n)
    target = disjointness_matrix(n, ctx)
    one = ctx.one_raw()
    size = 1 << n
    removed = [x for x in range(size) if bin(x).count("1") < k]
    removed_set = set(removed)
    rank_bound = 2 * len(removed)
    b_entries = []
    c_entries = []
    s_entries = []
    col_of = {x: i for i, x in enumerate(removed)}
    ncols = len(removed)
    for i, j, v in target.entries:
        if i in removed_set:
            # covered by the row update for i
            c_entries.append((col_of[i], j, v))
        elif j in removed_set:
            c_entries_idx = ncols + col_of[j]
            b_entries.append((i, c_entries_idx, v))
        else:
            s_entries.append((i, j, v))
    for x in removed:
        b_entries.append((x, col_of[x], one))
    for y in removed:
        c_entries.append((ncols + col_of[y], y, one))
    b = SparseMatrix(size, rank_bound, ctx, sorted(b_entries), _checked=True)
    c = SparseMatrix(rank_bound, size, ctx, sorted(c_entries), _checked=True)
    s = SparseMatrix(size, size, ctx, s_entries, _checked=True)
    return RigidityDecomposition(target, rank_bound, b, c, s)


# -- recursive all-ones partition ---------------------------------------

SQUARE = "square"
RECT = "rect"  # tall 2:1 rectangle


@dataclass(frozen=True)
class RectPartition:
    n: int
    pieces: tuple  # of (rows: tuple, cols: tuple, kind)

    @property
    def s_sum(self) -> int:
        return sum(len(p[1]) for p in self.pieces if p[2] == SQUARE)

    @property
    def r_sum(self) -> int:
        return sum(len(p[1]) for p in self.pieces if p[2] == RECT)

    @property
    def area(self) -> int:
        return sum(len(p[0]) * len(p[1]) for p in self.pieces)


def js_partition(n: int) -> RectPartition:
    """Partition the ones of R_n into all-ones squares and tall 2:1
    rectangles by the block recursion R_n = [[R', R'], [R', 0]].

    Each square piece of R_{n-1} leaves its (0,1)-block copy as a square
    and fuses its (0,0) and (1,0) copies into a tall rectangle; each
    rectangle leaves its (1,0) copy as a rectangle and fuses its (0,0)
    and (0,1) copies into a double-size square.  Side-length sums follow
    (s_n, r_n) = [[1,2],[1,1]] (s_{n-1}, r_{n-1}) with s_1 = r_1 = 1.
    """
    if n > LIST_CAP:
        raise CapExceeded(f"n = {n} exceeds the partition cap {LIST_CAP}")
    if n < 1:
        raise ValueError("n must be positive")
    pieces = [((0,), (1,), SQUARE), ((0, 1), (0,), RECT)]
    for level in range(2, n + 1):
        off = 1 << (level - 1)
        nxt = []
        for rows, cols, kind in pieces:
            rows_hi = tuple(x + off for x in rows)
            cols_hi = tuple(y + off for y in cols)
            if kind == SQUARE:
                nxt.append((rows, cols_hi, SQUARE))
                nxt.append((rows + rows_hi, cols, RECT))
            else:
                nxt.append((rows, cols + cols_hi, SQUARE))
                nxt.append((rows_hi, cols, RECT))
        pieces = nxt
    return RectPartition(n, tuple(pieces))


def validate_partition(part: RectPartition) -> bool:
    """Exhaustive check: pieces disjoint, all-ones, covering exactly."""
    seen = set()
    for rows, cols, kind in part.pieces:
        if kind == SQUARE and len(rows) != len(cols):
            return False
        if kind == RECT and len(rows) != 2 * len(cols):
            return False
        for x in rows:
            for y in cols:
                if x & y:
                    return False  # outside the support
                cell = (x, y)
                if cell in seen:
                    return False
                seen.add(cell)
    return len(seen) == 3**part.n


def js_factorization(n: int, ctx: FieldCtx) -> circuits.TwoFactorization:
    """R_n = A_n x B_n through one inner coordinate per partition piece:
    column p of A_n indicates the piece's rows, row p of B_n its columns.
    R_n is symmetric, so the transposed pair gives the primed ordering.
    """
    part = js_partition(n)
    target = disjointness_matrix(n, ctx)
    one = ctx.one_raw()
    size = 1 << n
    t = len(part.pieces)
    a_entries = []
    b_entries = []
    for p, (rows, cols, _) in enumerate(part.pieces):
        for x in rows:
            a_entries.append((x, p, one))
        for y in cols:
            b_entries.append((p, y, one))
    a = SparseMatrix(size, t, ctx, sorted(a_entries), _checked=True)
    b = SparseMatrix(t, size, ctx, sorted(b_entries), _checked=True)
    return circuits.TwoFactorization(
        target, a, b, sparse.transpose(a), sparse.transpose(b)
    )


def js_side_sums(n: int):
    """(s_n, r_n) from the linear recursion, without building anything."""
    s, r = 1, 1
    for _ in range(n - 1):
        s, r = s + 2 * r, s + r
    return s, r


def rn_depth_d(n: int, d: int, ctx: FieldCtx, base_m: int = None):
    """Depth-d circuit for R_n built from the partition factorization of
    a base power R_m, symmetrized and lifted; leftover copies of R_1 ride
    along in butterfly slots."""
    if base_m is None:
        base_m = max(1, n // d)
    tf = js_factorization(base_m, ctx)
    circ = circuits.symmetrized_depth_d(tf, d)
    reps = n // (base_m * d)
    if reps > 1:
        circ = circuits.lift_power(circ, d * reps)
    factors = list(circ.factors)
    k = n - base_m * d * max(reps, 1)
    if k:
        r1 = disjointness_matrix(1, ctx)
        i2 = sparse.identity(2, ctx)
        for j in range(d):
            aug = sparse.kron_all([r1 if j == ell else i2 for ell in range(k)])
            factors[j] = sparse.kron(factors[j], aug)
    return circuits.SynchronousCircuit(
        factors, base=disjointness_matrix(1, ctx), base_power=n
    )


# -- entropy calculators ------------------------------------------------


def entropy(p) -> mpmath.mpf:
    """Binary entropy at >= 50 bits of working precision."""
    with mpmath.workprec(64):
        x = mpmath.mpf(Fraction(p).numerator) / Fraction(p).denominator
        if x == 0 or x == 1:
            return mpmath.mpf(0)
        return -x * mpmath.log(x, 2) - (1 - x) * mpmath.log(1 - x, 2)


def entropy_identities_check(q: int, n: int, k: int) -> dict:
    """Numeric checks of H(1/q) = log2 q - ((q-1)/q) log2(q-1) and the
    binomial sandwich 2^{nH(p)}/(n+1) <= C(n, pn) <= 2^{nH(p)}."""
    with mpmath.workprec(64):
        lhs = entropy(Fraction(1, q))
        rhs = mpmath.log(q, 2) - mpmath.mpf(q - 1) / q * mpmath.log(q - 1, 2)
        identity_ok = abs(lhs - rhs) < mpmath.mpf(2) ** -50
        h = entropy(Fraction(k, n))
        mid = mpmath.mpf(comb(n, k))
        upper = mpmath.mpf(2) ** (n * h)
        sandwich_ok = (upper / (n + 1) <= mid + mpmath.mpf(2) ** -40) and (
            mid <= upper * (1 + mpmath.mpf(2) ** -40)
        )
    return {"identity_ok": bool(identity_ok), "sandwich_ok": bool(sandwich_ok)}


def critical_fraction(bits: int = 40):
    """Bisection root of (1-a) H((1-2a)/(1-a)) = 1/2 on (0, 1/2).

    Returns (a_star, H(a_star)): the removal fraction where the residual
    sparsity exponent crosses n/2, and the resulting rank exponent.
    """
    with mpmath.workprec(bits + 24):
        def g(a):
            return (1 - a) * entropy_mpf((1 - 2 * a) / (1 - a)) - mpmath.mpf(1) / 2

        # g is positive at a = 1/4 and negative near a = 1/2; we want the
        # upper crossing (the lower one sits near a = 0).
        lo, hi = mpmath.mpf("0.25"), mpmath.mpf("0.49")
        for _ in range(bits + 10):
            mid = (lo + hi) / 2
            if g(mid) > 0:
                lo = mid
            else:
                hi = mid
        a_star = (lo + hi) / 2
        return a_star, entropy_mpf(a_star)


def entropy_mpf(x) -> mpmath.mpf:
    x = mpmath.mpf(x)
    if x <= 0 or x >= 1:
        return mpmath.mpf(0)
    return -x * mpmath.log(x, 2) - (1 - x) * mpmath.log(1 - x, 2)
