"""Union-indexed transforms: V_f[x,y] = f(x OR y) and the fast path.

V_f factors as R_n x D_f x R_n where R_n is the disjointness transform
and D_f holds the coefficients of f in the R_n basis.  Since R_n has a
butterfly circuit with (N/2) log2 N additions, batch sums of the form
sum_t f(s OR t) cost N log2 N additions and N multiplications instead of
quadratic work.  The module also covers the weighted-permutation
conjugation turning any Kronecker product of 2x2 matrices into a V_f,
and the inclusion-exclusion expansion of f for bases q > 2 (where OR
becomes entrywise max).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations

from . import sparse
from .errors import (
    CapExceeded,
    LengthMismatch,
    LengthNotPowerOfTwo,
    ModulusTooSmallWarning,
    OuterZero,
)
from .fields import FieldCtx, Scalar
from .sparse import IndexCodec, SparseMatrix

VF_CAP = 13
GENERAL_CAP = 4096


@dataclass(frozen=True)
class TruthTable:
    """f: [q]_0^n -> F as a value sequence in IndexCodec order."""

    q: int
    n: int
    ctx: FieldCtx
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.q**self.n:
            raise LengthMismatch(
                f"expected {self.q ** self.n} values, got {len(self.values)}"
            )

    @classmethod
    def from_func(cls, q, n, ctx, fn):
        codec = IndexCodec(q, n)
        values = tuple(
            ctx.coerce(fn(codec.decode(i))) for i in range(q**n)
        )
        return cls(q, n, ctx, values)

    def __call__(self, digits):
        return self.values[IndexCodec(self.q, self.n).encode(digits)]


def vf_matrix(f: TruthTable) -> SparseMatrix:
    """V_f[x,y] = f(x OR y) for a q = 2 truth table."""
    if f.q != 2:
        raise ValueError("vf_matrix is the q = 2 case; see vf_matrix_general")
    if f.n > VF_CAP:
        raise CapExceeded(f"n = {f.n} exceeds the cap {VF_CAP}")
    size = 1 << f.n
    entries = []
    for x in range(size):
        for y in range(size):
            v = f.values[x | y]
            if v:
                entries.append((x, y, v))
    return SparseMatrix(size, size, f.ctx, entries, _checked=True)


def vf_matrix_general(f: TruthTable) -> SparseMatrix:
    """Entrywise-max version for bases q >= 2."""
    size = f.q**f.n
    if size > GENERAL_CAP:
        raise CapExceeded(f"q^n = {size} exceeds the cap {GENERAL_CAP}")
    codec = IndexCodec(f.q, f.n)
    entries = []
    for x in range(size):
        dx = codec.decode(x)
        for y in range(size):
            dy = codec.decode(y)
            v = f.values[codec.encode(tuple(map(max, dx, dy)))]
            if v:
                entries.append((x, y, v))
    return SparseMatrix(size, size, f.ctx, entries, _checked=True)


def fast_rn_apply(ctx: FieldCtx, x, inverse: bool = False):
    """Butterfly application of R_n (or its inverse) to a raw vector.

    Forward level: (u0, u1) -> (u0 + u1, u0); inverse: (u0, u1) ->
    (u1, u0 - u1), one bit position per level.  Exactly N/2 operations
    per level.  Returns (result, {"adds": a, "subs": s}).
    """
    size = len(x)
    n = size.bit_length() - 1
    if size != 1 << n or size < 1:
        raise LengthNotPowerOfTwo(f"length {size} is not a power of two")
    out = list(x)
    adds = subs = 0
    for bit in range(n):
        m = 1 << bit
        for i0 in range(size):
            if i0 & m:
                continue
            i1 = i0 | m
            u0, u1 = out[i0], out[i1]
            if inverse:
                out[i0] = u1
                out[i1] = ctx.sub_raw(u0, u1)
                subs += 1
            else:
                out[i0] = ctx.add_raw(u0, u1)
                out[i1] = u0
                adds += 1
    return out, {"adds": adds, "subs": subs}


@dataclass(frozen=True)
class VfWitness:
    n: int
    D_f: SparseMatrix
    b_f: tuple

    def verify_against(self, f: TruthTable) -> bool:
        """Dense reconstruction: R x D_f x R = V_f."""
        from .disjoint import disjointness_matrix

        r = disjointness_matrix(self.n, f.ctx)
        rebuilt = sparse.matmul(sparse.matmul(r, self.D_f), r)
        return rebuilt == vf_matrix(f)


def build_vf_witness(f: TruthTable) -> VfWitness:
    """b_f = R_n^{-1} a_f via the inverse butterfly; D_f = diag(b_f)."""
    if f.q != 2:
        raise ValueError("the witness machinery is the q = 2 case")
    b_f, _ = fast_rn_apply(f.ctx, list(f.values), inverse=True)
    return VfWitness(f.n, sparse.diagonal(b_f, f.ctx), tuple(b_f))


def batch_sums(f: TruthTable, points, convention: str = "or"):
    """For each point s, the sum over the input multiset of f(s OR t)
    (or f(s AND t) under the AND convention, served by bit-complement).

    Cost: one diagonal scaling between two forward butterflies, i.e.
    N log2 N additions and N multiplications.  Multiplicities are counted
    in the field, so in F_p they wrap at p (warned); use the rationals
    for plain integer counts.  Returns (dict point -> Scalar, op counts).
    """
    if f.q != 2:
        raise ValueError("batch sums operate on q = 2 truth tables")
    if convention not in ("or", "and"):
        raise ValueError("convention must be 'or' or 'and'")
    ctx = f.ctx
    n = f.n
    size = 1 << n
    mask = size - 1
    if ctx.is_prime_field and len(points) >= ctx.modulus:
        warnings.warn(
            f"{len(points)} points with modulus {ctx.modulus}: multiplicities "
            "wrap; consider the rational field",
            ModulusTooSmallWarning,
        )
    if convention == "and":
        # f(s AND t) = f'(~s OR ~t) with f'(z) = f(~z)
        table = TruthTable(
            2, n, ctx, tuple(f.values[(~z) & mask] for z in range(size))
        )
        work_points = [(~p) & mask for p in points]
    else:
        table = f
        work_points = list(points)
    for p in work_points:
        if not 0 <= p < size:
            raise LengthMismatch(f"point {p} does not fit in {n} bits")
    one = ctx.one_raw()
    u = [ctx.zero_raw()] * size
    for p in work_points:
        u[p] = ctx.add_raw(u[p], one)
    b_f, _ = fast_rn_apply(ctx, list(table.values), inverse=True)
    step1, ops1 = fast_rn_apply(ctx, u)
    mults = 0
    mid = []
    for bv, sv in zip(b_f, step1):
        mid.append(ctx.mul_raw(bv, sv))
        mults += 1
    w, ops2 = fast_rn_apply(ctx, mid)
    answers = {}
    for orig, wp in zip(points, work_points):
        answers[orig] = Scalar(ctx, w[wp])
    ops = {"adds": ops1["adds"] + ops2["adds"], "mults": mults}
    return answers, ops


def batch_sums_oracle(f: TruthTable, points, convention: str = "or"):
    """Quadratic reference: direct double loop over the multiset."""
    ctx = f.ctx
    out = {}
    for s in points:
        acc = ctx.zero_raw()
        for t in points:
            z = (s | t) if convention == "or" else (s & t)
            acc = ctx.add_raw(acc, f.values[z])
        out[s] = Scalar(ctx, acc)
    return out


def kron2_to_vf(m_list):
    """Write a Kronecker product of 2x2 matrices as Pi x V_f x Pi'.

    Each base M is conjugated by the bit swap and split off diagonals:
    M = X D V_g D' X with g(0) = M[1,1] M[0,0] / (M[1,0] M[0,1]) and
    g(1) = 1, so Pi and Pi' are weighted permutations and
    f(z) = prod_i g_i(z[i]).  The three outer entries of each M must be
    nonzero; the corner M[1,1] (hence g(0)) may be zero.
    """
    n = len(m_list)
    if n == 0:
        raise ValueError("need at least one base matrix")
    ctx = m_list[0].ctx
    pi_parts = []
    pip_parts = []
    g_values = []
    for m in m_list:
        a = m.get(0, 0)
        b = m.get(0, 1)
        c = m.get(1, 0)
        d = m.get(1, 1)
        if not a:
            raise OuterZero(0, 0)
        if not b:
            raise OuterZero(0, 1)
        if not c:
            raise OuterZero(1, 0)
        # M = X D V_g D' X with D = diag(c/a, 1), D' = diag(b, a)
        d0 = ctx.mul_raw(c, ctx.inv_raw(a))
        g0 = ctx.mul_raw(
            ctx.mul_raw(d, a), ctx.inv_raw(ctx.mul_raw(c, b))
        )
        one = ctx.one_raw()
        # X x D = [[0, 1], [d0, 0]]; D' x X = [[0, b], [a, 0]]
        pi_parts.append(
            SparseMatrix(2, 2, ctx, [(0, 1, one), (1, 0, d0)], _checked=True)
        )
        pip_parts.append(
            SparseMatrix(2, 2, ctx, [(0, 1, b), (1, 0, a)], _checked=True)
        )
        g_values.append((g0, one))
    pi = sparse.kron_all(pi_parts)
    pip = sparse.kron_all(pip_parts)
    codec = IndexCodec(2, n)
    values = []
    for z in range(1 << n):
        digits = codec.decode(z)
        acc = ctx.one_raw()
        for i, dig in enumerate(digits):
            acc = ctx.mul_raw(acc, g_values[i][dig])
        values.append(acc)
    f = TruthTable(2, n, ctx, tuple(values))
    return pi, f, pip


# -- inclusion-exclusion expansion for general bases ---------------------


def inclusion_exclusion_expand(f: TruthTable):
    """The signed expansion f_S(w) = sum over T subset of S of
    (-1)^(|S|-|T|) f(x_T), where x_T places w[i]+1 in slot i for i in T
    and 0 elsewhere.  Each f_S is a truth table over base q-1 on the
    slots of S; telescoping gives f(z) = sum over S subset of supp(z) of
    f_S(z restricted to S, shifted down by 1).
    """
    q, n, ctx = f.q, f.n, f.ctx
    if q**n > GENERAL_CAP:
        raise CapExceeded(f"q^n = {q ** n} exceeds the cap {GENERAL_CAP}")
    codec = IndexCodec(q, n)
    out = {}
    for size in range(n + 1):
        for s in combinations(range(n), size):
            sub = IndexCodec(q - 1, size) if q > 2 else IndexCodec(1, size)
            values = []
            for widx in range((q - 1) ** size):
                w = sub.decode(widx) if size else ()
                acc = ctx.zero_raw()
                for tsize in range(size + 1):
                    for t in combinations(s, tsize):
                        x = [0] * n
                        for pos, slot in enumerate(s):
                            if slot in t:
                                x[slot] = w[pos] + 1
                        val = f.values[codec.encode(x)]
                        if (size - tsize) % 2:
                            acc = ctx.sub_raw(acc, val)
                        else:
                            acc = ctx.add_raw(acc, val)
                values.append(acc)
            out[frozenset(s)] = TruthTable(
                max(q - 1, 1), size, ctx, tuple(values)
            )
    return out


def expansion_identity_check(f: TruthTable, expansion=None) -> bool:
    """f(z) = sum over S subset of supp(z) of f_S at every point z."""
    if expansion is None:
        expansion = inclusion_exclusion_expand(f)
    q, n, ctx = f.q, f.n, f.ctx
    codec = IndexCodec(q, n)
    for z in range(q**n):
        dz = codec.decode(z)
        supp = [i for i in range(n) if dz[i]]
        acc = ctx.zero_raw()
        for size in range(len(supp) + 1):
            for s in combinations(supp, size):
                table = expansion[frozenset(s)]
                w = tuple(dz[i] - 1 for i in s)
                acc = ctx.add_raw(acc, table(w))
        if acc != f.values[z]:
            return False
    return True


def expansion_matrix_identity_check(f: TruthTable, expansion=None) -> bool:
    """Dense check that V_f (entrywise max) is the sum over S of the
    padded V_{f_S} blocks Kronecker-interleaved with all-ones slots."""
    if expansion is None:
        expansion = inclusion_exclusion_expand(f)
    q, n, ctx = f.q, f.n, f.ctx
    size = q**n
    codec = IndexCodec(q, n)
    target = vf_matrix_general(f)
    acc = {}
    for s, table in expansion.items():
        slots = sorted(s)
        for x in range(size):
            dx = codec.decode(x)
            for y in range(size):
                dy = codec.decode(y)
                # the padded block covers pairs whose entrywise max is
                # positive on every slot of S
                if any(max(dx[i], dy[i]) == 0 for i in slots):
                    continue
                w = tuple(max(dx[i], dy[i]) - 1 for i in slots)
                v = table(w)
                if v:
                    key = (x, y)
                    acc[key] = ctx.add_raw(acc.get(key, ctx.zero_raw()), v)
    rebuilt = SparseMatrix.from_triplets(
        size, size, ctx, [(i, j, v) for (i, j), v in acc.items()]
    )
    return rebuilt == target


# -- truth-table file format --------------------------------------------


def dump_truthtable(f: TruthTable) -> str:
    lines = [f"truthtable {f.q} {f.n} {f.ctx.modulus}"]
    for v in f.values:
        lines.append(sparse._format_value(v))
    return "\n".join(lines) + "\n"


def parse_truthtable(text: str) -> TruthTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    tag, q, n, field = lines[0].split()
    if tag != "truthtable":
        raise ValueError("not a truth-table file")
    ctx = FieldCtx(int(field))
    values = tuple(sparse._parse_value(v, ctx) for v in lines[1:])
    return TruthTable(int(q), int(n), ctx, values)


def save_truthtable(f: TruthTable, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_truthtable(f))


def load_truthtable(path) -> TruthTable:
    with open(path) as fh:
        return parse_truthtable(fh.read())


def parse_points(text: str):
    """One bitstring per line."""
    points = []
    for ln in text.splitlines():
        ln = ln.strip()
        if ln:
            points.append(int(ln, 2))
    return points
