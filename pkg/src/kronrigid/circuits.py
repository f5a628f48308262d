"""Depth-d synchronous circuits for Kronecker powers M^{kron n}.

A synchronous circuit is an ordered factor chain A_1, ..., A_d whose
product is the target transform; its cost is the wire count, the sum of
factor nonzeros.  The constructions here turn a low-rank-plus-sparse
decomposition of a base matrix into circuits that beat the classical
butterfly baseline of d * N^(1+1/d) wires, and include the butterfly
itself, unbounded-depth synthesis, and exponent balancing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import sparse
from .errors import (
    DepthTooSmall,
    DimensionMismatch,
    GroupMismatch,
    NotSquare,
    UnverifiedInput,
)
from .rigidity import RigidityDecomposition
from .sparse import SparseMatrix, identity, kron, kron_all, kron_power, matmul


class SynchronousCircuit:
    """Factor chain A_1 x ... x A_d with exact wire accounting.

    base/base_power record that the circuit computes base^{kron base_power}
    when known, which lets lift_power raise it to higher powers.
    """

    def __init__(self, factors, base=None, base_power=None):
        if not factors:
            raise ValueError("a circuit needs at least one factor")
        ctx = factors[0].ctx
        for a, b in zip(factors, factors[1:]):
            if a.cols != b.rows:
                raise DimensionMismatch(
                    f"factor chain breaks: {a.cols} cols vs {b.rows} rows"
                )
            if b.ctx != ctx:
                raise DimensionMismatch("factors in different fields")
        self.factors = list(factors)
        self.base = base
        self.base_power = base_power

    @property
    def depth(self) -> int:
        return len(self.factors)

    @property
    def rows(self) -> int:
        return self.factors[0].rows

    @property
    def cols(self) -> int:
        return self.factors[-1].cols

    @property
    def ctx(self):
        return self.factors[0].ctx

    @property
    def wires(self) -> int:
        return sum(f.nnz for f in self.factors)

    @property
    def per_factor_nnz(self):
        return [f.nnz for f in self.factors]

    def product(self) -> SparseMatrix:
        acc = self.factors[0]
        for f in self.factors[1:]:
            acc = matmul(acc, f)
        return acc

    def product_csr(self):
        """Product as a scipy int64 CSR of residues (prime field only).

        Reduces mod p after every step so intermediates cannot overflow.
        """
        p = self.ctx.modulus
        acc = self.factors[0].to_csr()
        for f in self.factors[1:]:
            acc = acc @ f.to_csr()
            acc.data %= p
            acc.eliminate_zeros()
        return acc

    def __repr__(self):
        return (
            f"SynchronousCircuit(depth={self.depth}, {self.rows}x{self.cols}, "
            f"wires={self.wires})"
        )


@dataclass(frozen=True)
class TwoFactorization:
    """M = B x C = C' x B' through an inner dimension h."""

    target: SparseMatrix
    B: SparseMatrix  # q x h
    C: SparseMatrix  # h x q
    B_prime: SparseMatrix  # h x q
    C_prime: SparseMatrix  # q x h

    @property
    def q(self) -> int:
        return self.target.rows

    @property
    def h(self) -> int:
        return self.B.cols

    def verify(self) -> bool:
        return (
            matmul(self.B, self.C) == self.target
            and matmul(self.C_prime, self.B_prime) == self.target
        )


def two_factor_from_rigidity(d: RigidityDecomposition) -> TwoFactorization:
    """M = (S | B_lr) x (I_q / C_lr), inner dimension h = q + r.

    The primed pair comes from the transposed decomposition:
    M = (I_q | B_lr) x (S / C_lr), so either ordering puts the sparse
    block first or last.
    """
    m = d.target
    if not m.is_square:
        raise NotSquare("two-factorization needs a square target")
    q = m.rows
    b = sparse.concat_h(d.S, d.B_lr)
    c = sparse.stack_v(identity(q, m.ctx), d.C_lr)
    c_prime = sparse.concat_h(identity(q, m.ctx), d.B_lr)
    b_prime = sparse.stack_v(d.S, d.C_lr)
    return TwoFactorization(m, b, c, b_prime, c_prime)


def _expressions(tf: TwoFactorization, d: int):
    """The d ways to write M as a product of d terms.

    Expression i (0-based i < d-1) is I...I B C I...I with B at position
    i; the last expression is C' I_h...I_h B'.  The interior identities
    of the last expression live in the inner dimension h so the chain
    types check.
    """
    q = tf.q
    ctx = tf.target.ctx
    iq = identity(q, ctx)
    ih = identity(tf.h, ctx)
    exprs = []
    for i in range(d - 1):
        exprs.append([iq] * i + [tf.B, tf.C] + [iq] * (d - i - 2))
    exprs.append([tf.C_prime] + [ih] * (d - 2) + [tf.B_prime])
    return exprs


def symmetrized_depth_d(tf: TwoFactorization, d: int) -> SynchronousCircuit:
    """Depth-d circuit for M^{kron d}: factor j is the Kronecker product,
    over the d expressions, of their position-j terms.  The mixed-product
    property makes the factor product equal M^{kron d} directly, with no
    explicit permutations."""
    if d < 2:
        raise DepthTooSmall("depth must be at least 2")
    exprs = _expressions(tf, d)
    factors = [kron_all([e[j] for e in exprs]) for j in range(d)]
    return SynchronousCircuit(factors, base=tf.target, base_power=d)


def symmetrized_factor_nnz(tf: TwoFactorization, d: int):
    """Per-factor nnz of symmetrized_depth_d without materializing it."""
    if d < 2:
        raise DepthTooSmall("depth must be at least 2")
    exprs = _expressions(tf, d)
    counts = []
    for j in range(d):
        total = 1
        for e in exprs:
            total *= e[j].nnz
        counts.append(total)
    return counts


def _restrict_rows(m: SparseMatrix, stride: int) -> SparseMatrix:
    """Keep rows whose index is a multiple of stride, renumbered by /stride."""
    entries = [
        (i // stride, j, v) for i, j, v in m.entries if i % stride == 0
    ]
    return SparseMatrix(m.rows // stride, m.cols, m.ctx, entries, _checked=True)


def _restrict_cols(m: SparseMatrix, stride: int) -> SparseMatrix:
    entries = sorted(
        (i, j // stride, v) for i, j, v in m.entries if j % stride == 0
    )
    return SparseMatrix(m.rows, m.cols // stride, m.ctx, entries, _checked=True)


def lift_power(circ: SynchronousCircuit, n: int) -> SynchronousCircuit:
    """Raise a circuit for M^{kron t} to one for M^{kron n}.

    When t | n each factor is replaced by its (n/t)-th Kronecker power,
    so per-factor nnz is exactly b_j^{n/t}.  Otherwise the circuit for
    the next multiple n' of t is restricted to the principal block
    (low Kronecker digits zero), which computes M[0,0]^{n'-n} times
    M^{kron n}; the leading factor is rescaled to cancel the constant.
    """
    if circ.base is None or circ.base_power is None:
        raise ValueError("circuit does not record its base power")
    t = circ.base_power
    if n == t:
        return circ
    if n % t == 0:
        k = n // t
        factors = [kron_power(f, k) for f in circ.factors]
        return SynchronousCircuit(factors, base=circ.base, base_power=n)
    n_up = t * (n // t + 1)
    lifted = lift_power(circ, n_up)
    q = circ.base.rows
    extra = n_up - n
    stride = q**extra
    corner = circ.base.get(0, 0)
    if not corner:
        raise ValueError("principal-block restriction needs M[0,0] != 0")
    factors = list(lifted.factors)
    factors[0] = _restrict_rows(factors[0], stride)
    factors[-1] = _restrict_cols(factors[-1], stride)
    ctx = circ.ctx
    factors[0] = sparse.scale(factors[0], ctx.inv_raw(pow_raw(ctx, corner, extra)))
    return SynchronousCircuit(factors, base=circ.base, base_power=n)


def pow_raw(ctx, x, k):
    acc = ctx.one_raw()
    for _ in range(k):
        acc = ctx.mul_raw(acc, x)
    return acc


def synth_depth_d(
    decomp: RigidityDecomposition, n: int, d: int
) -> SynchronousCircuit:
    """Depth-d circuit for M^{kron n} from a rigidity decomposition of M.

    For d | n this is the symmetrized construction lifted by Kronecker
    powers.  For the remainder k = n mod d, factor j is augmented with a
    butterfly slot carrying one extra copy of M (factor j gets M in slot
    j for j <= k, identity otherwise)."""
    if d < 2:
        raise DepthTooSmall("depth must be at least 2")
    if n < 1:
        raise ValueError("n must be positive")
    m = decomp.target
    q = m.rows
    tf = two_factor_from_rigidity(decomp)
    n_main = d * (n // d)
    k = n - n_main
    if n_main:
        circ = lift_power(symmetrized_depth_d(tf, d), n_main)
        factors = list(circ.factors)
    else:
        factors = [identity(1, m.ctx)] * d
    if k:
        iq = identity(q, m.ctx)
        for j in range(d):
            aug = kron_all([m if j == ell else iq for ell in range(k)])
            factors[j] = kron(factors[j], aug)
    return SynchronousCircuit(factors, base=m, base_power=n)


def butterfly_circuit(m_list, group: int = 1) -> SynchronousCircuit:
    """Classical fast-transform factorization of a Kronecker product.

    Factor l is I (kron of earlier dims) x (group l of the inputs) x I;
    the product telescopes to the full Kronecker product.  group must
    divide the list length."""
    n = len(m_list)
    if n == 0 or n % group != 0:
        raise GroupMismatch(f"group {group} does not divide {n}")
    ctx = m_list[0].ctx
    q = m_list[0].rows
    for m in m_list:
        if not m.is_square or m.rows != q or m.ctx != ctx:
            raise DimensionMismatch("all inputs must be square, same size, same field")
    factors = []
    for ell in range(n // group):
        block = kron_all(m_list[ell * group : (ell + 1) * group])
        left = q ** (ell * group)
        right = q ** (n - (ell + 1) * group)
        f = block
        if left > 1:
            f = kron(identity(left, ctx), f)
        if right > 1:
            f = kron(f, identity(right, ctx))
        factors.append(f)
    return SynchronousCircuit(factors)


def butterfly_wire_count(q: int, n: int, d: int) -> int:
    """Exact wires of the grouped butterfly: d * q^n * q^(n/d), d | n."""
    if n % d:
        raise GroupMismatch(f"depth {d} does not divide {n}")
    return d * q**n * q ** (n // d)


def c_exponent(decomp: RigidityDecomposition) -> mpmath.mpf:
    """c = log_q((r+1) * (r + changes/q)), the wire-growth exponent the
    decomposition yields at depth d: wires about d * N^(1+c/d)."""
    q = decomp.target.rows
    r = decomp.rank_bound
    with mpmath.workprec(80):
        val = (r + 1) * (mpmath.mpf(r) + mpmath.mpf(decomp.changes) / q)
        return mpmath.log(val) / mpmath.log(q)


def synth_unbounded(decomp: RigidityDecomposition, n: int):
    """Near-linear-size circuit: depth chosen as round(c ln N), ties down.

    Splits n = n' + k with d | n'; the depth-d circuit for M^{kron n'}
    is padded by I_{q^k} and followed by a k-level butterfly computing
    I x M^{kron k}.  Returns (circuit, report) where the report carries
    the wire count and the wires / (N log2 N) ratio.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    m = decomp.target
    q = m.rows
    c = c_exponent(decomp)
    with mpmath.workprec(80):
        target_d = c * n * mpmath.log(q)
        d = int(mpmath.floor(target_d))
        if target_d - d > mpmath.mpf(1) / 2:  # ties round down
            d += 1
    d = max(2, min(n, d))
    n_main = d * (n // d)
    k = n - n_main
    circ = synth_depth_d(decomp, n_main, d)
    factors = list(circ.factors)
    ctx = m.ctx
    if k:
        pad = identity(q**k, ctx)
        factors = [kron(f, pad) for f in factors]
        left = identity(q**n_main, ctx)
        for ell in range(k):
            tail = kron_all(
                [left]
                + [m if j == ell else identity(q, ctx) for j in range(k)]
            )
            factors.append(tail)
    out = SynchronousCircuit(factors, base=m, base_power=n)
    big_n = q**n
    ratio = out.wires / (big_n * math.log2(big_n))
    report = {
        "depth": out.depth,
        "wires": out.wires,
        "c": float(c),
        "ratio_nlogn": ratio,
    }
    return out, report


def balanced_exponent(exponents) -> Fraction:
    """Common balanced target: a = 1 + (a* - 1)/(1 + d a* - sum a_j)."""
    a = [Fraction(x) for x in exponents]
    d = len(a)
    astar = max(a)
    return 1 + (astar - 1) / (1 + d * astar - sum(a))


def balance_exponents(
    base: SparseMatrix, factor_builder, n: int, exponents=None, sym=False
) -> SynchronousCircuit:
    """Rebalance an unbalanced factorization family of base^{kron n}.

    factor_builder(m) must return the d factors of base^{kron m} for any
    m >= 0.  With per-factor exponent estimates a_j (measured as
    log_q(nnz)/n when not given), the power is resplit as
    n = b n + sum b_j n with b = 1/(1 + sum(a* - a_j)) and
    b_j = (a* - a_j) b; factor j becomes A_{bn,j} kron (identity padding
    with one dense base^{kron b_j n} block in slot j).  Rounding is down,
    remainder absorbed by the b n part.  With sym=True the input family
    is first replaced by the symmetric pairing
    A_{m/2,j} kron A_{m/2,d+1-j}^T (base must be symmetric, n even).
    """
    q = base.rows
    builder = factor_builder
    if sym:
        def builder(m):  # noqa: F811 - deliberate shadowing
            if m % 2:
                raise ValueError("symmetric pairing needs even powers")
            if m == 0:
                return factor_builder(0)
            half = factor_builder(m // 2)
            d0 = len(half)
            return [
                kron(half[j], sparse.transpose(half[d0 - 1 - j]))
                for j in range(d0)
            ]

    input_factors = builder(n)
    d = len(input_factors)
    target = kron_power(base, n)
    if SynchronousCircuit(input_factors).product() != target:
        raise UnverifiedInput("input factorization does not multiply to the target")
    if exponents is None:
        exponents = [
            Fraction(math.log(f.nnz, q)).limit_denominator(10**6) / n
            for f in input_factors
        ]
    a = [Fraction(x) for x in exponents]
    astar = max(a)
    b = 1 / (1 + sum(astar - aj for aj in a))
    bjs = [(astar - aj) * b for aj in a]
    ms = [int(bj * n) for bj in bjs]
    m0 = n - sum(ms)
    if sym and m0 % 2:
        # keep the balanced part even; shift one copy to the max slot
        m0 -= 1
        ms[a.index(astar)] += 1
    core = builder(m0) if m0 else [identity(1, base.ctx)] * d
    factors = []
    for j in range(d):
        parts = [core[j]]
        for ell in range(d):
            if ms[ell] == 0:
                continue
            if ell == j:
                parts.append(kron_power(base, ms[ell]))
            else:
                parts.append(identity(q ** ms[ell], base.ctx))
        factors.append(kron_all(parts))
    return SynchronousCircuit(factors, base=base, base_power=n)


def verify_circuit(circ: SynchronousCircuit, target: SparseMatrix) -> dict:
    """Exact product comparison plus the wire accounting."""
    if circ.rows != target.rows or circ.cols != target.cols:
        raise DimensionMismatch("circuit and target dimensions differ")
    equal = circ.product() == target
    return {
        "equal": equal,
        "wires": circ.wires,
        "per_factor_nnz": circ.per_factor_nnz,
        "depth": circ.depth,
    }


def verify_against_dense(circ: SynchronousCircuit, dense: np.ndarray) -> bool:
    """Compare the circuit product with a dense int array, both mod p.

    The fast path for targets too large to hold as coordinate lists.
    """
    p = circ.ctx.modulus
    prod = np.asarray(circ.product_csr().todense())
    return bool(np.array_equal(prod % p, np.asarray(dense) % p))


def hadamard_dense_np(n: int) -> np.ndarray:
    """2^n-point Hadamard matrix as a dense int8 +-1 numpy array."""
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    v = idx[:, None] & idx[None, :]
    # parity of popcount by xor-folding the bits
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return np.where(v & 1, -1, 1).astype(np.int8)


# -- circuit file format ------------------------------------------------
#
# Header `circuit depth rows cols field wires`; then per factor a line
# `factor idx rows cols nnz` followed by its triplets.


def dump_circuit(circ: SynchronousCircuit) -> str:
    lines = [
        f"circuit {circ.depth} {circ.rows} {circ.cols} "
        f"{circ.ctx.modulus} {circ.wires}"
    ]
    for idx, f in enumerate(circ.factors):
        lines.append(f"factor {idx} {f.rows} {f.cols} {f.nnz}")
        for i, j, v in f.entries:
            lines.append(f"{i} {j} {sparse._format_value(v)}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str):
    from .fields import FieldCtx

    lines = [ln for ln in text.splitlines() if ln.strip()]
    tag, depth, rows, cols, field, wires = lines[0].split()
    if tag != "circuit":
        raise ValueError("not a circuit file")
    ctx = FieldCtx(int(field))
    factors = []
    pos = 1
    for _ in range(int(depth)):
        ftag, idx, frows, fcols, fnnz = lines[pos].split()
        if ftag != "factor":
            raise ValueError("expected a factor sub-header")
        pos += 1
        entries = []
        for _ in range(int(fnnz)):
            i, j, v = lines[pos].split()
            entries.append((int(i), int(j), sparse._parse_value(v, ctx)))
            pos += 1
        factors.append(SparseMatrix(int(frows), int(fcols), ctx, entries))
    circ = SynchronousCircuit(factors)
    if circ.wires != int(wires):
        raise ValueError("header wire count does not match factors")
    return circ


def save_circuit(circ: SynchronousCircuit, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_circuit(circ))


def load_circuit(path) -> SynchronousCircuit:
    with open(path) as fh:
        return parse_circuit(fh.read())
