from fractions import Fraction

import mpmath
import pytest

from kronrigid import circuits, disjoint, sparse
from kronrigid.disjoint import (
    binom_cum,
    critical_fraction,
    dense_removal,
    disjointness_csr,
    disjointness_matrix,
    entropy,
    entropy_identities_check,
    js_factorization,
    js_partition,
    js_side_sums,
    removal_split_csr,
    rn_depth_d,
    rn_rigidity_decomposition,
    validate_partition,
)
from kronrigid.errors import CapExceeded
from kronrigid.fields import FieldCtx
from kronrigid.sparse import SparseMatrix

F5 = FieldCtx(5)


def test_r1_definition():
    r1 = disjointness_matrix(1, F5)
    assert r1.to_dense() == [[1, 1], [1, 0]]


def test_r2_is_kron_square():
    r2 = disjointness_matrix(2, F5)
    assert r2.nnz == 9
    r1 = disjointness_matrix(1, F5)
    assert r2 == sparse.kron(r1, r1)


def test_rn_nnz_3_pow_n():
    for n in range(1, 9):
        assert disjointness_matrix(n, F5).nnz == 3**n


def test_csr_agrees_with_list():
    import numpy as np

    for n in (1, 3, 6):
        m = disjointness_matrix(n, F5)
        c = disjointness_csr(n)
        dense = np.zeros((2**n, 2**n), dtype=np.int64)
        for i, j, v in m.entries:
            dense[i, j] = v
        assert np.array_equal(np.asarray(c.todense()), dense)


def test_cap():
    with pytest.raises(CapExceeded):
        disjointness_matrix(27, F5)


def test_binom_cum():
    assert binom_cum(14, 6, inclusive=False) == 3473
    assert binom_cum(8, 2, inclusive=True) == 37
    assert binom_cum(20, 8, inclusive=False) == sum(
        __import__("math").comb(20, i) for i in range(8)
    )


def test_dense_removal_small_by_hand():
    rep = dense_removal(2, 1)
    assert rep.removed_count == 1  # only the all-zero string
    assert rep.residual_row_nnz <= 1 == rep.bound


def test_dense_removal_n14():
    scan = dense_removal(14, 6, method="scan")
    count = dense_removal(14, 6, method="count")
    assert scan.removed_count == count.removed_count == 3473
    assert scan.residual_row_nnz == count.residual_row_nnz == 37
    assert scan.residual_row_nnz <= scan.bound == 37


def test_dense_removal_n20_count_path():
    rep = dense_removal(20, 8, method="count")
    assert rep.removed_count == binom_cum(20, 8, inclusive=False)
    assert rep.bound == binom_cum(12, 4, inclusive=True) == 794
    assert rep.residual_row_nnz <= rep.bound


def test_removal_paths_agree_small():
    for n in range(2, 11):
        for k in range(1, n // 2 + 1):
            scan = dense_removal(n, k, method="scan")
            count = dense_removal(n, k, method="count")
            assert scan.residual_row_nnz == count.residual_row_nnz, (n, k)
            assert scan.residual_row_nnz <= scan.bound


def test_residual_attained_at_weight_k():
    # the sparsest surviving row weight k attains the counting bound
    from math import comb

    for n in range(4, 11):
        for k in range(1, n // 2 + 1):
            rep = dense_removal(n, k, method="scan")
            expected = max(
                sum(comb(n - w, j) for j in range(k, n - w + 1))
                for w in range(k, n - k + 1)
            )
            assert rep.residual_row_nnz == expected
            assert expected == sum(comb(n - k, j) for j in range(k, n - k + 1))


def test_removal_split_csr():
    r, lmat, smat, bound = removal_split_csr(10, 4)
    assert abs(lmat + smat - r).nnz == 0
    assert bound == 2 * binom_cum(10, 4, inclusive=False)
    assert int(smat.getnnz(axis=1).max()) <= binom_cum(6, 2, inclusive=True)


def test_rn_rigidity_decomposition():
    dec = rn_rigidity_decomposition(8, Fraction(5, 12), F5)
    # k = floor(8 * 5/12) = 3
    assert dec.rank_bound == 2 * binom_cum(8, 3, inclusive=False)
    assert sparse.add_mat(dec.low_rank, dec.S) == dec.target
    assert sparse.rank(dec.low_rank) <= dec.rank_bound
    assert dec.S.nnz_r <= binom_cum(5, 2, inclusive=True)


def test_rn_rigidity_decomposition_tiny():
    dec = rn_rigidity_decomposition(2, Fraction(1, 2), F5)
    assert dec.rank_bound == 2
    assert sparse.add_mat(dec.low_rank, dec.S) == dec.target
    assert dec.S.nnz_r <= 1


def test_js_partition_small():
    p1 = js_partition(1)
    assert (p1.s_sum, p1.r_sum) == (1, 1)
    p2 = js_partition(2)
    assert (p2.s_sum, p2.r_sum) == (3, 2)
    assert validate_partition(p1) and validate_partition(p2)


def test_js_recursion_and_growth():
    s, r = 1, 1
    growth = 1 + mpmath.sqrt(2)
    c_const = 2 / float(growth)  # from n = 1
    for n in range(1, 13):
        part_s, part_r = js_side_sums(n)
        assert (part_s, part_r) == (s, r)
        assert part_s <= c_const * float(growth) ** n + 1e-9
        s, r = s + 2 * r, s + r


def test_js_partition_matches_recursion():
    for n in range(1, 11):
        p = js_partition(n)
        assert (p.s_sum, p.r_sum) == js_side_sums(n)
        assert p.area == 3**n
        assert len(p.pieces) == 2**n
        assert validate_partition(p)


def test_js_factorization_product():
    for n in (1, 2, 4, 8):
        tf = js_factorization(n, F5)
        assert tf.verify()
        s, r = js_side_sums(n)
        assert tf.B.nnz == s + 2 * r
        assert tf.C.nnz == s + r


def test_rn_depth_2():
    circ = rn_depth_d(8, 2, F5)
    assert circ.wires < 2 * 2**12  # butterfly baseline 8192
    assert circ.product() == disjointness_matrix(8, F5)
    # exact count: 2 * nnz(A_4 kron B_4') pattern = 2 * 41 * 29
    assert circ.wires == 2 * 41 * 29


def test_rn_depth_3():
    circ = rn_depth_d(12, 3, F5)
    assert circuits.verify_against_dense(circ, disjointness_csr(12).todense())


def test_rn_depth_remainder():
    circ = rn_depth_d(5, 2, F5)
    assert circ.product() == disjointness_matrix(5, F5)


def test_entropy_values():
    assert entropy(Fraction(1, 2)) == 1
    val = entropy(Fraction(1, 4))
    with mpmath.workprec(64):
        expected = 2 - mpmath.mpf(3) / 4 * mpmath.log(3, 2)
    assert abs(val - expected) < mpmath.mpf(2) ** -50
    assert abs(float(val) - 0.811278) < 1e-6


def test_entropy_identities():
    for q in (2, 3, 4, 7):
        res = entropy_identities_check(q, 20, 7)
        assert res["identity_ok"] and res["sandwich_ok"]


def test_critical_fraction():
    a_star, h_val = critical_fraction(bits=40)
    with mpmath.workprec(64):
        lhs = (1 - a_star) * disjoint.entropy_mpf((1 - 2 * a_star) / (1 - a_star))
        assert abs(lhs - mpmath.mpf(1) / 2) < mpmath.mpf(2) ** -38
    assert abs(float(a_star) - 0.41777) < 1e-4
    assert abs(float(h_val) - 0.9804) < 1e-3


def test_residual_below_sqrt_regime():
    # near the critical fraction the residual sparsity drops below 2^(n/2)
    n = 14
    k = int(Fraction(4178, 10000) * n)  # floor(a* n) = 5
    rep = dense_removal(n, k, method="count")
    assert rep.residual_row_nnz < 2 ** (n / 2) * 4  # finite-n slack
