import warnings

import pytest

from kronrigid import sparse, vf
from kronrigid.disjoint import disjointness_matrix
from kronrigid.errors import (
    LengthNotPowerOfTwo,
    ModulusTooSmallWarning,
    OuterZero,
)
from kronrigid.fields import RATIONALS, FieldCtx
from kronrigid.prng import SplitMix64
from kronrigid.rigidity import hadamard_matrix
from kronrigid.sparse import SparseMatrix
from kronrigid.vf import (
    TruthTable,
    batch_sums,
    batch_sums_oracle,
    build_vf_witness,
    expansion_identity_check,
    expansion_matrix_identity_check,
    fast_rn_apply,
    inclusion_exclusion_expand,
    kron2_to_vf,
    vf_matrix,
    vf_matrix_general,
)

F5 = FieldCtx(5)
F7 = FieldCtx(7)
F101 = FieldCtx(101)


def random_table(rng, q, n, ctx):
    return TruthTable(
        q, n, ctx, tuple(rng.randrange(ctx.modulus) for _ in range(q**n))
    )


def test_vf_matrix_constant_one():
    f = TruthTable(2, 1, F5, (1, 1))
    assert vf_matrix(f).to_dense() == [[1, 1], [1, 1]]


def test_vf_matrix_cell_semantics():
    rng = SplitMix64(51)
    f = random_table(rng, 2, 2, F5)
    m = vf_matrix(f)
    # cell ((0,1),(1,0)) reads f(1,1)
    assert m.get(0b01, 0b10) == f.values[0b11]


def test_vf_indicator_of_zero():
    f = TruthTable(2, 2, F5, (1, 0, 0, 0))
    m = vf_matrix(f)
    assert m.nnz == 1 and m.get(0, 0) == 1
    assert m != disjointness_matrix(2, F5)


def test_fast_apply_n1():
    out, ops = fast_rn_apply(F5, [F5.coerce(3), F5.coerce(4)])
    assert out == [F5.coerce(7), F5.coerce(3)]
    assert ops == {"adds": 1, "subs": 0}


def test_fast_apply_matches_dense():
    rng = SplitMix64(52)
    for n in range(1, 11):
        r = disjointness_matrix(n, F7)
        x = [rng.randrange(7) for _ in range(1 << n)]
        fast, _ = fast_rn_apply(F7, x)
        assert fast == sparse.apply(r, x)


def test_fast_apply_inverse_roundtrip():
    rng = SplitMix64(53)
    for _ in range(100):
        x = [rng.randrange(7) for _ in range(1 << 10)]
        fwd, _ = fast_rn_apply(F7, x)
        back, _ = fast_rn_apply(F7, fwd, inverse=True)
        assert back == x


def test_fast_apply_op_counts():
    x = [1] * 4096
    _, ops = fast_rn_apply(F5, x)
    assert ops["adds"] == 24576 and ops["subs"] == 0
    _, ops_inv = fast_rn_apply(F5, x, inverse=True)
    assert ops_inv["subs"] == 24576 and ops_inv["adds"] == 0


def test_fast_apply_bad_length():
    with pytest.raises(LengthNotPowerOfTwo):
        fast_rn_apply(F5, [1, 2, 3])


def test_witness_constant_one():
    f = TruthTable(2, 1, F5, (1, 1))
    w = build_vf_witness(f)
    assert w.b_f == (1, 0)
    assert w.verify_against(f)


def test_witness_random_dense_check():
    rng = SplitMix64(54)
    for _ in range(5):
        f = random_table(rng, 2, 10, F7)
        assert build_vf_witness(f).verify_against(f)


def test_witness_all_ones_indicator():
    n = 6
    values = [0] * (1 << n)
    values[(1 << n) - 1] = 1
    f = TruthTable(2, n, F7, tuple(values))
    w = build_vf_witness(f)
    # b_f has full +-1 support and matches the dense inverse apply
    assert all(v in (1, 6) for v in w.b_f)
    fwd, _ = fast_rn_apply(F7, list(w.b_f))
    assert fwd == list(f.values)


def test_batch_sums_hand_example():
    f = TruthTable(2, 2, F5, (1, 0, 0, 0))
    answers, _ = batch_sums(f, [0b00, 0b01])
    assert answers[0b00].value == 1
    assert answers[0b01].value == 0


def test_batch_sums_and_convention():
    # orthogonal-pairs counting: f = indicator of zero under AND
    n = 3
    values = [0] * 8
    values[0] = 1
    f = TruthTable(2, n, F7, tuple(values))
    pts = [0b100, 0b010, 0b001]
    answers, _ = batch_sums(f, pts, convention="and")
    # each point is orthogonal to the other two but not to itself
    for p in pts:
        assert answers[p].value == 2


def test_batch_sums_vs_oracle():
    rng = SplitMix64(55)
    for conv in ("or", "and"):
        f = random_table(rng, 2, 8, F101)
        pts = [rng.randrange(256) for _ in range(60)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ModulusTooSmallWarning)
            fast, ops = batch_sums(f, pts, convention=conv)
        slow = batch_sums_oracle(f, pts, convention=conv)
        assert all(fast[p].value == slow[p].value for p in pts)
        assert ops["adds"] == 256 * 8
        assert ops["mults"] <= 3 * 256


def test_batch_sums_multiplicity_warning():
    f = TruthTable(2, 3, F5, tuple([1] * 8))
    with pytest.warns(ModulusTooSmallWarning):
        batch_sums(f, [0] * 6)
    # rational mode counts plainly
    fr = TruthTable(2, 3, RATIONALS, tuple(RATIONALS.coerce(1) for _ in range(8)))
    answers, _ = batch_sums(fr, [0] * 6)
    assert answers[0].value == 6


def test_kron2_to_vf_hadamard():
    h1 = hadamard_matrix(1, F5)
    pi, f, pip = kron2_to_vf([h1] * 4)
    rebuilt = sparse.matmul(sparse.matmul(pi, vf_matrix(f)), pip)
    assert rebuilt == hadamard_matrix(4, F5)
    assert f.values[(1 << 4) - 1] == 1  # g(1) = 1 on every slot


def test_kron2_to_vf_r1_corner_zero_ok():
    r1 = disjointness_matrix(1, F5)
    pi, f, pip = kron2_to_vf([r1])
    assert f.values[0] == 0  # omega may be zero
    rebuilt = sparse.matmul(sparse.matmul(pi, vf_matrix(f)), pip)
    assert rebuilt == r1


def test_kron2_to_vf_random_pairs():
    rng = SplitMix64(56)
    for _ in range(5):
        mats = []
        for _ in range(2):
            dense = [
                [rng.nonzero_field_element(F7), rng.nonzero_field_element(F7)],
                [rng.nonzero_field_element(F7), rng.randrange(7)],
            ]
            mats.append(SparseMatrix.from_dense(dense, F7))
        pi, f, pip = kron2_to_vf(mats)
        rebuilt = sparse.matmul(sparse.matmul(pi, vf_matrix(f)), pip)
        assert rebuilt == sparse.kron(*mats)


def test_kron2_to_vf_outer_zero_rejected():
    bad = SparseMatrix.from_dense([[0, 1], [1, 1]], F5)
    with pytest.raises(OuterZero):
        kron2_to_vf([bad])


def test_expansion_constant_function():
    f = TruthTable(2, 3, F5, tuple([1] * 8))
    exp = inclusion_exclusion_expand(f)
    assert exp[frozenset()].values == (1,)
    for s, table in exp.items():
        if s:
            assert all(v == 0 for v in table.values)


def test_expansion_identity_q3():
    rng = SplitMix64(57)
    for _ in range(10):
        f = random_table(rng, 3, 2, F7)
        assert expansion_identity_check(f)


def test_expansion_matrix_identity_q3_n2():
    rng = SplitMix64(58)
    for _ in range(5):
        f = random_table(rng, 3, 2, F7)
        assert expansion_matrix_identity_check(f)


def test_vf_matrix_general_max_semantics():
    rng = SplitMix64(59)
    f = random_table(rng, 3, 2, F7)
    m = vf_matrix_general(f)
    codec = sparse.IndexCodec(3, 2)
    x, y = codec.encode((1, 2)), codec.encode((2, 0))
    assert m.get(x, y) == f.values[codec.encode((2, 2))]


def test_truthtable_file_roundtrip(tmp_path):
    rng = SplitMix64(60)
    f = random_table(rng, 2, 4, F7)
    path = tmp_path / "f.tt"
    vf.save_truthtable(f, path)
    loaded = vf.load_truthtable(path)
    assert loaded == f
    assert path.read_text().splitlines()[0] == "truthtable 2 4 7"


def test_parse_points():
    assert vf.parse_points("101\n000\n 11 \n") == [5, 0, 3]
