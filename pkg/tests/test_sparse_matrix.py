import numpy as np
import pytest

from gridscale.sparsekit import (
    SparseMatrix,
    SparseMatrixError,
    from_arrays,
    from_dense,
    from_triplets,
    identity,
    nnz,
)


def test_duplicate_entries_are_summed():
    m = from_triplets(1, 1, [(0, 0, 1.0), (0, 0, 2.0)])
    assert m.nnz == 1
    assert m.values[0] == 3.0


def test_empty_triplets():
    m = from_triplets(3, 3, [])
    assert m.nnz == 0
    assert m.shape == (3, 3)
    assert list(m.colptr) == [0, 0, 0, 0]


def test_identity_assembly():
    m = from_triplets(2, 2, [(0, 0, 1.0), (1, 1, 1.0)])
    assert list(m.colptr) == [0, 1, 2]
    assert list(m.rowidx) == [0, 1]


def test_index_out_of_range():
    with pytest.raises(SparseMatrixError):
        from_triplets(2, 2, [(2, 0, 1.0)])
    with pytest.raises(SparseMatrixError):
        from_triplets(2, 2, [(0, -1, 1.0)])


def test_zero_sums_dropped():
    m = from_triplets(2, 2, [(0, 0, 1.0), (0, 0, -1.0), (1, 1, 2.0)])
    assert m.nnz == 1
    assert m.rowidx[0] == 1


def test_nnz_identity():
    assert nnz(identity(5)) == 5


def test_rows_sorted_within_columns():
    rng = np.random.default_rng(3)
    rows = rng.integers(0, 40, size=200)
    cols = rng.integers(0, 40, size=200)
    vals = rng.standard_normal(200)
    m = from_arrays(40, 40, rows, cols, vals)
    for j in range(40):
        r, _ = m.column(j)
        assert np.all(np.diff(r) > 0)


def test_dense_round_trip():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((7, 5))
    a[rng.random((7, 5)) < 0.6] = 0.0
    m = from_dense(a)
    np.testing.assert_array_equal(m.to_dense(), a)


def test_matvec_matches_dense():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((9, 9))
    a[rng.random((9, 9)) < 0.5] = 0.0
    x = rng.standard_normal(9)
    m = from_dense(a)
    np.testing.assert_allclose(m.matvec(x), a @ x, rtol=1e-13)


def test_matvec_complex():
    a = np.array([[1 + 2j, 0], [3j, -1.0]])
    m = from_dense(a)
    x = np.array([1.0, 1j])
    np.testing.assert_allclose(m.matvec(x), a @ x)


def test_transpose():
    a = np.array([[1.0, 2.0], [0.0, 3.0], [4.0, 0.0]])
    m = from_dense(a)
    np.testing.assert_array_equal(m.transpose().to_dense(), a.T)


def test_submatrix():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((8, 8))
    m = from_dense(a)
    ridx = np.array([1, 4, 6])
    cidx = np.array([0, 7])
    np.testing.assert_array_equal(
        m.submatrix(ridx, cidx).to_dense(), a[np.ix_(ridx, cidx)]
    )


def test_symmetry_checks():
    a = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert from_dense(a).is_symmetric()
    assert from_dense(a).pattern_symmetric()
    b = np.array([[2.0, 1.0], [4.0, 3.0]])
    assert not from_dense(b).is_symmetric()
    assert from_dense(b).pattern_symmetric()
    c = np.array([[2.0, 1.0], [0.0, 3.0]])
    assert not from_dense(c).pattern_symmetric()


def test_norm_inf():
    a = np.array([[1.0, -4.0], [2.0, 0.5]])
    assert from_dense(a).norm_inf() == pytest.approx(5.0)


def test_value_dtypes():
    m = from_triplets(2, 2, [(0, 0, 1)])
    assert m.dtype == np.float64
    mc = from_triplets(2, 2, [(0, 0, 1 + 0j)])
    assert mc.dtype == np.complex128
