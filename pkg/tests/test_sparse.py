import numpy as np
import pytest

from femasm import (
    CscBuilder,
    CscMatrix,
    TripletBatch,
    csc_from_triplets,
    max_abs_diff,
    write_matrix_market,
)

from oracles import dense_from_triplets

# worked 3x4 example: duplicate-free triplets of a small CSC matrix
EX_I = [0, 1, 2, 2, 0, 1]
EX_J = [0, 1, 1, 2, 3, 3]
EX_K = [1.0, 5.0, 1.0, 2.0, 6.0, 4.0]
EX_DENSE = np.array([[1.0, 0, 0, 6], [0, 5, 0, 4], [0, 1, 2, 0]])


def example_matrix() -> CscMatrix:
    return csc_from_triplets(EX_I, EX_J, EX_K, 3, 4)


class TestFromTriplets:
    def test_worked_example_arrays(self):
        a = example_matrix()
        assert a.values.tolist() == [1, 5, 1, 2, 6, 4]
        assert a.row_idx.tolist() == [0, 1, 2, 2, 0, 1]
        assert a.col_ptr.tolist() == [0, 1, 3, 4, 6]

    def test_duplicates_summed(self):
        a = csc_from_triplets([0, 0], [0, 0], [2.0, 3.0], 1, 1)
        assert a.nnz == 1 and a.values[0] == 5.0

    def test_exact_cancellation_dropped(self):
        a = csc_from_triplets([0, 0], [0, 0], [2.0, -2.0], 1, 1)
        assert a.nnz == 0

    def test_input_zeros_skipped(self):
        a = csc_from_triplets([0, 1], [0, 0], [0.0, 1.0], 2, 1)
        assert a.nnz == 1 and a.get(0, 0) == 0.0 and a.get(1, 0) == 1.0

    def test_empty_input(self):
        a = csc_from_triplets([], [], [], 3, 3)
        assert a.nnz == 0 and a.get(2, 2) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            csc_from_triplets([0, 1], [0], [1.0, 2.0], 2, 2)

    def test_out_of_range_reports_position(self):
        with pytest.raises(ValueError, match="position 1"):
            csc_from_triplets([0, 5], [0, 0], [1.0, 2.0], 3, 3)
        with pytest.raises(ValueError, match="column"):
            csc_from_triplets([0, 0], [0, -1], [1.0, 2.0], 3, 3)

    def test_matches_dense_oracle_exactly(self):
        rng = np.random.default_rng(42)
        for _ in range(60):
            m = int(rng.integers(1, 50))
            n = int(rng.integers(1, 50))
            length = int(rng.integers(0, 500))
            i = rng.integers(0, m, length)
            j = rng.integers(0, n, length)
            k = np.round(rng.standard_normal(length) * 8) / 8  # force duplicates to collide
            k[rng.random(length) < 0.1] = 0.0
            a = csc_from_triplets(i, j, k, m, n)
            assert np.array_equal(a.to_dense(), dense_from_triplets(i, j, k, m, n))


class TestGet:
    def test_stored_value(self):
        assert example_matrix().get(0, 3) == 6.0

    def test_absent_value(self):
        assert example_matrix().get(2, 3) == 0.0

    def test_empty_matrix(self):
        a = csc_from_triplets([], [], [], 4, 4)
        assert a.get(1, 2) == 0.0

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            example_matrix().get(3, 0)


class TestIncremental:
    def test_worked_example_insertion(self):
        b = CscBuilder(3, 4)
        for i, j, v in zip(EX_I, EX_J, EX_K):
            b.add(i, j, v)
        b.add(0, 1, 8.0)
        m = b.to_matrix()
        assert m.values.tolist() == [1, 8, 5, 1, 2, 6, 4]
        assert m.row_idx.tolist() == [0, 0, 1, 2, 2, 0, 1]
        assert m.col_ptr.tolist() == [0, 1, 4, 5, 7]

    def test_explicit_zero_is_stored(self):
        b = CscBuilder(2, 2)
        b.add(0, 0, 0.0)
        assert b.nnz == 1 and b.get(0, 0) == 0.0
        m = b.to_matrix()
        assert m.nnz == 1 and m.values[0] == 0.0
        assert m.drop_zeros().nnz == 0

    def test_repeated_adds_accumulate_in_place(self):
        b = CscBuilder(2, 2)
        b.add(1, 1, 1.0)
        b.add(1, 1, 2.0)
        assert b.nnz == 1 and b.get(1, 1) == 3.0

    def test_out_of_range(self):
        b = CscBuilder(2, 2)
        with pytest.raises(ValueError):
            b.add(2, 0, 1.0)

    def test_agrees_with_triplets_on_random_streams(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(2, 20))
            length = int(rng.integers(1, 200))
            i = rng.integers(0, n, length)
            j = rng.integers(0, n, length)
            k = rng.standard_normal(length)
            b = CscBuilder(n, n)
            for ii, jj, vv in zip(i, j, k):
                b.add(ii, jj, vv)
            direct = csc_from_triplets(i, j, k, n, n)
            assert max_abs_diff(b.to_matrix(), direct) <= 1e-15

    def test_invariants_after_random_adds(self):
        rng = np.random.default_rng(5)
        b = CscBuilder(30, 17)
        for _ in range(400):
            b.add(int(rng.integers(0, 30)), int(rng.integers(0, 17)), rng.standard_normal())
        m = b.to_matrix()
        assert m.col_ptr[0] == 0 and m.col_ptr[-1] == m.nnz
        assert (np.diff(m.col_ptr) >= 0).all()
        for j in range(17):
            rows = m.row_idx[m.col_ptr[j] : m.col_ptr[j + 1]]
            assert (np.diff(rows) > 0).all()


class TestAddBlock:
    def test_ones_block_becomes_dense(self):
        b = CscBuilder(3, 3)
        b.add_block([0, 1, 2], [0, 1, 2], np.ones((3, 3)))
        m = b.to_matrix()
        assert m.nnz == 9
        assert np.array_equal(m.to_dense(), np.ones((3, 3)))

    def test_repeat_doubles(self):
        b = CscBuilder(3, 3)
        for _ in range(2):
            b.add_block([0, 1, 2], [0, 1, 2], np.ones((3, 3)))
        assert np.array_equal(b.to_matrix().to_dense(), 2 * np.ones((3, 3)))

    def test_overlapping_blocks_match_dense_oracle(self):
        rng = np.random.default_rng(2)
        dense = np.zeros((6, 6))
        b = CscBuilder(6, 6)
        for ids in ([0, 1, 2], [2, 3, 4], [1, 3, 5]):
            block = rng.standard_normal((3, 3))
            b.add_block(ids, ids, block)
            dense[np.ix_(ids, ids)] += block
        assert np.allclose(b.to_matrix().to_dense(), dense, rtol=0, atol=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="block"):
            CscBuilder(3, 3).add_block([0, 1], [0, 1, 2], np.ones((2, 2)))


class TestDenseAndDiff:
    def test_worked_example_dense(self):
        assert np.array_equal(example_matrix().to_dense(), EX_DENSE)

    def test_diff_self_is_zero(self):
        a = example_matrix()
        assert max_abs_diff(a, a) == 0.0

    def test_diff_perturbed(self):
        a = example_matrix()
        k = list(EX_K)
        k[2] += 1e-3
        b = csc_from_triplets(EX_I, EX_J, k, 3, 4)
        assert max_abs_diff(a, b) == pytest.approx(1e-3, rel=1e-9)

    def test_diff_shape_mismatch(self):
        a = example_matrix()
        b = csc_from_triplets([0], [0], [1.0], 3, 3)
        with pytest.raises(ValueError, match="shape"):
            max_abs_diff(a, b)

    def test_dense_guard(self):
        a = csc_from_triplets([0], [0], [1.0], 100_000, 10_000)
        with pytest.raises(ValueError, match="guard"):
            a.to_dense()


class TestTripletBatch:
    def test_flat_is_column_major(self):
        ig = np.arange(18).reshape(9, 2)
        batch = TripletBatch(9, ig, ig, ig.astype(float))
        flat = batch.flat()[0]
        assert flat[:9].tolist() == ig[:, 0].tolist()

    def test_bad_rows_per_elem(self):
        ig = np.zeros((8, 2), dtype=np.int64)
        with pytest.raises(ValueError):
            TripletBatch(8, ig, ig, ig.astype(float))

    def test_shape_mismatch(self):
        ig = np.zeros((9, 2), dtype=np.int64)
        with pytest.raises(ValueError):
            TripletBatch(9, ig, ig[:, :1], ig.astype(float))


class TestMatrixMarket:
    def test_scipy_reads_it_back(self, tmp_path):
        scipy_io = pytest.importorskip("scipy.io")
        a = example_matrix()
        path = tmp_path / "a.mtx"
        write_matrix_market(a, path)
        back = scipy_io.mmread(path)
        assert back.shape == (3, 4)
        assert np.array_equal(back.toarray(), EX_DENSE)

    def test_header(self, tmp_path):
        path = tmp_path / "a.mtx"
        write_matrix_market(example_matrix(), path)
        first, second = path.read_text().splitlines()[:2]
        assert first == "%%MatrixMarket matrix coordinate real general"
        assert second == "3 4 6"
