"""
Tests for the sparse matrix-vector multiply paths.
"""

import numpy as np
import pytest
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from ..engine.exceptions import MalformedInputError
from ..engine.interfaces import CorrectionConfig, DecoderSpec
from ..engine.spmv import (
    CsrMatrix,
    decode_row,
    encode_row_matrix,
    from_dense_masked,
    spmv_csr,
    spmv_decoded,
    spmv_dense_masked,
)


def sample_problem(dtype, rows=6, cols=40, S=0.8, seed=0):
    rng = np.random.default_rng(seed)
    if dtype == 'int32':
        values = rng.integers(-1000, 1000, size=(rows, cols)).astype(np.int32)
        x = rng.integers(-50, 50, size=cols).astype(np.int32)
    else:
        values = rng.standard_normal((rows, cols)).astype(np.float32)
        x = rng.standard_normal(cols).astype(np.float32)
    mask = rng.random((rows, cols)) >= S
    spec = DecoderSpec(4, 16, 0, rng.integers(0, 2, size=(16, 4)))
    return values, mask, x, spec


@pytest.mark.unit
class CsrTest(SimpleTestCase):
    """Test CSR construction and multiply."""

    def test_from_dense_masked(self):
        values = np.array([[1, 2, 3], [4, 5, 6]], dtype=np.int32)
        mask = np.array([[1, 0, 1], [0, 0, 0]], dtype=bool)
        csr = from_dense_masked(values, mask)

        self.assertEqual(csr.dat.tolist(), [1, 3])
        self.assertEqual(csr.col.tolist(), [0, 2])
        self.assertEqual(csr.row.tolist(), [0, 2, 2])
        self.assertEqual(csr.nnz, 2)

    def test_spmv_csr(self):
        csr = CsrMatrix(np.array([2, 3]), np.array([1, 0]), np.array([0, 1, 2]), 2)
        self.assertEqual(spmv_csr(csr, np.array([10, 100])).tolist(), [200, 30])

    def test_row_offsets_must_start_at_zero(self):
        with self.assertRaises(MalformedInputError):
            CsrMatrix(np.array([1]), np.array([0]), np.array([1, 1]), 1)

    def test_row_offsets_must_cover_values(self):
        with self.assertRaises(MalformedInputError):
            CsrMatrix(np.array([1, 2]), np.array([0, 1]), np.array([0, 1]), 2)

    def test_column_out_of_bounds(self):
        with self.assertRaises(MalformedInputError):
            CsrMatrix(np.array([1]), np.array([3]), np.array([0, 1]), 3)

    def test_vector_length_checked(self):
        csr = from_dense_masked(np.ones((2, 3), dtype=np.int32), np.ones((2, 3), dtype=bool))
        with self.assertRaises(MalformedInputError):
            spmv_csr(csr, np.ones(4))


@pytest.mark.unit
class EncodedRowTest(SimpleTestCase):
    """Test rows stored through the codec."""

    def test_decode_row_restores_unpruned_values(self):
        values, mask, _, spec = sample_problem('int32', seed=1)
        enc = encode_row_matrix(values, mask, spec, CorrectionConfig(64))

        for i in range(values.shape[0]):
            row, live = decode_row(enc, i)
            self.assertTrue(np.array_equal(live, mask[i]))
            self.assertTrue(np.array_equal(row, np.where(mask[i], values[i], 0)))

    def test_unsupported_dtype(self):
        values, mask, _, spec = sample_problem('int32')
        with self.assertRaises(MalformedInputError):
            encode_row_matrix(values.astype(np.int64), mask, spec)

    def test_shape_mismatch(self):
        values, mask, _, spec = sample_problem('int32')
        with self.assertRaises(MalformedInputError):
            encode_row_matrix(values, mask[:, :-1], spec)


@pytest.mark.unit
class SpmvEquivalenceTest(SimpleTestCase):
    """Dense, CSR and decoded paths agree."""

    def test_integer_paths_identical(self):
        values, mask, x, spec = sample_problem('int32', seed=2)
        dense = spmv_dense_masked(values, mask, x)
        csr = spmv_csr(from_dense_masked(values, mask), x)
        decoded = spmv_decoded(encode_row_matrix(values, mask, spec, CorrectionConfig(64)), x)

        self.assertEqual(dense.dtype, np.int64)
        self.assertEqual(dense.tolist(), csr.tolist())
        self.assertEqual(dense.tolist(), decoded.tolist())

    def test_float_paths_agree(self):
        values, mask, x, spec = sample_problem('float32', seed=3)
        dense = spmv_dense_masked(values, mask, x)
        csr = spmv_csr(from_dense_masked(values, mask), x)
        decoded = spmv_decoded(encode_row_matrix(values, mask, spec, CorrectionConfig(64)), x)

        self.assertEqual(decoded.dtype, np.float64)
        self.assertTrue(np.allclose(dense, csr, rtol=0, atol=1e-9))
        self.assertTrue(np.allclose(dense, decoded, rtol=0, atol=1e-9))

    def test_fully_pruned_matrix(self):
        values, _, x, spec = sample_problem('int32', seed=4)
        mask = np.zeros(values.shape, dtype=bool)
        decoded = spmv_decoded(encode_row_matrix(values, mask, spec), x)

        self.assertEqual(decoded.tolist(), [0] * values.shape[0])
        self.assertEqual(spmv_csr(from_dense_masked(values, mask), x).tolist(), [0] * values.shape[0])

    @settings(deadline=None, max_examples=40)
    @given(
        dtype=st.sampled_from(['int32', 'float32']),
        S=st.sampled_from([0.5, 0.7, 0.9]),
        seed=st.integers(min_value=0, max_value=2**16),
    )
    def test_pruned_values_do_not_matter(self, dtype, S, seed):
        values, mask, x, spec = sample_problem(dtype, rows=5, cols=48, S=S, seed=seed)
        rng = np.random.default_rng(seed + 1)
        noisy = np.where(mask, values, rng.permutation(values.ravel()).reshape(values.shape))
        config = CorrectionConfig(64)

        self.assertEqual(
            spmv_decoded(encode_row_matrix(values, mask, spec, config), x).tolist(),
            spmv_decoded(encode_row_matrix(noisy, mask, spec, config), x).tolist(),
        )
        self.assertEqual(
            spmv_csr(from_dense_masked(values, mask), x).tolist(),
            spmv_csr(from_dense_masked(noisy, mask), x).tolist(),
        )


def check_paths_agree(test, dtype, rows, cols, S, seed):
    values, mask, x, spec = sample_problem(dtype, rows=rows, cols=cols, S=S, seed=seed)
    dense = spmv_dense_masked(values, mask, x)
    csr = spmv_csr(from_dense_masked(values, mask), x)
    decoded = spmv_decoded(encode_row_matrix(values, mask, spec, CorrectionConfig(64)), x)

    if dtype == 'int32':
        test.assertEqual(dense.tolist(), csr.tolist())
        test.assertEqual(dense.tolist(), decoded.tolist())
    else:
        test.assertTrue(np.allclose(dense, csr, rtol=0, atol=1e-9))
        test.assertTrue(np.allclose(dense, decoded, rtol=0, atol=1e-9))


@pytest.mark.slow
class SpmvAcceptanceTest(SimpleTestCase):
    """Random matrices up to 128 x 128."""

    @settings(deadline=None, max_examples=100)
    @given(
        dtype=st.sampled_from(['int32', 'float32']),
        rows=st.integers(min_value=1, max_value=128),
        cols=st.integers(min_value=1, max_value=128),
        S=st.sampled_from([0.5, 0.7, 0.9]),
        seed=st.integers(min_value=0, max_value=2**16),
    )
    def test_hundred_random_matrices(self, dtype, rows, cols, S, seed):
        check_paths_agree(self, dtype, rows, cols, S, seed)
