"""
Sparse matrix-vector multiply reference paths.

Three paths must agree: dense with the mask applied, CSR, and rows stored
through the fixed-to-fixed codec and decoded on the fly. Values travel as
32-bit payloads (int32 or float32 viewed as uint32) through the bit-plane
codec; products accumulate in int64 or float64.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import codec
from .exceptions import CorruptArtifactError, MalformedInputError
from .interfaces import CorrectionConfig, DecoderSpec, EncodedArtifact, PackedBitVector, TensorManifest
from .bitplane import raw_to_values, values_to_raw
from .utils.performance_utils import performance_tracker

logger = logging.getLogger(__name__)

PAYLOAD_BITS = 32
_PAYLOAD_DTYPES = {'int32': np.int32, 'float32': np.float32}


def _accumulator(dtype) -> np.dtype:
    return np.dtype(np.float64) if np.issubdtype(dtype, np.floating) else np.dtype(np.int64)


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Compressed sparse rows: values, column indices, row-start offsets."""
    dat: np.ndarray
    col: np.ndarray
    row: np.ndarray
    n_cols: int

    def __post_init__(self):
        row = np.asarray(self.row, dtype=np.int64)
        col = np.asarray(self.col, dtype=np.int64)
        if row.ndim != 1 or row.size < 1 or row[0] != 0:
            raise MalformedInputError("CSR row offsets must start at 0")
        if np.any(np.diff(row) < 0):
            raise MalformedInputError("CSR row offsets must be non-decreasing")
        if row[-1] != col.size or col.size != np.asarray(self.dat).size:
            raise MalformedInputError("CSR row[-1] must equal the number of stored values")
        if col.size and (col.min() < 0 or col.max() >= self.n_cols):
            raise MalformedInputError("CSR column index out of bounds")
        object.__setattr__(self, 'row', row)
        object.__setattr__(self, 'col', col)
        object.__setattr__(self, 'dat', np.asarray(self.dat))

    @property
    def n_rows(self) -> int:
        return self.row.size - 1

    @property
    def nnz(self) -> int:
        return int(self.col.size)


def from_dense_masked(values: np.ndarray, mask: np.ndarray) -> CsrMatrix:
    """CSR of the unpruned entries of a dense matrix."""
    values = np.asarray(values)
    mask = np.asarray(mask, dtype=bool)
    if values.shape != mask.shape or values.ndim != 2:
        raise MalformedInputError("Values and mask must be matrices of equal shape")
    rows, cols = np.nonzero(mask)
    row = np.zeros(values.shape[0] + 1, dtype=np.int64)
    np.cumsum(mask.sum(axis=1), out=row[1:])
    return CsrMatrix(values[rows, cols], cols, row, values.shape[1])


def spmv_csr(a: CsrMatrix, x: np.ndarray) -> np.ndarray:
    """y_i = sum over row i's range of dat[j] * x[col[j]]."""
    x = np.asarray(x)
    if x.ndim != 1 or x.size != a.n_cols:
        raise MalformedInputError(f"Vector of length {x.size} given to a matrix with {a.n_cols} columns")
    acc = _accumulator(np.result_type(a.dat, x))
    with performance_tracker.timed('spmv_csr', a.nnz):
        products = a.dat.astype(acc) * x[a.col].astype(acc)
        row_ids = np.repeat(np.arange(a.n_rows), np.diff(a.row))
        y = np.zeros(a.n_rows, dtype=acc)
        np.add.at(y, row_ids, products)
    return y


def spmv_dense_masked(values: np.ndarray, mask: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Dense baseline with pruned entries zeroed."""
    values = np.asarray(values)
    x = np.asarray(x)
    if values.shape[1] != x.size:
        raise MalformedInputError(f"Vector of length {x.size} given to a matrix with {values.shape[1]} columns")
    acc = _accumulator(np.result_type(values, x))
    with performance_tracker.timed('spmv_dense', values.size):
        return np.where(mask, values, 0).astype(acc) @ x.astype(acc)


@dataclass(frozen=True)
class EncodedRowMatrix:
    """Rows stored as codec artifacts (one per row, mask kept verbatim)."""
    spec: DecoderSpec
    cfg: CorrectionConfig
    dtype: str
    n_cols: int
    rows: Tuple[EncodedArtifact, ...]

    @property
    def n_rows(self) -> int:
        return len(self.rows)


def encode_row_matrix(
    values: np.ndarray,
    mask: np.ndarray,
    spec: DecoderSpec,
    cfg: Optional[CorrectionConfig] = None,
    encoder: Optional[str] = None,
) -> EncodedRowMatrix:
    """
    Compress each row's 32-bit payloads through the bit-plane codec.

    Args:
        values: (rows, cols) int32 or float32 matrix
        mask: (rows, cols) bool, 1 = unpruned
        spec: Decoder shared by all rows
        cfg: Correction layout
        encoder: Encoder name or 'auto'
    """
    values = np.asarray(values)
    mask = np.asarray(mask, dtype=bool)
    dtype = values.dtype.name
    if dtype not in _PAYLOAD_DTYPES:
        raise MalformedInputError(f"Unsupported payload dtype {dtype}, expected int32 or float32")
    if values.shape != mask.shape or values.ndim != 2:
        raise MalformedInputError("Values and mask must be matrices of equal shape")

    cfg = cfg or CorrectionConfig()
    manifest = TensorManifest((values.shape[1],), PAYLOAD_BITS)
    rows = []
    for i in range(values.shape[0]):
        payload = np.ascontiguousarray(values[i]).view(np.uint32).astype(np.uint64)
        artifact, _ = codec.compress(
            values_to_raw(payload, manifest),
            manifest,
            PackedBitVector.from_bits(mask[i]),
            spec,
            cfg,
            invert=True,
            encoder=encoder,
            workers=1,
            mask_storage='verbatim',
        )
        rows.append(artifact)
    logger.info(f"Encoded {values.shape[0]}x{values.shape[1]} {dtype} matrix row by row")
    return EncodedRowMatrix(spec, cfg, dtype, values.shape[1], tuple(rows))


def decode_row(enc: EncodedRowMatrix, i: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Restore one row.

    Returns:
        (values with pruned entries zeroed, mask)
    """
    artifact = enc.rows[i]
    if artifact.mask is None or artifact.mask.length != enc.n_cols:
        raise CorruptArtifactError(f"Encoded row {i} carries no usable mask")
    payload = raw_to_values(codec.decompress(artifact), artifact.manifest).astype(np.uint32)
    values = payload.view(_PAYLOAD_DTYPES[enc.dtype])
    live = artifact.mask.to_bits()
    return np.where(live, values, 0).astype(values.dtype), live


def spmv_decoded(enc: EncodedRowMatrix, x: np.ndarray) -> np.ndarray:
    """Decode each row, zero its pruned entries, and dot with x."""
    x = np.asarray(x)
    if x.ndim != 1 or x.size != enc.n_cols:
        raise MalformedInputError(f"Vector of length {x.size} given to a matrix with {enc.n_cols} columns")
    acc = _accumulator(np.result_type(_PAYLOAD_DTYPES[enc.dtype], x.dtype))
    y = np.zeros(enc.n_rows, dtype=acc)
    with performance_tracker.timed('spmv_decoded', enc.n_rows * enc.n_cols):
        for i in range(enc.n_rows):
            values, live = decode_row(enc, i)
            y[i] = (values[live].astype(acc) * x[live].astype(acc)).sum()
    return y
