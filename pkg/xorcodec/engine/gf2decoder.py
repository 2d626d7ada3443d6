"""
XOR-gate decoder over GF(2).

A decoder output block is M⊕ times the concatenated window of the last
n_s+1 input vectors (oldest first). Sequential decoding slides that window
one input vector per block, as a shift-register chain of depth n_s would.
"""

import logging
import struct
from typing import Dict, Optional, Sequence

import numpy as np

from .config import codec_config_manager
from .exceptions import CorruptArtifactError, InvalidParameterError, ResourceLimitError
from .interfaces import DecoderSpec, InputStream
from .utils.bit_utils import int_to_bits, pack_bits, unpack_bits

logger = logging.getLogger(__name__)

MATRIX_MAGIC = b"XMTX"
_MATRIX_HEADER = struct.Struct('<III')


def check_trellis_cap(spec: DecoderSpec, trellis_cap: Optional[int] = None) -> None:
    """
    Reject decoders whose trellis context n_in*(n_s+1) exceeds the cap.

    Raises:
        ResourceLimitError: naming the offending product
    """
    cap = codec_config_manager.get('trellis_cap', trellis_cap)
    if spec.window_bits > cap:
        logger.error(f"Trellis context {spec.n_in}*({spec.n_s}+1)={spec.window_bits} exceeds cap {cap}")
        raise ResourceLimitError(
            f"n_in*(n_s+1) = {spec.window_bits} exceeds the trellis cap of {cap}",
            {'n_in': spec.n_in, 'n_s': spec.n_s, 'window_bits': spec.window_bits, 'trellis_cap': cap},
        )


def decode_block(spec: DecoderSpec, window: Sequence[int]) -> np.ndarray:
    """
    Decode one output block.

    Args:
        spec: Decoder definition
        window: n_s+1 input values, oldest first

    Returns:
        bool array of n_out output bits
    """
    if len(window) != spec.n_s + 1:
        raise InvalidParameterError(
            f"Window holds {len(window)} vectors, decoder needs {spec.n_s + 1}"
        )
    values = np.asarray(window, dtype=np.uint64)
    if values.size and int(values.max()) >> spec.n_in:
        raise InvalidParameterError(f"Window value exceeds {spec.n_in} bits")
    bits = int_to_bits(values, spec.n_in).ravel()
    # Row-wise AND then parity
    return np.bitwise_xor.reduce(spec.matrix.astype(bool) & bits[None, :], axis=1)


def decode_stream(spec: DecoderSpec, stream: InputStream, l: Optional[int] = None) -> np.ndarray:
    """
    Decode a stream of l+n_s input vectors into l output blocks.

    Uses the per-chunk partial-output tables; block b is the XOR of
    chunk_outputs[c, u[b+c]] over the window chunks c.

    Returns:
        bool array (l, n_out)
    """
    vectors = stream.as_array()
    if l is None:
        l = max(0, len(vectors) - spec.n_s)
    if l == 0:
        return np.zeros((0, spec.n_out), dtype=bool)
    if len(vectors) < l + spec.n_s:
        raise InvalidParameterError(
            f"Stream holds {len(vectors)} vectors, {l + spec.n_s} needed for {l} blocks"
        )

    tables = spec.chunk_outputs
    index = vectors.astype(np.intp)
    if index.size and int(index.max()) >= tables.shape[1]:
        raise CorruptArtifactError(f"Stream value exceeds {spec.n_in} bits")

    out = np.zeros((l, spec.n_out), dtype=bool)
    for c in range(spec.n_s + 1):
        out ^= tables[c][index[c:c + l]]
    return out


def hardware_cost(spec: DecoderSpec) -> Dict[str, int]:
    """
    Analytic cost model of the decoder circuit.

    XOR gates are the expected count under a half-filled matrix, rounded
    half up; transistors count 3 per matrix position; the shift register
    adds n_s cycles of latency.
    """
    positions = spec.n_out * spec.window_bits
    return {
        'xor_gates': (positions + 1) // 2,
        'transistors': 3 * positions,
        'extra_latency_cycles': spec.n_s,
        'flip_flops': spec.n_in * spec.n_s,
    }


def matrix_to_bytes(spec: DecoderSpec) -> bytes:
    """Serialize the XMTX section: magic, dimensions, row-major packed bits."""
    header = MATRIX_MAGIC + _MATRIX_HEADER.pack(spec.n_in, spec.n_out, spec.n_s)
    return header + pack_bits(spec.matrix.ravel())


def matrix_from_bytes(data: bytes, offset: int = 0):
    """
    Parse an XMTX section.

    Returns:
        (DecoderSpec, offset just past the section)
    """
    head_end = offset + len(MATRIX_MAGIC) + _MATRIX_HEADER.size
    if len(data) < head_end or data[offset:offset + 4] != MATRIX_MAGIC:
        raise CorruptArtifactError("Missing XMTX matrix section")
    n_in, n_out, n_s = _MATRIX_HEADER.unpack_from(data, offset + 4)
    bit_count = n_out * n_in * (n_s + 1)
    end = head_end + -(-bit_count // 8)
    if bit_count == 0 or end > len(data):
        raise CorruptArtifactError(
            "Matrix section truncated", {'n_in': n_in, 'n_out': n_out, 'n_s': n_s}
        )
    bits = unpack_bits(data[head_end:end], bit_count)
    try:
        spec = DecoderSpec(n_in, n_out, n_s, bits.reshape(n_out, n_in * (n_s + 1)))
    except InvalidParameterError as e:
        raise CorruptArtifactError(f"Invalid matrix section: {e.message}") from e
    return spec, end


def write_matrix_blob(spec: DecoderSpec, path: str) -> int:
    """Write a standalone matrix blob; returns the bytes written."""
    blob = matrix_to_bytes(spec)
    with open(path, 'wb') as f:
        f.write(blob)
    logger.info(f"Wrote {spec.n_out}x{spec.window_bits} decoder matrix to {path}")
    return len(blob)


def read_matrix_blob(path: str) -> DecoderSpec:
    """Read a standalone matrix blob written by write_matrix_blob."""
    with open(path, 'rb') as f:
        data = f.read()
    spec, end = matrix_from_bytes(data)
    if end != len(data):
        raise CorruptArtifactError(f"Trailing bytes after matrix blob in {path}")
    return spec
