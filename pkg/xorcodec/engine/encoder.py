"""
Block encoders: find the input stream whose decoded output matches the
unpruned data bits as closely as possible.

Two searches are provided. ``exhaustive_search`` picks the best input per
block independently and only applies to n_s = 0. ``trellis_search`` is the
Viterbi-style dynamic program over states made of the last n_s input
vectors; it handles any n_s and returns the globally optimal stream.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from .exceptions import InvalidParameterError, MalformedInputError
from .gf2decoder import check_trellis_cap, decode_stream
from .interfaces import DecoderSpec, EncodeResult, InputStream, MaskedBlock, PackedBitVector
from .utils.bit_utils import pack_rows_u64, popcount_rows

logger = logging.getLogger(__name__)

# Upper bound on uint64 words materialized per exhaustive-search chunk
_EXHAUSTIVE_CHUNK_WORDS = 1 << 22


def err_num(candidate, block: MaskedBlock) -> int:
    """Count unpruned positions where ``candidate`` disagrees with the block data."""
    candidate = np.asarray(candidate, dtype=bool)
    if candidate.shape != block.data.shape:
        raise InvalidParameterError(
            f"Candidate has {candidate.size} bits, block has {block.n_out}"
        )
    return int(((candidate ^ block.data) & block.mask).sum())


def blocks_to_arrays(blocks: Sequence[MaskedBlock], n_out: int) -> Tuple[np.ndarray, np.ndarray]:
    """Stack MaskedBlocks into (l, n_out) data and mask arrays."""
    if not blocks:
        empty = np.zeros((0, n_out), dtype=bool)
        return empty, empty.copy()
    for block in blocks:
        if block.n_out != n_out:
            raise MalformedInputError(f"Block of width {block.n_out} given to a decoder with n_out={n_out}")
    data = np.stack([b.data for b in blocks])
    mask = np.stack([b.mask for b in blocks])
    return data, mask


def _validate_arrays(spec: DecoderSpec, data: np.ndarray, mask: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    data = np.asarray(data, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if data.shape != mask.shape or data.ndim != 2 or data.shape[1] != spec.n_out:
        raise MalformedInputError(
            f"Block arrays must both be (l, {spec.n_out}), got {data.shape} and {mask.shape}"
        )
    return data, mask


def _result(spec: DecoderSpec, vectors: np.ndarray, data: np.ndarray, mask: np.ndarray) -> EncodeResult:
    """Build an EncodeResult, recounting per-block errors from the decoded stream."""
    stream = InputStream(tuple(int(v) for v in vectors), spec.n_in)
    decoded = decode_stream(spec, stream, data.shape[0])
    per_block = ((decoded ^ data) & mask).sum(axis=1)
    per_block_errors = tuple(int(e) for e in per_block)
    return EncodeResult(stream, sum(per_block_errors), per_block_errors)


def exhaustive_search(spec: DecoderSpec, data: np.ndarray, mask: np.ndarray) -> EncodeResult:
    """
    Independent per-block search over all 2**n_in inputs (n_s = 0 only).

    Ties resolve to the smallest input value.
    """
    if spec.n_s != 0:
        raise InvalidParameterError(f"Per-block search requires n_s = 0, got n_s = {spec.n_s}")
    data, mask = _validate_arrays(spec, data, mask)
    l = data.shape[0]
    if l == 0:
        return EncodeResult(InputStream((), spec.n_in), 0, ())

    outputs = pack_rows_u64(spec.chunk_outputs[0])
    packed_data = pack_rows_u64(data)
    packed_mask = pack_rows_u64(mask)
    words = outputs.shape[1]
    step = max(1, _EXHAUSTIVE_CHUNK_WORDS // (outputs.shape[0] * words))

    choices = np.empty(l, dtype=np.uint64)
    for start in range(0, l, step):
        stop = min(l, start + step)
        diff = (outputs[None, :, :] ^ packed_data[start:stop, None, :]) & packed_mask[start:stop, None, :]
        errors = popcount_rows(diff)
        choices[start:stop] = np.argmin(errors, axis=1)

    return _result(spec, choices, data, mask)


def _best_dtype(n_in: int):
    if n_in <= 8:
        return np.uint8
    if n_in <= 16:
        return np.uint16
    return np.uint32


def _window_errors(spec: DecoderSpec, data_row: np.ndarray, mask_row: np.ndarray) -> Optional[np.ndarray]:
    """
    Unmatched unpruned bits of one block for every window value.

    Window w packs the n_s+1 inputs oldest-first, so w = state * 2**n_in + newest.
    Returns None for a fully pruned block.
    """
    live = np.flatnonzero(mask_row)
    if live.size == 0:
        return None
    tables = [pack_rows_u64(spec.chunk_outputs[c][:, live]) for c in range(spec.n_s + 1)]
    target = pack_rows_u64(data_row[live][None, :])
    acc = tables[0] ^ target
    words = acc.shape[1]
    for table in tables[1:]:
        acc = (acc[:, None, :] ^ table[None, :, :]).reshape(-1, words)
    return popcount_rows(acc)


def trellis_search(
    spec: DecoderSpec,
    data: np.ndarray,
    mask: np.ndarray,
    trellis_cap: Optional[int] = None,
) -> EncodeResult:
    """
    Minimum-error stream by dynamic programming over the decoder trellis.

    The DP runs backwards in time keeping the cost-to-go of every state and
    the smallest optimal next input per (block, state). Walking that table
    forward from the zero warm-up state yields the lexicographically
    smallest optimal stream.

    Raises:
        ResourceLimitError: if n_in*(n_s+1) exceeds the trellis cap
    """
    check_trellis_cap(spec, trellis_cap)
    data, mask = _validate_arrays(spec, data, mask)
    l = data.shape[0]
    if l == 0:
        return EncodeResult(InputStream((), spec.n_in), 0, ())

    inputs = 1 << spec.n_in
    states = 1 << (spec.n_in * spec.n_s)
    best = np.empty((l, states), dtype=_best_dtype(spec.n_in))
    cost_to_go = np.zeros(states, dtype=np.uint32)

    for b in range(l - 1, -1, -1):
        errors = _window_errors(spec, data[b], mask[b])
        # w = oldest * states + next_state
        if errors is None:
            cost = np.broadcast_to(cost_to_go[None, :], (inputs, states)).reshape(states, inputs)
        else:
            cost = (errors.reshape(inputs, states) + cost_to_go[None, :]).reshape(states, inputs)
        best[b] = np.argmin(cost, axis=1)
        cost_to_go = cost.min(axis=1).astype(np.uint32)

    vectors = np.zeros(l + spec.n_s, dtype=np.uint64)
    state = 0
    for b in range(l):
        v = int(best[b, state])
        vectors[b + spec.n_s] = v
        state = (state * inputs + v) % states

    result = _result(spec, vectors, data, mask)
    assert result.total_errors == int(cost_to_go[0]), "trellis walk left the optimal path"
    logger.debug(
        f"Trellis search over {l} blocks, {states} states: {result.total_errors} unmatched bits"
    )
    return result


def encode_nonsequential(spec: DecoderSpec, blocks: Sequence[MaskedBlock]) -> EncodeResult:
    """Encode each block independently (n_s must be 0)."""
    data, mask = blocks_to_arrays(blocks, spec.n_out)
    return exhaustive_search(spec, data, mask)


def encode_sequential_dp(
    spec: DecoderSpec,
    blocks: Sequence[MaskedBlock],
    trellis_cap: Optional[int] = None,
) -> EncodeResult:
    """
    Globally optimal stream of l+n_s vectors for l blocks.

    Args:
        spec: Decoder definition
        blocks: Masked blocks in stream order
        trellis_cap: Override of the configured trellis cap

    Returns:
        EncodeResult; the first n_s vectors are zero warm-ups
    """
    data, mask = blocks_to_arrays(blocks, spec.n_out)
    return trellis_search(spec, data, mask, trellis_cap)


def encode_plane(
    spec: DecoderSpec,
    plane: PackedBitVector,
    mask: PackedBitVector,
    n_out: Optional[int] = None,
    encoder: Optional[str] = None,
    trellis_cap: Optional[int] = None,
) -> EncodeResult:
    """
    Slice a plane into masked blocks and encode them.

    Args:
        spec: Decoder definition
        plane: Data bits of the plane
        mask: Pruning mask (1 = unpruned)
        n_out: Block width; defaults to and must equal spec.n_out
        encoder: Registered encoder name, or None for the configured choice
        trellis_cap: Override of the configured trellis cap

    Returns:
        EncodeResult with per_block_errors in block order
    """
    from .bitplane import slice_block_arrays
    from .factory import EncoderFactory

    n_out = spec.n_out if n_out is None else n_out
    if n_out != spec.n_out:
        raise InvalidParameterError(f"Block width {n_out} does not match decoder n_out={spec.n_out}")

    data, block_mask = slice_block_arrays(plane, mask, n_out)
    block_encoder = EncoderFactory.create_encoder(encoder, spec, trellis_cap=trellis_cap)
    if block_encoder is None:
        raise InvalidParameterError(
            f"No encoder available for n_s={spec.n_s}", {'encoder': encoder}
        )
    return block_encoder.encode_blocks(spec, data, block_mask)
