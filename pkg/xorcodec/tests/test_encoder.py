"""
Tests for the block encoders: per-block search, trellis DP and plane encoding.
"""

import itertools

import numpy as np
import pytest
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from ..engine.encoder import (
    encode_nonsequential,
    encode_plane,
    encode_sequential_dp,
    err_num,
    exhaustive_search,
    trellis_search,
)
from ..engine.exceptions import InvalidParameterError, ResourceLimitError
from ..engine.gf2decoder import decode_stream
from ..engine.interfaces import DecoderSpec, InputStream, MaskedBlock, PackedBitVector
from ..engine.utils.bit_utils import int_to_bits


def block(data, mask):
    return MaskedBlock([c == '1' for c in data], [c == '1' for c in mask])


def random_blocks(rng, l, n_out, density=0.6):
    return [MaskedBlock(rng.random(n_out) < 0.5, rng.random(n_out) < density) for _ in range(l)]


def brute_force_minimum(spec, blocks):
    """Minimum total errors over every stream with zero warm-ups."""
    data = np.stack([b.data for b in blocks])
    mask = np.stack([b.mask for b in blocks])
    best = None
    for free in itertools.product(range(1 << spec.n_in), repeat=len(blocks)):
        stream = InputStream((0,) * spec.n_s + free, spec.n_in)
        errors = int(((decode_stream(spec, stream, len(blocks)) ^ data) & mask).sum())
        best = errors if best is None else min(best, errors)
    return best


def stream_totals(spec, blocks):
    """
    Total errors of every stream with zero warm-ups.

    Entry s holds the stream whose free vectors u_{n_s+1} .. u_{l+n_s}, read
    as one MSB-first integer, equal s; numeric order is lexicographic order.
    """
    l, n_in, n_s = len(blocks), spec.n_in, spec.n_s
    width = n_in * (n_s + 1)
    windows = int_to_bits(np.arange(1 << width), width).astype(np.uint8)
    outputs = ((windows @ spec.matrix.T.astype(np.uint8)) % 2).astype(bool)

    streams = np.arange(1 << (n_in * l), dtype=np.int64)
    low = (1 << n_in) - 1

    def vector(k):
        if k < n_s:
            return 0
        return (streams >> (n_in * (l - 1 - (k - n_s)))) & low

    totals = np.zeros(streams.size, dtype=np.int64)
    for b, blk in enumerate(blocks):
        table = ((outputs ^ blk.data) & blk.mask).sum(axis=1)
        window = 0
        for i in range(n_s + 1):
            window = (window << n_in) | vector(b + i)
        totals += table[window]
    return totals


def free_vectors(s, n_in, l):
    return tuple(int(s >> (n_in * (l - 1 - j))) & ((1 << n_in) - 1) for j in range(l))


def check_against_oracle(test, n_in, n_out, n_s, seed, data, bit_budget):
    """The DP reaches the minimum and returns the lexicographically smallest optimal stream."""
    l = data.draw(st.integers(min_value=1, max_value=bit_budget // n_in - n_s), label='l')
    density = data.draw(st.sampled_from([0.2, 0.6, 1.0]), label='density')
    rng = np.random.default_rng(seed)
    spec = DecoderSpec(n_in, n_out, n_s, rng.integers(0, 2, size=(n_out, n_in * (n_s + 1))))
    blocks = random_blocks(rng, l, n_out, density)

    totals = stream_totals(spec, blocks)
    best = int(np.argmin(totals))
    result = encode_sequential_dp(spec, blocks)

    test.assertEqual(result.total_errors, int(totals[best]))
    test.assertEqual(result.stream.vectors, (0,) * n_s + free_vectors(best, n_in, l))


ORACLE_DIMENSIONS = dict(
    n_in=st.integers(min_value=1, max_value=4),
    n_out=st.integers(min_value=1, max_value=8),
    n_s=st.integers(min_value=0, max_value=2),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    data=st.data(),
)


@pytest.mark.unit
class ErrNumTest(SimpleTestCase):
    """Test the unmatched-bit count."""

    def test_masked_disagreements(self):
        """(0110 ^ 0011) & 1011 leaves only position 3 set."""
        self.assertEqual(err_num([0, 1, 1, 0], block('0011', '1011')), 1)

    def test_identical(self):
        self.assertEqual(err_num([0, 0, 1, 1], block('0011', '1111')), 0)

    def test_fully_masked(self):
        self.assertEqual(err_num([1, 1, 1, 1], block('0000', '0000')), 0)

    def test_width_mismatch(self):
        with self.assertRaises(InvalidParameterError):
            err_num([1, 0], block('0011', '1111'))

    @settings(max_examples=200)
    @given(
        width=st.integers(min_value=1, max_value=64),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_symmetric_in_candidate_and_data(self, width, seed):
        rng = np.random.default_rng(seed)
        a, b, mask = (rng.random((3, width)) < 0.5)

        self.assertEqual(err_num(a, MaskedBlock(b, mask)), err_num(b, MaskedBlock(a, mask)))
        self.assertEqual(err_num(a, MaskedBlock(b, mask)), int(((a ^ b) & mask).sum()))


@pytest.mark.unit
class NonSequentialEncoderTest(SimpleTestCase):
    """Test independent per-block encoding."""

    def setUp(self):
        self.spec = DecoderSpec(2, 4, 0, [[1, 0], [0, 1], [1, 1], [1, 0]])

    def test_four_way_enumeration(self):
        """Outputs 0000, 0110, 1011, 1101 against 1010 pick u=0b10 with one error."""
        result = encode_nonsequential(self.spec, [block('1010', '1111')])

        self.assertEqual(result.stream.vectors, (0b10,))
        self.assertEqual(result.total_errors, 1)
        self.assertEqual(result.per_block_errors, (1,))

    def test_fully_masked_block_picks_zero(self):
        result = encode_nonsequential(self.spec, [block('1111', '0000')])
        self.assertEqual(result.stream.vectors, (0,))
        self.assertEqual(result.total_errors, 0)

    def test_error_bounded_by_unpruned_count(self):
        rng = np.random.default_rng(11)
        spec = DecoderSpec(4, 12, 0, rng.integers(0, 2, size=(12, 4)))
        blocks = random_blocks(rng, 30, 12)
        result = encode_nonsequential(spec, blocks)

        for errors, b in zip(result.per_block_errors, blocks):
            self.assertLessEqual(errors, b.n_u)

    def test_requires_non_sequential_decoder(self):
        spec = DecoderSpec(2, 4, 1, np.zeros((4, 4)))
        with self.assertRaises(InvalidParameterError):
            encode_nonsequential(spec, [block('1010', '1111')])

    def test_empty(self):
        result = encode_nonsequential(self.spec, [])
        self.assertEqual(result.total_errors, 0)
        self.assertEqual(len(result.stream), 0)


@pytest.mark.unit
class SequentialEncoderTest(SimpleTestCase):
    """Test the trellis dynamic program."""

    def test_small_trellis_matches_brute_force(self):
        spec = DecoderSpec(1, 2, 1, [[1, 0], [1, 1]])
        blocks = [block('11', '11'), block('10', '11')]
        result = encode_sequential_dp(spec, blocks)

        self.assertEqual(result.total_errors, brute_force_minimum(spec, blocks))
        self.assertEqual(len(result.stream), 3)
        self.assertEqual(result.stream.vectors[0], 0)

    def test_fully_masked_blocks(self):
        spec = DecoderSpec(3, 6, 2, np.ones((6, 9)))
        result = encode_sequential_dp(spec, [block('111111', '000000')] * 4)

        self.assertEqual(result.total_errors, 0)
        self.assertEqual(result.stream.vectors, (0,) * 6)

    def test_reported_errors_match_decoded_stream(self):
        rng = np.random.default_rng(12)
        spec = DecoderSpec(4, 10, 2, rng.integers(0, 2, size=(10, 12)))
        blocks = random_blocks(rng, 25, 10)
        result = encode_sequential_dp(spec, blocks)

        decoded = decode_stream(spec, result.stream, len(blocks))
        recount = sum(err_num(decoded[b], blk) for b, blk in enumerate(blocks))
        self.assertEqual(recount, result.total_errors)
        self.assertEqual(sum(result.per_block_errors), result.total_errors)

    def test_trellis_equals_exhaustive_without_shift_register(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            spec = DecoderSpec(5, 16, 0, rng.integers(0, 2, size=(16, 5)))
            blocks = random_blocks(rng, 40, 16)
            self.assertEqual(
                encode_sequential_dp(spec, blocks),
                encode_nonsequential(spec, blocks),
            )

    def test_deeper_register_never_worse(self):
        """An n_s=1 decoder embeds into n_s=2 with a zeroed oldest chunk."""
        rng = np.random.default_rng(14)
        shallow = rng.integers(0, 2, size=(12, 8))
        deep = np.hstack([np.zeros((12, 4), dtype=int), shallow])
        blocks = random_blocks(rng, 30, 12)

        errors_1 = encode_sequential_dp(DecoderSpec(4, 12, 1, shallow), blocks).total_errors
        errors_2 = encode_sequential_dp(DecoderSpec(4, 12, 2, deep), blocks).total_errors
        self.assertLessEqual(errors_2, errors_1)

    def test_cap(self):
        spec = DecoderSpec(9, 4, 2, np.zeros((4, 27)))
        with self.assertRaises(ResourceLimitError):
            encode_sequential_dp(spec, [block('0000', '1111')], trellis_cap=26)

    def test_vectorized_oracle_matches_direct_decoding(self):
        rng = np.random.default_rng(16)
        for n_in, n_out, n_s, l in [(1, 3, 2, 3), (2, 5, 1, 3), (3, 4, 0, 2), (2, 6, 2, 2)]:
            spec = DecoderSpec(n_in, n_out, n_s, rng.integers(0, 2, size=(n_out, n_in * (n_s + 1))))
            blocks = random_blocks(rng, l, n_out)
            self.assertEqual(int(stream_totals(spec, blocks).min()), brute_force_minimum(spec, blocks))

    def test_ties_resolve_to_smallest_stream(self):
        """Nothing unpruned: every stream is optimal, so all free vectors are zero."""
        rng = np.random.default_rng(17)
        spec = DecoderSpec(2, 4, 1, rng.integers(0, 2, size=(4, 4)))
        result = encode_sequential_dp(spec, [block('0110', '0000')] * 3)
        self.assertEqual(result.stream.vectors, (0, 0, 0, 0))

    @settings(deadline=None, max_examples=150)
    @given(**ORACLE_DIMENSIONS)
    def test_dp_optimality_oracle(self, n_in, n_out, n_s, seed, data):
        check_against_oracle(self, n_in, n_out, n_s, seed, data, bit_budget=12)

    @settings(deadline=None, max_examples=100)
    @given(
        n_in=st.integers(min_value=1, max_value=4),
        n_s=st.integers(min_value=0, max_value=2),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_clearing_mask_bits_never_adds_errors(self, n_in, n_s, seed):
        rng = np.random.default_rng(seed)
        spec = DecoderSpec(n_in, 10, n_s, rng.integers(0, 2, size=(10, n_in * (n_s + 1))))
        blocks = random_blocks(rng, 12, 10, density=0.8)
        relaxed = [MaskedBlock(b.data, b.mask & (rng.random(10) < 0.7)) for b in blocks]

        self.assertLessEqual(
            encode_sequential_dp(spec, relaxed).total_errors,
            encode_sequential_dp(spec, blocks).total_errors,
        )


@pytest.mark.slow
class SequentialEncoderOracleTest(SimpleTestCase):
    """Brute-force comparison on instances of up to 20 stream bits."""

    @settings(deadline=None, max_examples=500)
    @given(**ORACLE_DIMENSIONS)
    def test_dp_matches_brute_force(self, n_in, n_out, n_s, seed, data):
        check_against_oracle(self, n_in, n_out, n_s, seed, data, bit_budget=20)


@pytest.mark.unit
class EncodePlaneTest(SimpleTestCase):
    """Test plane-level encoding through the encoder factory."""

    def setUp(self):
        rng = np.random.default_rng(15)
        self.spec = DecoderSpec(4, 20, 1, rng.integers(0, 2, size=(20, 8)))
        self.plane = PackedBitVector.from_bits(rng.random(205) < 0.5)
        self.mask = PackedBitVector.from_bits(rng.random(205) < 0.3)

    def test_empty_plane(self):
        empty = PackedBitVector.zeros(0)
        result = encode_plane(self.spec, empty, empty)

        self.assertEqual(result.total_errors, 0)
        self.assertEqual(result.per_block_errors, ())

    def test_blocks_and_stream_length(self):
        result = encode_plane(self.spec, self.plane, self.mask, encoder='trellis')

        self.assertEqual(len(result.per_block_errors), 11)
        self.assertEqual(len(result.stream), 12)

    def test_block_width_must_match(self):
        with self.assertRaises(InvalidParameterError):
            encode_plane(self.spec, self.plane, self.mask, n_out=10)

    def test_unsupported_encoder(self):
        """The per-block search cannot run a sequential decoder."""
        with self.assertRaises(InvalidParameterError):
            encode_plane(self.spec, self.plane, self.mask, encoder='exhaustive')

    def test_exhaustive_and_trellis_agree(self):
        spec = DecoderSpec(4, 20, 0, self.spec.matrix[:, 4:])
        by_search = encode_plane(spec, self.plane, self.mask, encoder='exhaustive')
        by_trellis = encode_plane(spec, self.plane, self.mask, encoder='trellis')

        self.assertEqual(by_search, by_trellis)

    def test_direct_search_helpers(self):
        data = np.zeros((3, 20), dtype=bool)
        mask = np.ones((3, 20), dtype=bool)
        spec = DecoderSpec(4, 20, 0, self.spec.matrix[:, :4])

        self.assertEqual(exhaustive_search(spec, data, mask).total_errors, 0)
        self.assertEqual(trellis_search(spec, data, mask).total_errors, 0)
