"""
Tests for bit-plane grouping, block slicing, zero ratios and weight dumps.
"""

import json
import os
import tempfile

import numpy as np
import pytest
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from ..engine.bitplane import (
    group_bitplanes,
    load_weight_dump,
    maybe_invert,
    plane_zero_ratios,
    raw_to_values,
    save_weight_dump,
    slice_blocks,
    ungroup_bitplanes,
    values_to_raw,
    zero_ratio,
)
from ..engine.exceptions import MalformedInputError, UndefinedRatioError
from ..engine.interfaces import PackedBitVector, TensorManifest


def bits(text):
    return PackedBitVector.from_bits([c == '1' for c in text])


@pytest.mark.unit
class GroupBitplanesTest(SimpleTestCase):
    """Test splitting weight dumps into planes and back."""

    def test_single_weight_planes_msb_first(self):
        """One 8-bit weight yields its bits MSB first."""
        manifest = TensorManifest((1,), 8)
        planes = group_bitplanes(bytes([0b10110001]), manifest, bits('1'))

        self.assertEqual([p.to_bits()[0] for p in planes.planes], [1, 0, 1, 1, 0, 0, 0, 1])
        self.assertTrue(all(p.length == 1 for p in planes.planes))
        self.assertEqual(planes.inverted, (False,) * 8)

    def test_zero_weights_give_zero_planes(self):
        """All-zero weights produce all-zero planes."""
        manifest = TensorManifest((5,), 8)
        planes = group_bitplanes(bytes(5), manifest, bits('10101'))

        self.assertTrue(all(p.popcount() == 0 for p in planes.planes))

    def test_plane_matches_shift_oracle(self):
        """Plane k at index i equals bit k (from the MSB) of weight i."""
        values = np.array([0x00, 0xFF, 0x5A, 0x81], dtype=np.uint64)
        manifest = TensorManifest((4,), 8)
        planes = group_bitplanes(values_to_raw(values, manifest), manifest, bits('1111'))

        self.assertEqual(len(planes.planes), 8)
        for k, plane in enumerate(planes.planes):
            expected = [(int(v) >> (7 - k)) & 1 for v in values]
            self.assertEqual(plane.to_bits().astype(int).tolist(), expected)

    def test_multi_byte_elements(self):
        """12-bit elements use two little-endian bytes each."""
        manifest = TensorManifest((2, 1), 12)
        raw = values_to_raw(np.array([0xABC, 0x001], dtype=np.uint64), manifest)

        self.assertEqual(raw, bytes([0xBC, 0x0A, 0x01, 0x00]))
        self.assertEqual(raw_to_values(raw, manifest).tolist(), [0xABC, 0x001])

    def test_rejects_bits_above_width(self):
        """Set bits above bit_width are malformed."""
        manifest = TensorManifest((1,), 4)
        with self.assertRaises(MalformedInputError):
            raw_to_values(bytes([0x10]), manifest)

    def test_rejects_size_mismatch(self):
        """Dump size must match the manifest."""
        manifest = TensorManifest((3,), 8)
        with self.assertRaises(MalformedInputError):
            group_bitplanes(bytes(2), manifest, bits('111'))

    def test_rejects_mask_length_mismatch(self):
        manifest = TensorManifest((3,), 8)
        with self.assertRaises(MalformedInputError):
            group_bitplanes(bytes(3), manifest, bits('11'))

    def test_ungroup_flips_inverted_planes(self):
        """Planes flagged inverted are flipped back when re-interleaving."""
        manifest = TensorManifest((2,), 1)
        planes = group_bitplanes(bytes([1, 0]), manifest, bits('11'))
        flipped = type(planes)((planes.planes[0].flipped(),), planes.mask, (True,))

        self.assertEqual(ungroup_bitplanes(flipped, manifest), bytes([1, 0]))

    @settings(deadline=None, max_examples=50)
    @given(
        bit_width=st.integers(min_value=1, max_value=64),
        count=st.integers(min_value=1, max_value=40),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_roundtrip(self, bit_width, count, seed):
        """Grouping then ungrouping reproduces the dump exactly."""
        rng = np.random.default_rng(seed)
        values = rng.integers(0, 2**63, size=count, dtype=np.uint64, endpoint=True)
        manifest = TensorManifest((count,), bit_width)
        raw = values_to_raw(values, manifest)
        mask = PackedBitVector.from_bits(rng.random(count) < 0.5)

        self.assertEqual(ungroup_bitplanes(group_bitplanes(raw, manifest, mask), manifest), raw)


@pytest.mark.unit
class SliceBlocksTest(SimpleTestCase):
    """Test slicing planes into masked blocks."""

    def test_exact_division(self):
        plane = PackedBitVector.zeros(16)
        self.assertEqual(len(slice_blocks(plane, plane, 8)), 2)

    def test_partial_last_block_is_masked(self):
        """The padded tail of the last block is pruned."""
        plane = PackedBitVector.from_bits(np.ones(17, dtype=bool))
        blocks = slice_blocks(plane, plane, 8)

        self.assertEqual(len(blocks), 3)
        self.assertEqual(blocks[-1].n_u, 1)
        self.assertEqual(blocks[-1].mask.tolist(), [True] + [False] * 7)

    def test_block_count_for_large_plane(self):
        plane = PackedBitVector.zeros(1_000_000)
        self.assertEqual(len(slice_blocks(plane, plane, 80)), 12_500)

    def test_length_mismatch(self):
        with self.assertRaises(MalformedInputError):
            slice_blocks(PackedBitVector.zeros(8), PackedBitVector.zeros(9), 4)


@pytest.mark.unit
class ZeroRatioTest(SimpleTestCase):
    """Test zero ratios and plane inversion."""

    def test_zero_ratio_examples(self):
        self.assertEqual(zero_ratio(bits('1111'), bits('1111')), 0.0)
        self.assertEqual(zero_ratio(bits('0101'), bits('1111')), 0.5)
        self.assertEqual(zero_ratio(bits('0101'), bits('1100')), 0.5)

    def test_zero_ratio_undefined(self):
        """A fully pruned plane has no zero ratio."""
        with self.assertRaises(UndefinedRatioError):
            zero_ratio(bits('0101'), bits('0000'))

    def test_invert_when_zeros_are_rare(self):
        plane, inverted = maybe_invert(bits('1110'), bits('1111'))
        self.assertTrue(inverted)
        self.assertEqual(plane, bits('0001'))

    def test_keep_when_zeros_dominate(self):
        plane, inverted = maybe_invert(bits('0001'), bits('1111'))
        self.assertFalse(inverted)
        self.assertEqual(plane, bits('0001'))

    @settings(deadline=None, max_examples=100)
    @given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=64))
    def test_inversion_leaves_majority_zeros(self, pairs):
        data = PackedBitVector.from_bits([d for d, _ in pairs])
        mask = PackedBitVector.from_bits([m for _, m in pairs])
        if mask.popcount() == 0:
            return
        plane, _ = maybe_invert(data, mask)
        self.assertGreaterEqual(zero_ratio(plane, mask), 0.5)

    def test_plane_zero_ratios(self):
        """Per-plane ratios follow plane order; fully pruned gives None."""
        manifest = TensorManifest((4,), 2)
        raw = values_to_raw(np.array([0b10, 0b10, 0b11, 0b00], dtype=np.uint64), manifest)

        planes = group_bitplanes(raw, manifest, bits('1111'))
        self.assertEqual(plane_zero_ratios(planes), [0.25, 0.75])

        pruned = group_bitplanes(raw, manifest, bits('0000'))
        self.assertEqual(plane_zero_ratios(pruned), [None, None])


@pytest.mark.unit
class WeightDumpTest(SimpleTestCase):
    """Test weight dump files."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = os.path.join(self.tmp.name, 'w.bin')

    def test_save_and_load(self):
        manifest = TensorManifest((2, 3), 8)
        raw = bytes(range(6))
        mask = bits('101101')

        written = save_weight_dump(raw, manifest, mask, self.path)
        self.assertEqual(written.mask_file, 'w.bin.mask')

        loaded_raw, loaded_manifest, loaded_mask = load_weight_dump(self.path)
        self.assertEqual(loaded_raw, raw)
        self.assertEqual(loaded_manifest.shape, (2, 3))
        self.assertEqual(loaded_mask, mask)

    def test_missing_mask_means_unpruned(self):
        with open(self.path, 'wb') as f:
            f.write(bytes(4))
        with open(f"{self.path}.json", 'w') as f:
            json.dump({'shape': [4], 'bit_width': 8}, f)

        _, _, mask = load_weight_dump(self.path)
        self.assertEqual(mask.popcount(), 4)

    def test_invalid_manifest(self):
        with open(self.path, 'wb') as f:
            f.write(bytes(4))
        with open(f"{self.path}.json", 'w') as f:
            f.write('{not json')

        with self.assertRaises(MalformedInputError):
            load_weight_dump(self.path)

    def test_manifest_missing_fields(self):
        with open(self.path, 'wb') as f:
            f.write(bytes(4))
        with open(f"{self.path}.json", 'w') as f:
            json.dump({'shape': [4]}, f)

        with self.assertRaises(MalformedInputError):
            load_weight_dump(self.path)
