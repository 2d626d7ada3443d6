"""
Bit-plane handling.

A tensor of n_w-bit weights becomes n_w planes; plane k (1-based) holds
bit k of every weight counted from the most significant bit, in row-major
element order. All planes share the tensor's pruning mask.
"""

import json
import logging
import os
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import InvalidParameterError, MalformedInputError, UndefinedRatioError
from .interfaces import BitPlaneSet, MaskedBlock, PackedBitVector, TensorManifest

logger = logging.getLogger(__name__)


def raw_to_values(raw_weights: bytes, manifest: TensorManifest) -> np.ndarray:
    """
    Parse a raw little-endian dump into uint64 element values.

    Raises:
        MalformedInputError: on a size mismatch or set bits above bit_width
    """
    width = manifest.byte_width
    expected = manifest.element_count * width
    if len(raw_weights) != expected:
        raise MalformedInputError(
            f"Weight dump holds {len(raw_weights)} bytes, manifest requires {expected}",
            {'shape': list(manifest.shape), 'bit_width': manifest.bit_width},
        )
    padded = np.zeros((manifest.element_count, 8), dtype=np.uint8)
    padded[:, :width] = np.frombuffer(raw_weights, dtype=np.uint8).reshape(-1, width)
    values = padded.view('<u8').ravel().astype(np.uint64)
    if manifest.bit_width < 64 and np.any(values >> np.uint64(manifest.bit_width)):
        raise MalformedInputError(f"Weight dump has bits set above bit_width={manifest.bit_width}")
    return values


def values_to_raw(values: np.ndarray, manifest: TensorManifest) -> bytes:
    """Serialize element values as ceil(bit_width/8) little-endian bytes each."""
    values = np.asarray(values, dtype=np.uint64).ravel()
    if values.size != manifest.element_count:
        raise MalformedInputError(
            f"Got {values.size} values for {manifest.element_count} elements"
        )
    if manifest.bit_width < 64:
        values = values & np.uint64((1 << manifest.bit_width) - 1)
    as_bytes = values.astype('<u8').view(np.uint8).reshape(-1, 8)
    return as_bytes[:, :manifest.byte_width].tobytes()


def group_bitplanes(raw_weights: bytes, manifest: TensorManifest, mask: PackedBitVector) -> BitPlaneSet:
    """
    Split a weight dump into bit planes.

    Args:
        raw_weights: element_count values in the dump format
        manifest: Shape and bit width of the tensor
        mask: Pruning mask over the flattened tensor (1 = unpruned)

    Returns:
        BitPlaneSet with n_w planes (MSB first), none inverted
    """
    if mask.length != manifest.element_count:
        raise MalformedInputError(
            f"Mask has {mask.length} bits, tensor has {manifest.element_count} elements"
        )
    values = raw_to_values(raw_weights, manifest)
    shifts = np.arange(manifest.bit_width - 1, -1, -1, dtype=np.uint64)
    bits = ((values[:, None] >> shifts[None, :]) & np.uint64(1)).astype(bool)
    planes = tuple(PackedBitVector.from_bits(bits[:, k]) for k in range(manifest.bit_width))
    return BitPlaneSet(planes, mask, (False,) * manifest.bit_width)


def ungroup_bitplanes(plane_set: BitPlaneSet, manifest: TensorManifest) -> bytes:
    """
    Re-interleave planes into the weight dump format.

    Planes flagged as inverted are flipped back first.
    """
    if len(plane_set.planes) != manifest.bit_width:
        raise MalformedInputError(
            f"Got {len(plane_set.planes)} planes for bit_width={manifest.bit_width}"
        )
    values = np.zeros(manifest.element_count, dtype=np.uint64)
    for k, (plane, inverted) in enumerate(zip(plane_set.planes, plane_set.inverted)):
        if plane.length != manifest.element_count:
            raise MalformedInputError("Plane length does not match the tensor size")
        bits = plane.to_bits()
        if inverted:
            bits = ~bits
        values |= bits.astype(np.uint64) << np.uint64(manifest.bit_width - 1 - k)
    return values_to_raw(values, manifest)


def _check_lengths(plane: PackedBitVector, mask: PackedBitVector) -> None:
    if plane.length != mask.length:
        raise MalformedInputError(
            f"Plane has {plane.length} bits but mask has {mask.length}"
        )


def slice_block_arrays(plane: PackedBitVector, mask: PackedBitVector, n_out: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Slice a plane into n_out-bit blocks as arrays.

    The last block is zero-padded; padded positions are masked out.

    Returns:
        (data, mask) bool arrays of shape (ceil(length/n_out), n_out)
    """
    if n_out <= 0:
        raise InvalidParameterError(f"n_out must be positive, got {n_out}")
    _check_lengths(plane, mask)
    l = -(-plane.length // n_out)
    data = np.zeros(l * n_out, dtype=bool)
    live = np.zeros(l * n_out, dtype=bool)
    data[:plane.length] = plane.to_bits()
    live[:mask.length] = mask.to_bits()
    return data.reshape(l, n_out), live.reshape(l, n_out)


def slice_blocks(plane: PackedBitVector, mask: PackedBitVector, n_out: int) -> List[MaskedBlock]:
    """Slice a plane into MaskedBlocks of n_out bits."""
    data, live = slice_block_arrays(plane, mask, n_out)
    return [MaskedBlock(d, m) for d, m in zip(data, live)]


def zero_ratio(plane: PackedBitVector, mask: PackedBitVector) -> float:
    """
    Fraction of unpruned positions holding a 0.

    Raises:
        UndefinedRatioError: if no position is unpruned
    """
    _check_lengths(plane, mask)
    live = mask.to_bits()
    unpruned = int(live.sum())
    if unpruned == 0:
        raise UndefinedRatioError("Zero ratio is undefined without unpruned bits")
    ones = int((plane.to_bits() & live).sum())
    return (unpruned - ones) / unpruned


def maybe_invert(plane: PackedBitVector, mask: PackedBitVector) -> Tuple[PackedBitVector, bool]:
    """Flip the plane when fewer than half of its unpruned bits are 0."""
    if zero_ratio(plane, mask) < 0.5:
        return plane.flipped(), True
    return plane, False


def plane_zero_ratios(plane_set: BitPlaneSet) -> List[Optional[float]]:
    """Zero ratio of each plane (MSB first); None when nothing is unpruned."""
    if plane_set.mask.popcount() == 0:
        return [None] * len(plane_set.planes)
    return [zero_ratio(plane, plane_set.mask) for plane in plane_set.planes]


def _read_mask(path: str, length: int) -> PackedBitVector:
    with open(path, 'rb') as f:
        data = f.read()
    if len(data) != -(-length // 8):
        raise MalformedInputError(
            f"Mask file {path} holds {len(data)} bytes, {-(-length // 8)} expected"
        )
    return PackedBitVector.from_bytes(data, length)


def load_weight_dump(weights_path: str, manifest_path: Optional[str] = None):
    """
    Load a raw weight dump with its JSON manifest and mask.

    Args:
        weights_path: Raw little-endian element file
        manifest_path: JSON manifest; defaults to ``<weights_path>.json``

    Returns:
        (raw_weights, manifest, mask); without a mask_file every element is unpruned
    """
    manifest_path = manifest_path or f"{weights_path}.json"
    try:
        with open(manifest_path, 'r') as f:
            manifest = TensorManifest.from_dict(json.load(f))
    except json.JSONDecodeError as e:
        raise MalformedInputError(f"Manifest {manifest_path} is not valid JSON: {e}") from e

    with open(weights_path, 'rb') as f:
        raw = f.read()

    if manifest.mask_file:
        mask_path = manifest.mask_file
        if not os.path.isabs(mask_path):
            mask_path = os.path.join(os.path.dirname(os.path.abspath(manifest_path)), mask_path)
        mask = _read_mask(mask_path, manifest.element_count)
    else:
        mask = PackedBitVector.from_bits(np.ones(manifest.element_count, dtype=bool))

    # Validate eagerly so malformed dumps fail at load time
    raw_to_values(raw, manifest)
    logger.info(
        f"Loaded weight dump {weights_path}: shape={list(manifest.shape)}, "
        f"bit_width={manifest.bit_width}, unpruned={mask.popcount()}"
    )
    return raw, manifest, mask


def save_weight_dump(
    raw_weights: bytes,
    manifest: TensorManifest,
    mask: PackedBitVector,
    weights_path: str,
    manifest_path: Optional[str] = None,
    mask_path: Optional[str] = None,
) -> TensorManifest:
    """
    Write a weight dump, its mask and a manifest pointing at the mask.

    Returns:
        The manifest as written (mask_file relative to the manifest)
    """
    manifest_path = manifest_path or f"{weights_path}.json"
    mask_path = mask_path or f"{weights_path}.mask"
    raw_to_values(raw_weights, manifest)
    if mask.length != manifest.element_count:
        raise MalformedInputError("Mask length does not match the tensor size")

    mask_ref = os.path.relpath(os.path.abspath(mask_path), os.path.dirname(os.path.abspath(manifest_path)))
    written = TensorManifest(manifest.shape, manifest.bit_width, mask_ref)

    with open(weights_path, 'wb') as f:
        f.write(raw_weights)
    with open(mask_path, 'wb') as f:
        f.write(mask.to_bytes())
    with open(manifest_path, 'w') as f:
        json.dump(written.to_dict(), f, indent=2, sort_keys=True)

    logger.info(f"Wrote weight dump {weights_path} ({manifest.element_count} elements)")
    return written

