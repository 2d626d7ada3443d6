"""
End-to-end lossless codec.

compress() turns a weight dump into an EncodedArtifact: every bit plane is
optionally inverted, encoded against the XOR-gate decoder, decoded again,
and the remaining unpruned mismatches are recorded in a correction stream.
decompress() reverses the pipeline; pruned positions come back as whatever
the decoder produced.
"""

import hashlib
import logging
from functools import partial
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .bitplane import group_bitplanes, maybe_invert, ungroup_bitplanes, zero_ratio
from .config import codec_config_manager
from .encoder import encode_plane
from .exceptions import CorruptArtifactError, MalformedInputError, VerificationError
from .gf2decoder import check_trellis_cap, decode_stream
from .interfaces import (
    BitPlaneSet,
    CorrectionConfig,
    CorrectionStream,
    DecoderSpec,
    EfficiencyReport,
    EncodedArtifact,
    InputStream,
    MaskStorage,
    PackedBitVector,
    PlaneEfficiency,
    PlaneRecord,
    TensorManifest,
)
from .utils.parallel_utils import ordered_map
from .utils.performance_utils import performance_tracker

logger = logging.getLogger(__name__)


def build_correction(
    decoded: PackedBitVector,
    original: PackedBitVector,
    mask: PackedBitVector,
    cfg: CorrectionConfig,
) -> CorrectionStream:
    """
    Record every unpruned mismatch, grouped by p-bit window.

    Args:
        decoded: Decoder output for the plane
        original: Plane the decoder should have produced
        mask: Pruning mask (1 = unpruned)
        cfg: Correction layout

    Returns:
        CorrectionStream with ascending in-window positions
    """
    if not decoded.length == original.length == mask.length:
        raise MalformedInputError("Decoded, original and mask lengths differ")
    mismatch = (decoded.to_bits() ^ original.to_bits()) & mask.to_bits()
    positions = np.flatnonzero(mismatch)
    windows = positions // cfg.p
    window_count = -(-decoded.length // cfg.p)

    flags = np.zeros(window_count, dtype=bool)
    flags[windows] = True
    entries = []
    for window in np.flatnonzero(flags):
        in_window = positions[windows == window] - window * cfg.p
        entries.append(tuple(int(p) for p in in_window))
    return CorrectionStream(decoded.length, cfg.p, tuple(bool(f) for f in flags), tuple(entries))


def apply_correction(
    decoded: PackedBitVector,
    stream: CorrectionStream,
    cfg: CorrectionConfig,
) -> PackedBitVector:
    """
    Flip the recorded positions of a decoded plane.

    Raises:
        CorruptArtifactError: if a position is out of range or out of order
    """
    if stream.p != cfg.p or stream.plane_length != decoded.length:
        raise CorruptArtifactError(
            "Correction stream does not match the decoded plane",
            {'stream_p': stream.p, 'p': cfg.p, 'stream_length': stream.plane_length, 'length': decoded.length},
        )
    bits = decoded.to_bits().copy()
    flagged = [i for i, flag in enumerate(stream.flags) if flag]
    for window, positions in zip(flagged, stream.entries):
        previous = -1
        for pos in positions:
            index = window * cfg.p + pos
            if pos >= cfg.p or pos <= previous or index >= decoded.length:
                raise CorruptArtifactError(
                    f"Correction position {pos} invalid in window {window}",
                    {'window': window, 'position': pos},
                )
            bits[index] = not bits[index]
            previous = pos
    return PackedBitVector.from_bits(bits)


def stream_vector_count(l: int, spec: DecoderSpec) -> int:
    """Stored stream vectors for l blocks; an empty plane stores none."""
    return l + spec.n_s if l else 0


def exact_footprint(plane_length: int, l: int, spec: DecoderSpec, correction: CorrectionStream) -> int:
    """
    Exact bits of one stored plane record.

    Counts the l+n_s stream vectors, the correction flags, marker plus
    position per mismatch, one terminator per flagged window, and the
    inversion flag.
    """
    if correction.plane_length != plane_length:
        raise MalformedInputError("Correction stream was built for another plane length")
    return stream_vector_count(l, spec) * spec.n_in + correction.bit_length + 1


def memory_save_analytic(S: float, E: float, n_c: int) -> float:
    """Closed-form memory reduction 1 - (1-S)(1 + (1-E) n_c); E is a fraction."""
    return 1.0 - (1.0 - S) * (1.0 + (1.0 - E) * n_c)


def decode_plane_bits(spec: DecoderSpec, stream: InputStream, plane_length: int) -> PackedBitVector:
    """Decode a stream and truncate the output to the plane length."""
    l = -(-plane_length // spec.n_out)
    blocks = decode_stream(spec, stream, l)
    return PackedBitVector.from_bits(blocks.ravel()[:plane_length])


def compress_plane(
    plane: PackedBitVector,
    mask: PackedBitVector,
    spec: DecoderSpec,
    cfg: CorrectionConfig,
    invert: bool = True,
    encoder: Optional[str] = None,
    trellis_cap: Optional[int] = None,
) -> Tuple[PlaneRecord, Dict[str, Any]]:
    """
    Encode one plane and build its correction stream.

    Returns:
        (PlaneRecord, counters with unpruned/matched/errors/l and the zero
        ratio before inversion, None for a fully pruned plane)
    """
    unpruned = mask.popcount()
    ratio = zero_ratio(plane, mask) if unpruned else None
    inverted = False
    stored = plane
    if invert:
        if unpruned:
            stored, inverted = maybe_invert(plane, mask)
        else:
            logger.warning("Plane is fully pruned, inversion skipped")

    result = encode_plane(spec, stored, mask, encoder=encoder, trellis_cap=trellis_cap)
    decoded = decode_plane_bits(spec, result.stream, plane.length)
    correction = build_correction(decoded, stored, mask, cfg)
    assert correction.mismatch_count == result.total_errors, "correction count disagrees with encoder"

    record = PlaneRecord(inverted, result.stream, correction)
    counters = {
        'unpruned': unpruned,
        'matched': unpruned - result.total_errors,
        'errors': result.total_errors,
        'l': len(result.per_block_errors),
        'zero_ratio': ratio,
    }
    return record, counters


def _compress_plane_job(job, mask, spec, cfg, invert, encoder, trellis_cap):
    index, plane = job
    record, counters = compress_plane(plane, mask, spec, cfg, invert, encoder, trellis_cap)
    logger.debug(
        f"Plane {index + 1}: inverted={record.inverted}, errors={counters['errors']}, "
        f"flagged_windows={len(record.correction.entries)}"
    )
    return record, counters


def decode_plane(
    spec: DecoderSpec,
    record: PlaneRecord,
    plane_length: int,
    cfg: CorrectionConfig,
) -> PackedBitVector:
    """Decode, correct and un-invert one plane record."""
    decoded = decode_plane_bits(spec, record.stream, plane_length)
    corrected = apply_correction(decoded, record.correction, cfg)
    return corrected.flipped() if record.inverted else corrected


def mask_digest(mask: PackedBitVector) -> str:
    return hashlib.sha256(mask.to_bytes()).hexdigest()


def build_report(
    spec: DecoderSpec,
    cfg: CorrectionConfig,
    manifest: TensorManifest,
    records: List[PlaneRecord],
    counters: List[Dict[str, Any]],
) -> EfficiencyReport:
    """Aggregate per-plane counters into an EfficiencyReport, keeping one entry per plane."""
    unpruned_per_plane = counters[0]['unpruned'] if counters else 0
    unpruned = sum(c['unpruned'] for c in counters)
    matched = sum(c['matched'] for c in counters)
    errors = sum(c['errors'] for c in counters)
    efficiency = 100.0 * matched / unpruned if unpruned else 100.0

    element_count = manifest.element_count
    s_observed = 1.0 - unpruned_per_plane / element_count
    encoded_bits = sum(len(r.stream) * spec.n_in for r in records)
    correction_bits = sum(r.correction.bit_length for r in records)
    plane_footprints = [
        exact_footprint(element_count, c['l'], spec, r.correction) for r, c in zip(records, counters)
    ]
    footprint = sum(plane_footprints)
    per_plane = tuple(
        PlaneEfficiency(
            index=i + 1,
            efficiency=100.0 * c['matched'] / c['unpruned'] if c['unpruned'] else 100.0,
            matched_bits=c['matched'],
            unpruned_bits=c['unpruned'],
            mismatch_bits=c['errors'],
            inverted=r.inverted,
            zero_ratio=c.get('zero_ratio'),
            footprint_bits=bits,
        )
        for i, (r, c, bits) in enumerate(zip(records, counters, plane_footprints))
    )
    original_bits = element_count * manifest.bit_width

    return EfficiencyReport(
        matched_bits=matched,
        unpruned_bits=unpruned,
        efficiency=efficiency,
        encoded_bits=encoded_bits,
        correction_bits=correction_bits,
        mismatch_bits=errors,
        exact_footprint_bits=footprint,
        original_bits=original_bits,
        analytic_memory_save=memory_save_analytic(s_observed, efficiency / 100.0, cfg.n_c),
        exact_memory_save=1.0 - footprint / original_bits,
        s_observed=s_observed,
        n_c=cfg.n_c,
        compression_ratio=spec.compression_ratio,
        inverted_planes=sum(1 for r in records if r.inverted),
        per_plane=per_plane,
    )


def compress(
    raw_weights: bytes,
    manifest: TensorManifest,
    mask: PackedBitVector,
    spec: DecoderSpec,
    cfg: Optional[CorrectionConfig] = None,
    invert: Optional[bool] = None,
    encoder: Optional[str] = None,
    trellis_cap: Optional[int] = None,
    workers: Optional[int] = None,
    mask_storage: Optional[str] = None,
    mask_path: Optional[str] = None,
) -> Tuple[EncodedArtifact, EfficiencyReport]:
    """
    Compress a weight dump.

    Args:
        raw_weights: Weight dump bytes
        manifest: Tensor shape and bit width
        mask: Pruning mask (1 = unpruned)
        spec: Decoder to encode against
        cfg: Correction layout; defaults to the configured block length
        invert: Apply per-plane inversion; defaults to configuration
        encoder: Encoder name or 'auto'
        trellis_cap: Override of the configured trellis cap
        workers: Planes encoded in parallel
        mask_storage: 'reference' or 'verbatim'
        mask_path: Path recorded with a referenced mask

    Returns:
        (EncodedArtifact, EfficiencyReport)

    Raises:
        ResourceLimitError: if the decoder exceeds the trellis cap
    """
    settings = codec_config_manager.get_settings()
    cfg = cfg or CorrectionConfig(settings.correction_block)
    invert = settings.invert if invert is None else invert
    workers = workers or settings.workers
    storage = MaskStorage(mask_storage or settings.mask_storage)

    check_trellis_cap(spec, trellis_cap)
    plane_set = group_bitplanes(raw_weights, manifest, mask)

    logger.info(
        f"Compressing {manifest.element_count} elements x {manifest.bit_width} planes with "
        f"n_in={spec.n_in}, n_out={spec.n_out}, n_s={spec.n_s}, p={cfg.p}"
    )
    job = partial(
        _compress_plane_job, mask=mask, spec=spec, cfg=cfg,
        invert=invert, encoder=encoder, trellis_cap=trellis_cap,
    )
    with performance_tracker.timed('compress', manifest.element_count * manifest.bit_width):
        results = ordered_map(job, list(enumerate(plane_set.planes)), workers)

    records = [r for r, _ in results]
    counters = [c for _, c in results]
    report = build_report(spec, cfg, manifest, records, counters)

    if storage is MaskStorage.VERBATIM:
        stored_mask, reference = mask, None
    else:
        stored_mask = None
        reference = {'sha256': mask_digest(mask)}
        if mask_path:
            reference['path'] = mask_path

    artifact = EncodedArtifact(
        manifest=manifest,
        spec=spec,
        cfg=cfg,
        planes=tuple(records),
        s_observed=report.s_observed,
        efficiency=report.efficiency,
        mask=stored_mask,
        mask_reference=reference,
    )
    logger.info(
        f"Compressed: E={report.efficiency:.2f}%, footprint={report.exact_footprint_bits} bits, "
        f"memory save={100 * report.exact_memory_save:.2f}%"
    )
    return artifact, report


def decompress(artifact: EncodedArtifact) -> bytes:
    """
    Restore the weight dump from an artifact.

    Unpruned bits are exact; pruned bits carry decoder output.
    """
    manifest = artifact.manifest
    length = manifest.element_count
    with performance_tracker.timed('decompress', length * manifest.bit_width):
        planes = tuple(decode_plane(artifact.spec, r, length, artifact.cfg) for r in artifact.planes)
    mask = artifact.mask or PackedBitVector.from_bits(np.ones(length, dtype=bool))
    plane_set = BitPlaneSet(planes, mask, (False,) * len(planes))
    logger.info(f"Decompressed {len(planes)} planes of {length} bits")
    return ungroup_bitplanes(plane_set, manifest)


def verify_roundtrip(
    artifact: EncodedArtifact,
    raw_weights: bytes,
    mask: PackedBitVector,
) -> Dict[str, Any]:
    """
    Check that decompressing the artifact restores every unpruned bit.

    Raises:
        VerificationError: on the first plane with an unpruned mismatch
    """
    if artifact.mask_reference and 'sha256' in artifact.mask_reference:
        if artifact.mask_reference['sha256'] != mask_digest(mask):
            raise VerificationError(
                "Mask does not match the digest recorded in the artifact",
                {'expected_sha256': artifact.mask_reference['sha256']},
            )
    restored = group_bitplanes(decompress(artifact), artifact.manifest, mask)
    original = group_bitplanes(raw_weights, artifact.manifest, mask)
    live = mask.to_bits()
    for k, (got, want) in enumerate(zip(restored.planes, original.planes), start=1):
        diff = np.flatnonzero((got.to_bits() ^ want.to_bits()) & live)
        if diff.size:
            logger.error(f"Verification failed on plane {k}: {diff.size} unpruned mismatches")
            raise VerificationError(
                f"Plane {k} differs on {diff.size} unpruned bits",
                {'plane': k, 'first_index': int(diff[0]), 'mismatches': int(diff.size)},
            )
    return {'status': 'ok', 'planes': len(original.planes), 'unpruned_bits': int(live.sum())}
