"""
Artifact container serialization.

Layout (all integers little-endian):

    b"F2FX"  version:u16  header_length:u32  header JSON (utf-8, sorted keys)
    XMTX matrix section (see gf2decoder.matrix_to_bytes)
    one byte-aligned record per plane, MSB plane first:
        inversion flag, (l+n_s) stream vectors of n_in bits,
        correction flags, entries (marker 1 + position), terminator 0
    optional b"MASK" section with the packed mask when stored verbatim
    CRC-32 of everything above:u32
"""

import json
import logging
import struct
import zlib
from typing import Any, Dict, List, Tuple

from .codec import exact_footprint, stream_vector_count
from .exceptions import CorruptArtifactError, MalformedInputError
from .gf2decoder import matrix_from_bytes, matrix_to_bytes
from .interfaces import (
    CorrectionConfig,
    CorrectionStream,
    DecoderSpec,
    EncodedArtifact,
    InputStream,
    PackedBitVector,
    PlaneRecord,
    TensorManifest,
)
from .utils.bit_utils import BitReader, BitWriter

logger = logging.getLogger(__name__)

ARTIFACT_MAGIC = b"F2FX"
ARTIFACT_VERSION = 1
MASK_MAGIC = b"MASK"
_PREAMBLE = struct.Struct('<4sHI')
_CRC = struct.Struct('<I')


def write_plane_record(record: PlaneRecord, spec: DecoderSpec, cfg: CorrectionConfig) -> Tuple[bytes, int]:
    """
    Serialize one plane record.

    Returns:
        (zero-padded bytes, exact bit length before padding)
    """
    writer = BitWriter()
    writer.write_bit(record.inverted)
    writer.write_uint_array(record.stream.as_array(), spec.n_in)
    writer.write_bits(record.correction.flags)
    for positions in record.correction.entries:
        for pos in positions:
            writer.write_bit(True)
            writer.write_uint(pos, cfg.position_bits)
        writer.write_bit(False)
    return writer.to_bytes(), writer.bit_length


def read_plane_record(
    data: bytes,
    spec: DecoderSpec,
    cfg: CorrectionConfig,
    plane_length: int,
) -> Tuple[PlaneRecord, int]:
    """
    Parse one plane record.

    Returns:
        (PlaneRecord, bits consumed)

    Raises:
        CorruptArtifactError: on truncation, nonzero warm-up vectors, or
            correction positions outside the plane
    """
    reader = BitReader(data)
    inverted = reader.read_bit()

    l = -(-plane_length // spec.n_out)
    count = stream_vector_count(l, spec)
    vectors = tuple(int(v) for v in reader.read_uint_array(count, spec.n_in))
    if any(vectors[:spec.n_s]):
        raise CorruptArtifactError("Warm-up stream vectors must be zero")

    window_count = -(-plane_length // cfg.p)
    flags = tuple(bool(f) for f in reader.read_bits(window_count))
    entries = []
    for window, flag in enumerate(flags):
        if not flag:
            continue
        positions: List[int] = []
        while reader.read_bit():
            pos = reader.read_uint(cfg.position_bits)
            if (positions and pos <= positions[-1]) or window * cfg.p + pos >= plane_length:
                raise CorruptArtifactError(
                    f"Correction position {pos} invalid in window {window}",
                    {'window': window, 'position': pos},
                )
            positions.append(pos)
        if not positions:
            raise CorruptArtifactError(f"Flagged correction window {window} has no entries")
        entries.append(tuple(positions))

    correction = CorrectionStream(plane_length, cfg.p, flags, tuple(entries))
    return PlaneRecord(inverted, InputStream(vectors, spec.n_in), correction), reader.position


def _header(artifact: EncodedArtifact, record_bits: List[int]) -> Dict[str, Any]:
    mask_info: Dict[str, Any] = {'storage': 'verbatim' if artifact.mask is not None else 'reference'}
    if artifact.mask_reference:
        mask_info.update(artifact.mask_reference)
    return {
        'manifest': artifact.manifest.to_dict(),
        'spec': artifact.spec.to_dict(),
        'correction_block': artifact.cfg.p,
        'S_observed': artifact.s_observed,
        'E': artifact.efficiency,
        'plane_count': len(artifact.planes),
        'plane_length': artifact.manifest.element_count,
        'block_count': artifact.block_count,
        'record_bits': record_bits,
        'mask': mask_info,
    }


def artifact_to_bytes(artifact: EncodedArtifact) -> bytes:
    """Serialize an artifact into the container format."""
    spec, cfg = artifact.spec, artifact.cfg
    if len(artifact.planes) != artifact.manifest.bit_width:
        raise MalformedInputError("Artifact must hold one record per bit plane")

    records, record_bits = [], []
    for record in artifact.planes:
        blob, bits = write_plane_record(record, spec, cfg)
        expected = exact_footprint(artifact.manifest.element_count, artifact.block_count, spec, record.correction)
        if bits != expected:
            raise MalformedInputError(f"Plane record has {bits} bits, footprint says {expected}")
        records.append(blob)
        record_bits.append(bits)

    header = json.dumps(_header(artifact, record_bits), sort_keys=True).encode('utf-8')
    parts = [
        _PREAMBLE.pack(ARTIFACT_MAGIC, ARTIFACT_VERSION, len(header)),
        header,
        matrix_to_bytes(spec),
        *records,
    ]
    if artifact.mask is not None:
        parts += [MASK_MAGIC, artifact.mask.to_bytes()]

    body = b''.join(parts)
    return body + _CRC.pack(zlib.crc32(body))


def artifact_from_bytes(data: bytes) -> EncodedArtifact:
    """
    Parse and validate a serialized artifact.

    Raises:
        CorruptArtifactError: on any structural or integrity failure
    """
    if len(data) < _PREAMBLE.size + _CRC.size:
        raise CorruptArtifactError("Artifact truncated")
    body, (crc,) = data[:-_CRC.size], _CRC.unpack(data[-_CRC.size:])
    magic, version, header_length = _PREAMBLE.unpack_from(body)
    if magic != ARTIFACT_MAGIC:
        raise CorruptArtifactError(f"Bad artifact magic {magic!r}")
    if version != ARTIFACT_VERSION:
        raise CorruptArtifactError(f"Unsupported artifact version {version}", {'version': version})
    if zlib.crc32(body) != crc:
        raise CorruptArtifactError("Artifact checksum mismatch")

    offset = _PREAMBLE.size
    try:
        header = json.loads(body[offset:offset + header_length].decode('utf-8'))
        manifest = TensorManifest.from_dict(header['manifest'])
        cfg = CorrectionConfig(int(header['correction_block']))
        record_bits = [int(b) for b in header['record_bits']]
        mask_info = dict(header['mask'])
        expected_spec = header['spec']
        s_observed, efficiency = float(header['S_observed']), float(header['E'])
    except CorruptArtifactError:
        raise
    except Exception as e:
        raise CorruptArtifactError(f"Invalid artifact header: {e}") from e
    offset += header_length

    spec, offset = matrix_from_bytes(body, offset)
    if spec.to_dict() != expected_spec:
        raise CorruptArtifactError("Matrix section disagrees with the header")
    if len(record_bits) != manifest.bit_width:
        raise CorruptArtifactError("Header lists the wrong number of plane records")

    length = manifest.element_count
    planes = []
    for bits in record_bits:
        size = -(-bits // 8)
        if offset + size > len(body):
            raise CorruptArtifactError("Plane record truncated")
        record, consumed = read_plane_record(body[offset:offset + size], spec, cfg, length)
        if consumed != bits:
            raise CorruptArtifactError(f"Plane record holds {consumed} bits, header says {bits}")
        planes.append(record)
        offset += size

    mask = None
    storage = mask_info.pop('storage', 'reference')
    if storage == 'verbatim':
        size = -(-length // 8)
        if body[offset:offset + 4] != MASK_MAGIC or offset + 4 + size > len(body):
            raise CorruptArtifactError("Mask section missing or truncated")
        mask = PackedBitVector.from_bytes(body[offset + 4:offset + 4 + size], length)
        offset += 4 + size
    if offset != len(body):
        raise CorruptArtifactError(f"{len(body) - offset} unexpected trailing bytes")

    return EncodedArtifact(
        manifest=manifest,
        spec=spec,
        cfg=cfg,
        planes=tuple(planes),
        s_observed=s_observed,
        efficiency=efficiency,
        mask=mask,
        mask_reference=mask_info or None,
    )


def save_artifact(artifact: EncodedArtifact, path: str) -> int:
    """Write an artifact file; returns its size in bytes."""
    data = artifact_to_bytes(artifact)
    with open(path, 'wb') as f:
        f.write(data)
    logger.info(f"Wrote artifact {path} ({len(data)} bytes, {len(artifact.planes)} planes)")
    return len(data)


def load_artifact(path: str) -> EncodedArtifact:
    """Read and validate an artifact file."""
    with open(path, 'rb') as f:
        data = f.read()
    artifact = artifact_from_bytes(data)
    logger.info(f"Loaded artifact {path} ({len(artifact.planes)} planes)")
    return artifact
