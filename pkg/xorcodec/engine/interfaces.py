"""
Core types and interfaces of the fixed-to-fixed codec.

These dataclasses are shared by the bit-plane, decoder, encoder and codec
modules; the BlockEncoder interface is the contract every registered
encoder implementation follows.
"""

import enum
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .exceptions import InvalidParameterError, MalformedInputError
from .utils.bit_utils import int_to_bits, pack_bits, unpack_bits


class EncoderKind(enum.Enum):
    """Encoder implementations available to the registry."""
    EXHAUSTIVE = "exhaustive"
    TRELLIS = "trellis"


class MaskStorage(enum.Enum):
    """How an artifact carries its pruning mask."""
    REFERENCE = "reference"
    VERBATIM = "verbatim"


@dataclass(frozen=True)
class CodecSettings:
    """Resolved runtime settings of the codec."""
    trellis_cap: int = 26
    correction_block: int = 512
    search_trials: int = 32
    calibration_bits: int = 50_000
    invert: bool = True
    encoder: str = "auto"
    workers: int = 1
    mask_storage: str = MaskStorage.REFERENCE.value


@dataclass(frozen=True)
class PackedBitVector:
    """Dense bit array with explicit length; bits past ``length`` read as 0."""
    data: bytes
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise InvalidParameterError(f"Negative bit length: {self.length}")
        needed = -(-self.length // 8)
        if len(self.data) != needed:
            raise MalformedInputError(
                f"Packed data holds {len(self.data)} bytes, {needed} expected for {self.length} bits"
            )
        tail = self.length % 8
        if tail and self.data[-1] >> tail:
            # Zero the padding so equal vectors compare equal
            cleaned = self.data[:-1] + bytes([self.data[-1] & ((1 << tail) - 1)])
            object.__setattr__(self, 'data', cleaned)

    @classmethod
    def from_bits(cls, bits) -> 'PackedBitVector':
        bits = np.asarray(bits, dtype=bool).ravel()
        return cls(pack_bits(bits), int(bits.size))

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> 'PackedBitVector':
        needed = -(-length // 8)
        if len(data) < needed:
            raise MalformedInputError(
                f"Bit vector needs {needed} bytes for {length} bits, got {len(data)}"
            )
        return cls(bytes(data[:needed]), length)

    @classmethod
    def zeros(cls, length: int) -> 'PackedBitVector':
        return cls(bytes(-(-length // 8)), length)

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.data, self.length)

    def to_bytes(self) -> bytes:
        return self.data

    def popcount(self) -> int:
        return int(np.bitwise_count(np.frombuffer(self.data, dtype=np.uint8)).sum())

    def flipped(self) -> 'PackedBitVector':
        return PackedBitVector.from_bits(~self.to_bits())

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> bool:
        if index < 0:
            raise IndexError(index)
        if index >= self.length:
            return False
        return bool((self.data[index // 8] >> (index % 8)) & 1)


@dataclass(frozen=True)
class TensorManifest:
    """Shape and element width of a weight tensor dump."""
    shape: Tuple[int, ...]
    bit_width: int
    mask_file: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'shape', tuple(int(d) for d in self.shape))
        if not self.shape or any(d <= 0 for d in self.shape):
            raise MalformedInputError(f"Shape must hold positive dimensions, got {self.shape}")
        if not 1 <= self.bit_width <= 64:
            raise MalformedInputError(f"bit_width must be in 1..64, got {self.bit_width}")

    @property
    def element_count(self) -> int:
        return math.prod(self.shape)

    @property
    def byte_width(self) -> int:
        """Bytes per element in the raw little-endian dump."""
        return -(-self.bit_width // 8)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'shape': list(self.shape), 'bit_width': self.bit_width}
        if self.mask_file is not None:
            data['mask_file'] = self.mask_file
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TensorManifest':
        try:
            return cls(
                shape=tuple(data['shape']),
                bit_width=int(data['bit_width']),
                mask_file=data.get('mask_file'),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInputError(f"Invalid manifest: {e}") from e


@dataclass(frozen=True)
class BitPlaneSet:
    """The n_w bit planes of a tensor sharing one pruning mask."""
    planes: Tuple[PackedBitVector, ...]
    mask: PackedBitVector
    inverted: Tuple[bool, ...]

    def __post_init__(self):
        if len(self.inverted) != len(self.planes):
            raise MalformedInputError("One inversion flag per plane is required")
        for plane in self.planes:
            if plane.length != self.mask.length:
                raise MalformedInputError("All planes and the mask must have identical length")


@dataclass(frozen=True, eq=False)
class DecoderSpec:
    """
    XOR-gate decoder definition.

    ``matrix`` has n_out rows and (n_s+1)*n_in columns; the column chunk c
    (0 = oldest input vector of the window) holds columns c*n_in .. c*n_in+n_in-1,
    and column j inside a chunk receives bit (n_in-1-j) of the input value.
    """
    n_in: int
    n_out: int
    n_s: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.n_in <= 0 or self.n_out <= 0 or self.n_s < 0:
            raise InvalidParameterError(
                f"Invalid decoder dimensions n_in={self.n_in}, n_out={self.n_out}, n_s={self.n_s}"
            )
        matrix = np.array(self.matrix, dtype=np.uint8) & 1
        expected = (self.n_out, self.window_bits)
        if matrix.shape != expected:
            raise InvalidParameterError(
                f"Decoder matrix has shape {matrix.shape}, expected {expected}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @property
    def window_bits(self) -> int:
        """Trellis context width n_in*(n_s+1)."""
        return self.n_in * (self.n_s + 1)

    @property
    def compression_ratio(self) -> float:
        return self.n_out / self.n_in

    @cached_property
    def chunk_outputs(self) -> np.ndarray:
        """
        Partial outputs per window chunk.

        Returns:
            bool array (n_s+1, 2**n_in, n_out); the decoder output of a window
            is the XOR over chunks c of chunk_outputs[c, u_c].
        """
        inputs = int_to_bits(np.arange(1 << self.n_in), self.n_in).astype(np.uint32)
        tables = []
        for c in range(self.n_s + 1):
            chunk = self.matrix[:, c * self.n_in:(c + 1) * self.n_in].astype(np.uint32)
            tables.append(((inputs @ chunk.T) & 1).astype(bool))
        return np.stack(tables)

    def to_dict(self) -> Dict[str, int]:
        return {'n_in': self.n_in, 'n_out': self.n_out, 'n_s': self.n_s}

    def __eq__(self, other):
        if not isinstance(other, DecoderSpec):
            return NotImplemented
        return (
            (self.n_in, self.n_out, self.n_s) == (other.n_in, other.n_out, other.n_s)
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.n_in, self.n_out, self.n_s, self.matrix.tobytes()))


@dataclass(frozen=True)
class InputStream:
    """Decoder input vectors u_1 .. u_{l+n_s}; the first n_s are warm-up zeros."""
    vectors: Tuple[int, ...]
    n_in: int

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vectors, dtype=np.uint64)

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True, eq=False)
class MaskedBlock:
    """N_out data bits with their pruning mask (1 = unpruned)."""
    data: np.ndarray
    mask: np.ndarray
    n_u: int = field(init=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=bool)
        mask = np.asarray(self.mask, dtype=bool)
        if data.shape != mask.shape or data.ndim != 1:
            raise MalformedInputError("Block data and mask must be equal-length vectors")
        object.__setattr__(self, 'data', data)
        object.__setattr__(self, 'mask', mask)
        object.__setattr__(self, 'n_u', int(mask.sum()))

    @property
    def n_out(self) -> int:
        return int(self.data.size)


@dataclass(frozen=True)
class EncodeResult:
    """Encoded stream plus its unmatched-bit counts."""
    stream: InputStream
    total_errors: int
    per_block_errors: Tuple[int, ...]


@dataclass(frozen=True)
class CorrectionConfig:
    """Block-wise correction layout; ``p`` is the correction block length."""
    p: int = 512

    def __post_init__(self):
        if self.p < 2 or self.p & (self.p - 1):
            raise InvalidParameterError(f"Correction block length must be a power of two >= 2, got {self.p}")

    @property
    def position_bits(self) -> int:
        return self.p.bit_length() - 1

    @property
    def n_c(self) -> int:
        """Bits spent per corrected position (marker + position)."""
        return self.position_bits + 1


@dataclass(frozen=True)
class CorrectionStream:
    """Flag bit per p-window plus sorted in-window flip positions per flagged window."""
    plane_length: int
    p: int
    flags: Tuple[bool, ...]
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.flags) != -(-self.plane_length // self.p):
            raise MalformedInputError("Correction flag count does not match the plane length")
        if len(self.entries) != sum(self.flags):
            raise MalformedInputError("One entry list per flagged window is required")

    @property
    def mismatch_count(self) -> int:
        return sum(len(e) for e in self.entries)

    @property
    def bit_length(self) -> int:
        """Flags, (marker + position) per entry, and one terminator per flagged window."""
        n_c = CorrectionConfig(self.p).n_c
        return len(self.flags) + self.mismatch_count * n_c + len(self.entries)


@dataclass(frozen=True)
class PlaneRecord:
    """Everything stored for one bit plane."""
    inverted: bool
    stream: InputStream
    correction: CorrectionStream


@dataclass(frozen=True)
class EncodedArtifact:
    """Serialized container contents; see artifact.py for the byte layout."""
    manifest: TensorManifest
    spec: DecoderSpec
    cfg: CorrectionConfig
    planes: Tuple[PlaneRecord, ...]
    s_observed: float
    efficiency: float
    mask: Optional[PackedBitVector] = None
    mask_reference: Optional[Dict[str, str]] = None

    @property
    def block_count(self) -> int:
        return -(-self.manifest.element_count // self.spec.n_out)


@dataclass(frozen=True)
class PlaneEfficiency:
    """Encoding figures of one bit plane; index 1 is the most significant bit."""
    index: int
    efficiency: float
    matched_bits: int
    unpruned_bits: int
    mismatch_bits: int
    inverted: bool
    zero_ratio: Optional[float]
    footprint_bits: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'index': self.index,
            'E': self.efficiency,
            'matched_bits': self.matched_bits,
            'unpruned_bits': self.unpruned_bits,
            'mismatch_bits': self.mismatch_bits,
            'inverted': self.inverted,
            'zero_ratio': self.zero_ratio,
            'footprint_bits': self.footprint_bits,
        }


@dataclass(frozen=True)
class EfficiencyReport:
    """Encoding efficiency and footprint figures of a compression run."""
    matched_bits: int
    unpruned_bits: int
    efficiency: float
    encoded_bits: int
    correction_bits: int
    mismatch_bits: int
    exact_footprint_bits: int
    original_bits: int
    analytic_memory_save: float
    exact_memory_save: float
    s_observed: float
    n_c: int
    compression_ratio: float
    inverted_planes: int = 0
    per_plane: Tuple[PlaneEfficiency, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'matched_bits': self.matched_bits,
            'unpruned_bits': self.unpruned_bits,
            'E': self.efficiency,
            'encoded_bits': self.encoded_bits,
            'correction_bits': self.correction_bits,
            'mismatch_bits': self.mismatch_bits,
            'exact_footprint_bits': self.exact_footprint_bits,
            'original_bits': self.original_bits,
            'analytic_memory_save': self.analytic_memory_save,
            'exact_memory_save': self.exact_memory_save,
            'S_observed': self.s_observed,
            'n_c': self.n_c,
            'compression_ratio': self.compression_ratio,
            'inverted_planes': self.inverted_planes,
            'per_plane': [plane.to_dict() for plane in self.per_plane],
        }


class BlockEncoder(ABC):
    """Abstract base class for block encoders."""

    name: str = ""

    @abstractmethod
    def supports(self, spec: DecoderSpec) -> bool:
        """Whether this encoder can handle the given decoder."""
        pass

    @abstractmethod
    def encode_blocks(self, spec: DecoderSpec, data: np.ndarray, mask: np.ndarray) -> EncodeResult:
        """
        Find the input stream minimizing unmatched unpruned bits.

        Args:
            spec: Decoder definition
            data: bool array (l, n_out) of block data bits
            mask: bool array (l, n_out), 1 = unpruned

        Returns:
            EncodeResult with l + n_s stream vectors
        """
        pass

    @abstractmethod
    def get_encoder_info(self) -> Dict[str, Any]:
        """Get information about this encoder."""
        pass
