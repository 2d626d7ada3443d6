"""
Engine Utilities Package

Modules:
- bit_utils: bit packing, MSB-first field conversion, bitstream writer/reader
- performance_utils: timing of codec operations
- parallel_utils: ordered process pool
"""

from .bit_utils import (
    BitReader,
    BitWriter,
    bits_to_int,
    int_to_bits,
    pack_bits,
    pack_rows_u64,
    popcount_rows,
    unpack_bits,
)

from .performance_utils import PerformanceTracker, performance_tracker

from .parallel_utils import ordered_map

__all__ = [
    # Bit utilities
    'BitReader',
    'BitWriter',
    'bits_to_int',
    'int_to_bits',
    'pack_bits',
    'pack_rows_u64',
    'popcount_rows',
    'unpack_bits',

    # Performance utilities
    'PerformanceTracker',
    'performance_tracker',

    # Parallel utilities
    'ordered_map',
]
