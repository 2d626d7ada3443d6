"""
Base block encoder implementation.

This module provides the shared bookkeeping of the concrete encoders:
input validation, run statistics and timing.
"""

import logging
import time
from typing import Any, Dict, Optional

import numpy as np

from ..interfaces import BlockEncoder, DecoderSpec, EncodeResult, EncoderKind
from ..utils.performance_utils import performance_tracker

logger = logging.getLogger(__name__)


class BaseBlockEncoder(BlockEncoder):
    """
    Base implementation for block encoders.

    Subclasses implement ``supports`` and ``_search``; ``encode_blocks``
    wraps the search with timing and run counters.
    """

    def __init__(self, kind: EncoderKind, trellis_cap: Optional[int] = None):
        self.kind = kind
        self.name = kind.value
        self.trellis_cap = trellis_cap
        self._runs = 0
        self._blocks_encoded = 0
        self._errors_total = 0

    def _search(self, spec: DecoderSpec, data: np.ndarray, mask: np.ndarray) -> EncodeResult:
        raise NotImplementedError

    def encode_blocks(self, spec: DecoderSpec, data: np.ndarray, mask: np.ndarray) -> EncodeResult:
        start = time.perf_counter()
        result = self._search(spec, data, mask)
        duration = time.perf_counter() - start

        self._runs += 1
        self._blocks_encoded += len(result.per_block_errors)
        self._errors_total += result.total_errors
        performance_tracker.track_operation(
            f"encode_{self.name}", duration, len(result.per_block_errors) * spec.n_out
        )
        logger.debug(
            f"Encode - Encoder: {self.name}, Blocks: {len(result.per_block_errors)}, "
            f"Errors: {result.total_errors}, Duration: {duration:.2f}s"
        )
        return result

    def get_encoder_info(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'runs': self._runs,
            'blocks_encoded': self._blocks_encoded,
            'unmatched_bits': self._errors_total,
            'trellis_cap': self.trellis_cap,
        }
