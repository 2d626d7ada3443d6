"""
Per-block exhaustive encoder for non-sequential decoders.
"""

from typing import Optional

import numpy as np

from ..encoder import exhaustive_search
from ..interfaces import DecoderSpec, EncodeResult, EncoderKind
from .base_encoder import BaseBlockEncoder


class ExhaustiveEncoder(BaseBlockEncoder):
    """Searches all 2**n_in inputs for every block independently (n_s = 0)."""

    def __init__(self, trellis_cap: Optional[int] = None):
        super().__init__(EncoderKind.EXHAUSTIVE, trellis_cap)

    def supports(self, spec: DecoderSpec) -> bool:
        return spec.n_s == 0

    def _search(self, spec: DecoderSpec, data: np.ndarray, mask: np.ndarray) -> EncodeResult:
        return exhaustive_search(spec, data, mask)
