"""
Trellis (Viterbi-style) encoder for sequential decoders.
"""

from typing import Optional

import numpy as np

from ..encoder import trellis_search
from ..interfaces import DecoderSpec, EncodeResult, EncoderKind
from .base_encoder import BaseBlockEncoder


class TrellisEncoder(BaseBlockEncoder):
    """Globally optimal dynamic program over the last-n_s-inputs state space."""

    def __init__(self, trellis_cap: Optional[int] = None):
        super().__init__(EncoderKind.TRELLIS, trellis_cap)

    def supports(self, spec: DecoderSpec) -> bool:
        return True

    def _search(self, spec: DecoderSpec, data: np.ndarray, mask: np.ndarray) -> EncodeResult:
        return trellis_search(spec, data, mask, self.trellis_cap)
