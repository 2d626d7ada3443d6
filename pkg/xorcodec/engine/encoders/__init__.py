"""
Block Encoders Package

Implementations of the BlockEncoder interface:
- ExhaustiveEncoder: independent per-block search, n_s = 0 only
- TrellisEncoder: dynamic program over the shift-register trellis, any n_s
"""

from .base_encoder import BaseBlockEncoder
from .exhaustive_encoder import ExhaustiveEncoder
from .trellis_encoder import TrellisEncoder

__all__ = [
    'BaseBlockEncoder',
    'ExhaustiveEncoder',
    'TrellisEncoder',
]
