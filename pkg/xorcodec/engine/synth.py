"""
Synthetic data and sparsity statistics.

All generators draw from numpy's PCG64 seeded through SeedSequence; the
optional ``key`` spawns an independent stream for the same seed so that
related experiments (data, mask, calibration, trials) never share draws.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .exceptions import InvalidParameterError
from .interfaces import PackedBitVector

logger = logging.getLogger(__name__)


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for ``seed`` split along the integer ``key`` path."""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(sequence))


def gen_random_plane(length: int, seed: int, key: Sequence[int] = ()) -> PackedBitVector:
    """Uniformly random bits."""
    rng = derive_rng(seed, *key)
    return PackedBitVector.from_bits(rng.integers(0, 2, size=length, dtype=np.uint8).astype(bool))


def gen_biased_plane(length: int, zero_ratio: float, seed: int, key: Sequence[int] = ()) -> PackedBitVector:
    """Random bits that are 0 with probability ``zero_ratio``."""
    if not 0.0 <= zero_ratio <= 1.0:
        raise InvalidParameterError(f"zero_ratio must be in [0, 1], got {zero_ratio}")
    rng = derive_rng(seed, *key)
    return PackedBitVector.from_bits(rng.random(length) >= zero_ratio)


def gen_bernoulli_mask(length: int, S: float, seed: int, key: Sequence[int] = ()) -> PackedBitVector:
    """Each position pruned (0) independently with probability S."""
    if not 0.0 <= S < 1.0:
        raise InvalidParameterError(f"Pruning rate must be in [0, 1), got {S}")
    rng = derive_rng(seed, *key)
    return PackedBitVector.from_bits(rng.random(length) >= S)


def gen_fixed_nu_mask(length: int, n_out: int, n_u: int, seed: int, key: Sequence[int] = ()) -> PackedBitVector:
    """
    Mask with exactly n_u unpruned positions in every n_out block.

    A trailing partial block keeps the positions of a full block that fall
    inside it.
    """
    if n_out <= 0 or not 0 <= n_u <= n_out:
        raise InvalidParameterError(f"Need 0 <= n_u <= n_out and n_out > 0, got n_u={n_u}, n_out={n_out}")
    rng = derive_rng(seed, *key)
    blocks = -(-length // n_out)
    ranks = np.argsort(rng.random((blocks, n_out)), axis=1)
    return PackedBitVector.from_bits((ranks < n_u).ravel()[:length])


def gen_weights(element_count: int, bit_width: int, seed: int, key: Sequence[int] = ()) -> np.ndarray:
    """Uniformly random unsigned values of ``bit_width`` bits."""
    if not 1 <= bit_width <= 64:
        raise InvalidParameterError(f"bit_width must be in 1..64, got {bit_width}")
    rng = derive_rng(seed, *key)
    values = rng.integers(0, np.iinfo(np.uint64).max, size=element_count, dtype=np.uint64, endpoint=True)
    if bit_width < 64:
        values &= np.uint64((1 << bit_width) - 1)
    return values


@dataclass(frozen=True, eq=False)
class SparsityProfile:
    """Per-block unpruned-count statistics of a mask."""
    n_out: int
    samples: np.ndarray = field(repr=False)
    mean: float
    variance: float
    coefficient_of_variation: Optional[float]
    S: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_out': self.n_out,
            'blocks': int(self.samples.size),
            'mean': self.mean,
            'variance': self.variance,
            'cv': self.coefficient_of_variation,
            'S': self.S,
        }


def block_nu_stats(mask: PackedBitVector, n_out: int, S: Optional[float] = None) -> SparsityProfile:
    """
    Empirical mean, variance and CV of n_u over full n_out blocks.

    The trailing partial block is excluded.
    """
    if n_out < 1:
        raise InvalidParameterError(f"n_out must be positive, got {n_out}")
    blocks = mask.length // n_out
    samples = mask.to_bits()[:blocks * n_out].reshape(blocks, n_out).sum(axis=1)
    if blocks == 0:
        return SparsityProfile(n_out, samples, 0.0, 0.0, None, S)
    mean = float(samples.mean())
    variance = float(samples.var())
    cv = math.sqrt(variance) / mean if mean > 0 else None
    return SparsityProfile(n_out, samples, mean, variance, cv, S)


def theoretical_block_stats(n_out: int, S: float) -> Dict[str, float]:
    """Moments of n_u ~ B(n_out, 1-S)."""
    if n_out < 1 or not 0.0 <= S < 1.0:
        raise InvalidParameterError(f"Need n_out >= 1 and 0 <= S < 1, got n_out={n_out}, S={S}")
    mean = n_out * (1.0 - S)
    variance = n_out * S * (1.0 - S)
    return {'mean': mean, 'variance': variance, 'cv': math.sqrt(S / (n_out * (1.0 - S)))}


def csr_row_cv(n: int, S: float) -> float:
    """Coefficient of variation of the unpruned count of a CSR row of length n."""
    if n < 1:
        raise InvalidParameterError(f"Row length must be positive, got {n}")
    if not 0.0 < S < 1.0:
        raise InvalidParameterError(f"Pruning rate must be in (0, 1), got {S}")
    return math.sqrt(S / (1.0 - S)) / math.sqrt(n)
