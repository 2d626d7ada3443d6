"""
Decoder matrix design by random sampling.

Candidate matrices are filled with independent fair bits; each candidate
encodes the same calibration data and the one with the highest encoding
efficiency wins.
"""

import logging
from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bitplane import maybe_invert
from .config import codec_config_manager
from .encoder import encode_plane
from .exceptions import InvalidParameterError, MalformedInputError
from .gf2decoder import check_trellis_cap
from .interfaces import DecoderSpec, PackedBitVector
from .synth import derive_rng, gen_bernoulli_mask, gen_random_plane
from .utils.parallel_utils import ordered_map

logger = logging.getLogger(__name__)

# Independent spawn-key namespaces under one search seed
TRIAL_STREAM = 0
CALIBRATION_DATA_STREAM = 1
CALIBRATION_MASK_STREAM = 2


@dataclass(frozen=True)
class CalibrationData:
    """Plane and mask the candidates are scored on."""
    plane: PackedBitVector
    mask: PackedBitVector

    def __post_init__(self):
        if self.plane.length != self.mask.length:
            raise MalformedInputError("Calibration plane and mask lengths differ")

    @classmethod
    def synthetic(cls, length: int, S: float, seed: int) -> 'CalibrationData':
        """Random plane with a Bernoulli(S) pruning mask."""
        return cls(
            gen_random_plane(length, seed, (CALIBRATION_DATA_STREAM,)),
            gen_bernoulli_mask(length, S, seed, (CALIBRATION_MASK_STREAM,)),
        )

    @classmethod
    def from_planes(
        cls,
        planes: Sequence[PackedBitVector],
        mask: PackedBitVector,
        length: int,
        invert: bool = True,
    ) -> 'CalibrationData':
        """
        Equal leading shares of every plane, each as it will be encoded.

        With ``invert`` each plane first goes through maybe_invert, as it does
        during compression.
        """
        if not planes:
            raise MalformedInputError("No planes to calibrate on")
        share = min(-(-length // len(planes)), mask.length)
        live = mask.to_bits()[:share]
        data, masks = [], []
        for plane in planes:
            if invert and mask.popcount():
                plane, _ = maybe_invert(plane, mask)
            data.append(plane.to_bits()[:share])
            masks.append(live)
        return cls(
            PackedBitVector.from_bits(np.concatenate(data)[:length]),
            PackedBitVector.from_bits(np.concatenate(masks)[:length]),
        )


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one matrix search."""
    trials: int = 32
    seed: int = 0
    calibration: Optional[CalibrationData] = None
    calibration_bits: int = 50_000
    sparsity: float = 0.9
    fill_probability: float = 0.5
    encoder: Optional[str] = None
    trellis_cap: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameterError(f"trials must be >= 1, got {self.trials}")
        if not 0.0 <= self.fill_probability <= 1.0:
            raise InvalidParameterError(f"fill_probability must be in [0, 1], got {self.fill_probability}")

    @classmethod
    def from_settings(cls, **overrides) -> 'SearchConfig':
        """Defaults from the configured codec settings, then explicit overrides."""
        settings = codec_config_manager.get_settings()
        values = {
            'trials': settings.search_trials,
            'calibration_bits': settings.calibration_bits,
            'encoder': settings.encoder,
            'trellis_cap': settings.trellis_cap,
            'workers': settings.workers,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def resolve_calibration(self) -> CalibrationData:
        if self.calibration is not None:
            return self.calibration
        return CalibrationData.synthetic(self.calibration_bits, self.sparsity, self.seed)


def sample_matrix(
    n_in: int,
    n_out: int,
    n_s: int,
    rng: np.random.Generator,
    fill_probability: float = 0.5,
) -> DecoderSpec:
    """Draw a decoder whose matrix bits are independent Bernoulli(fill_probability)."""
    if n_in <= 0 or n_out <= 0 or n_s < 0:
        raise InvalidParameterError(f"Invalid decoder dimensions n_in={n_in}, n_out={n_out}, n_s={n_s}")
    matrix = rng.random((n_out, n_in * (n_s + 1))) < fill_probability
    return DecoderSpec(n_in, n_out, n_s, matrix)


def calibration_efficiency(spec: DecoderSpec, calibration: CalibrationData, encoder=None, trellis_cap=None) -> float:
    """Encoding efficiency (percent) of a decoder on the calibration data."""
    unpruned = calibration.mask.popcount()
    if unpruned == 0:
        return 100.0
    result = encode_plane(spec, calibration.plane, calibration.mask, encoder=encoder, trellis_cap=trellis_cap)
    return 100.0 * (unpruned - result.total_errors) / unpruned


def _run_trial(trial: int, cfg: SearchConfig, calibration: CalibrationData, n_in: int, n_out: int, n_s: int):
    rng = derive_rng(cfg.seed, TRIAL_STREAM, trial)
    spec = sample_matrix(n_in, n_out, n_s, rng, cfg.fill_probability)
    efficiency = calibration_efficiency(spec, calibration, cfg.encoder, cfg.trellis_cap)
    logger.debug(f"Matrix trial {trial}: E={efficiency:.3f}%")
    return spec, efficiency


def search_matrices(cfg: SearchConfig, n_in: int, n_out: int, n_s: int) -> List[Tuple[DecoderSpec, float]]:
    """
    Score every trial matrix.

    Returns:
        (spec, E) per trial in trial order
    """
    check_trellis_cap(DecoderSpec(n_in, n_out, n_s, np.zeros((n_out, n_in * (n_s + 1)))), cfg.trellis_cap)
    calibration = cfg.resolve_calibration()
    job = partial(_run_trial, cfg=cfg, calibration=calibration, n_in=n_in, n_out=n_out, n_s=n_s)
    return ordered_map(job, range(cfg.trials), cfg.workers)


def select_best(cfg: SearchConfig, n_in: int, n_out: int, n_s: int) -> Tuple[DecoderSpec, float]:
    """
    Pick the trial matrix with the highest calibration efficiency.

    Ties go to the earliest trial.

    Returns:
        (DecoderSpec, E_calibration in percent)
    """
    logger.info(
        f"Searching {cfg.trials} matrices for n_in={n_in}, n_out={n_out}, n_s={n_s} (seed={cfg.seed})"
    )
    trials = search_matrices(cfg, n_in, n_out, n_s)
    best_spec, best_e = trials[0]
    for spec, efficiency in trials[1:]:
        if efficiency > best_e:
            best_spec, best_e = spec, efficiency
    logger.info(f"Selected matrix with calibration E={best_e:.3f}%")
    return best_spec, best_e
