"""
Fixed-to-fixed codec engine.

Compresses bit planes of pruned weight tensors through a sequential
XOR-gate decoder over GF(2), with a trellis encoder, a lossless correction
stream, and the measurement tools around them.

Key Components:
- Interfaces and dataclasses shared by all modules
- Encoder registry and factory
- Configuration management
- Codec pipeline, artifact container, matrix search, sweeps
"""

import logging

from .interfaces import (
    BitPlaneSet,
    BlockEncoder,
    CodecSettings,
    CorrectionConfig,
    CorrectionStream,
    DecoderSpec,
    EfficiencyReport,
    EncodedArtifact,
    EncodeResult,
    EncoderKind,
    InputStream,
    MaskedBlock,
    MaskStorage,
    PackedBitVector,
    PlaneRecord,
    TensorManifest,
)

from .exceptions import (
    CodecError,
    CorruptArtifactError,
    InvalidParameterError,
    MalformedInputError,
    ResourceLimitError,
    UndefinedRatioError,
    VerificationError,
)

from .registry import EncoderRegistry, encoder_registry
from .factory import EncoderFactory
from .config import CodecConfigManager, codec_config_manager

logger = logging.getLogger(__name__)


def initialize_encoders() -> bool:
    """
    Load codec settings and register the built-in encoders.

    Returns:
        bool: True if every encoder was registered
    """
    from .encoders import ExhaustiveEncoder, TrellisEncoder

    try:
        codec_config_manager.load_configs()

        registered = [
            encoder_registry.register_encoder(EncoderKind.EXHAUSTIVE.value, ExhaustiveEncoder()),
            encoder_registry.register_encoder(EncoderKind.TRELLIS.value, TrellisEncoder()),
        ]
        logger.info(f"Encoders available: {encoder_registry.get_available_encoders()}")
        return all(registered)
    except Exception as e:
        logger.error(f"Error initializing encoders: {str(e)}")
        return False


__all__ = [
    # Types
    'BitPlaneSet',
    'BlockEncoder',
    'CodecSettings',
    'CorrectionConfig',
    'CorrectionStream',
    'DecoderSpec',
    'EfficiencyReport',
    'EncodedArtifact',
    'EncodeResult',
    'EncoderKind',
    'InputStream',
    'MaskedBlock',
    'MaskStorage',
    'PackedBitVector',
    'PlaneRecord',
    'TensorManifest',

    # Errors
    'CodecError',
    'CorruptArtifactError',
    'InvalidParameterError',
    'MalformedInputError',
    'ResourceLimitError',
    'UndefinedRatioError',
    'VerificationError',

    # Services
    'EncoderRegistry',
    'EncoderFactory',
    'CodecConfigManager',
    'encoder_registry',
    'codec_config_manager',
    'initialize_encoders',
]
