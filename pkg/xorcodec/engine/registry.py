"""
Encoder registry for managing and discovering block encoders.

The registry maps encoder names to BlockEncoder instances and picks a
suitable encoder for a given decoder.
"""

import logging
from typing import Any, Dict, List, Optional

from .interfaces import BlockEncoder, DecoderSpec, EncoderKind

logger = logging.getLogger(__name__)

AUTO = 'auto'


class EncoderRegistry:
    """
    Registry for block encoders.

    This class implements a singleton pattern so that every pipeline
    resolves encoders from the same catalog.
    """

    _instance = None
    _encoders: Dict[str, BlockEncoder] = {}

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialize()
        return cls._instance

    def _initialize(self):
        self._encoders = {}
        logger.info("Encoder registry initialized")

    def register_encoder(self, name: str, encoder: BlockEncoder) -> bool:
        """
        Register a block encoder.

        Args:
            name: Unique name for the encoder
            encoder: Instance implementing BlockEncoder

        Returns:
            bool: True if registration successful, False otherwise
        """
        if not isinstance(encoder, BlockEncoder):
            logger.error(f"Failed to register encoder '{name}': not a BlockEncoder")
            return False
        if name in self._encoders:
            logger.warning(f"Encoder '{name}' already registered, overwriting")
        self._encoders[name] = encoder
        logger.info(f"Registered encoder '{name}'")
        return True

    def unregister_encoder(self, name: str) -> bool:
        if name not in self._encoders:
            logger.warning(f"Encoder '{name}' not found in registry")
            return False
        del self._encoders[name]
        logger.info(f"Unregistered encoder '{name}'")
        return True

    def get_encoder(self, name: str) -> Optional[BlockEncoder]:
        return self._encoders.get(name)

    def get_available_encoders(self) -> List[str]:
        return list(self._encoders.keys())

    def find_best_encoder(self, spec: DecoderSpec, preference: Optional[str] = None) -> Optional[str]:
        """
        Pick an encoder name for a decoder.

        ``auto`` (or no preference) prefers the per-block search when n_s = 0
        and falls back to the trellis otherwise.

        Args:
            spec: Decoder to encode for
            preference: Encoder name or 'auto'

        Returns:
            Name of the selected encoder or None if none fits
        """
        if preference and preference != AUTO:
            encoder = self._encoders.get(preference)
            if encoder is None:
                logger.warning(f"Encoder '{preference}' is not registered")
                return None
            if not encoder.supports(spec):
                logger.warning(f"Encoder '{preference}' does not support n_s={spec.n_s}")
                return None
            return preference

        order = [EncoderKind.EXHAUSTIVE.value, EncoderKind.TRELLIS.value]
        order += [name for name in self._encoders if name not in order]
        for name in order:
            encoder = self._encoders.get(name)
            if encoder is not None and encoder.supports(spec):
                return name

        logger.warning(f"No registered encoder supports n_s={spec.n_s}")
        return None

    def get_registry_status(self) -> Dict[str, Any]:
        """
        Get overall registry status.

        Returns:
            Dictionary with registry status information
        """
        return {
            'total_encoders': len(self._encoders),
            'encoders': {name: enc.get_encoder_info() for name, enc in self._encoders.items()},
        }

    def clear_registry(self):
        """Clear all registered encoders (mainly for testing)."""
        self._encoders.clear()
        logger.info("Encoder registry cleared")


# Global registry instance
encoder_registry = EncoderRegistry()
