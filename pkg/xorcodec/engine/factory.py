"""
Encoder factory for creating block encoders.

The factory resolves the configured or requested encoder through the
registry and applies a trellis cap override when one is given.
"""

import logging
from typing import Optional

from .interfaces import BlockEncoder, DecoderSpec
from .registry import encoder_registry

logger = logging.getLogger(__name__)


class EncoderFactory:
    """Factory class for obtaining BlockEncoder instances."""

    @staticmethod
    def create_encoder(
        name: Optional[str],
        spec: DecoderSpec,
        trellis_cap: Optional[int] = None,
    ) -> Optional[BlockEncoder]:
        """
        Create an encoder for a decoder.

        Args:
            name: Encoder name, 'auto', or None for the configured default
            spec: Decoder the encoder will run against
            trellis_cap: Optional cap override for this encoder

        Returns:
            BlockEncoder instance or None if no suitable encoder exists
        """
        try:
            if name is None:
                from .config import codec_config_manager
                name = codec_config_manager.get_settings().encoder

            if not encoder_registry.get_available_encoders():
                from . import initialize_encoders
                initialize_encoders()

            selected = encoder_registry.find_best_encoder(spec, name)
            if not selected:
                logger.error(f"No suitable encoder found for '{name}'")
                return None

            encoder = encoder_registry.get_encoder(selected)
            if trellis_cap is not None and trellis_cap != getattr(encoder, 'trellis_cap', None):
                encoder = type(encoder)(trellis_cap=trellis_cap)

            logger.debug(f"Using encoder '{selected}' for n_in={spec.n_in}, n_s={spec.n_s}")
            return encoder

        except Exception as e:
            logger.error(f"Failed to create encoder '{name}': {str(e)}")
            return None
