"""
Configuration management for the codec.

This module resolves the runtime CodecSettings from built-in defaults,
Django settings, environment variables and an optional JSON file.
"""

import os
import json
import logging
from dataclasses import asdict, fields, replace
from typing import Any, Dict, Optional

from django.conf import settings

from .exceptions import InvalidParameterError
from .interfaces import CodecSettings, EncoderKind, MaskStorage

logger = logging.getLogger(__name__)

ENV_PREFIX = 'XORCODEC_'
AUTO_ENCODER = 'auto'


def validate_settings(values: CodecSettings) -> CodecSettings:
    """
    Check value ranges of resolved settings.

    Raises:
        InvalidParameterError: if any value is out of range
    """
    if values.trellis_cap <= 0:
        raise InvalidParameterError(f"trellis_cap must be positive, got {values.trellis_cap}")
    p = values.correction_block
    if p < 2 or p & (p - 1):
        raise InvalidParameterError(f"correction_block must be a power of two >= 2, got {p}")
    if values.search_trials <= 0:
        raise InvalidParameterError(f"search_trials must be positive, got {values.search_trials}")
    if values.calibration_bits <= 0:
        raise InvalidParameterError(f"calibration_bits must be positive, got {values.calibration_bits}")
    if values.workers <= 0:
        raise InvalidParameterError(f"workers must be positive, got {values.workers}")
    known_encoders = {kind.value for kind in EncoderKind} | {AUTO_ENCODER}
    if values.encoder not in known_encoders:
        raise InvalidParameterError(
            f"Unknown encoder '{values.encoder}'", {'known': sorted(known_encoders)}
        )
    if values.mask_storage not in {m.value for m in MaskStorage}:
        raise InvalidParameterError(f"Unknown mask_storage '{values.mask_storage}'")
    return values


class CodecConfigManager:
    """
    Manager for codec settings.

    Sources are applied in order (later wins): defaults, Django
    ``settings.XORCODEC``, ``XORCODEC_*`` environment variables, the JSON
    file named by ``XORCODEC_CONFIG_FILE``, then programmatic overrides.
    """

    def __init__(self):
        self._settings = CodecSettings()
        self._sources = []
        self._overrides: Dict[str, Any] = {}
        self._load_default_configs()

    def load_configs(self):
        """Public method to reload configurations."""
        self._load_default_configs()

    def _load_default_configs(self):
        self._settings = CodecSettings()
        self._sources = ['defaults']

        if hasattr(settings, 'XORCODEC'):
            self._load_from_django_settings()

        self._load_from_environment()

        config_file = os.getenv('XORCODEC_CONFIG_FILE') or getattr(settings, 'XORCODEC_CONFIG_FILE', None)
        if config_file and os.path.exists(config_file):
            self._load_from_file(config_file)

        if self._overrides:
            self._apply('overrides', self._overrides)

    def _apply(self, source: str, values: Dict[str, Any]) -> bool:
        """Merge one source; an invalid source is logged and skipped."""
        try:
            candidate = replace(self._settings, **self._coerce(values))
            self._settings = validate_settings(candidate)
            self._sources.append(source)
            logger.info(f"Loaded codec settings from {source}")
            return True
        except Exception as e:
            logger.error(f"Error loading codec settings from {source}: {str(e)}")
            return False

    def _load_from_django_settings(self):
        """Load configuration from Django settings."""
        self._apply('django_settings', dict(settings.XORCODEC))

    def _load_from_environment(self):
        """Load configuration from environment variables."""
        values = {}
        for f in fields(CodecSettings):
            raw = os.getenv(f"{ENV_PREFIX}{f.name.upper()}")
            if raw is not None:
                values[f.name] = raw
        if values:
            self._apply('environment', values)

    def _load_from_file(self, config_file: str):
        """Load configuration from a JSON file."""
        try:
            with open(config_file, 'r') as f:
                file_config = json.load(f)
        except Exception as e:
            logger.error(f"Error loading codec settings from file '{config_file}': {str(e)}")
            return
        self._apply(f"file:{config_file}", file_config)

    @staticmethod
    def _coerce(values: Dict[str, Any]) -> Dict[str, Any]:
        """Convert raw values (strings from env or JSON) to field types."""
        known = {f.name: f for f in fields(CodecSettings)}
        unknown = set(values) - set(known)
        if unknown:
            raise InvalidParameterError(f"Unknown codec settings: {sorted(unknown)}")

        coerced = {}
        for name, raw in values.items():
            default = getattr(CodecSettings(), name)
            if isinstance(default, bool):
                if isinstance(raw, str):
                    coerced[name] = raw.strip().lower() in ('1', 'true', 'yes', 'on')
                else:
                    coerced[name] = bool(raw)
            elif isinstance(default, int):
                coerced[name] = int(raw)
            else:
                coerced[name] = str(raw)
        return coerced

    def get_settings(self) -> CodecSettings:
        """
        Get the resolved settings.

        Returns:
            CodecSettings
        """
        return self._settings

    def get(self, name: str, value: Optional[Any] = None) -> Any:
        """Return ``value`` unless it is None, else the configured setting."""
        if value is not None:
            return value
        return getattr(self._settings, name)

    def set_override(self, **values):
        """
        Override settings programmatically.

        Raises:
            InvalidParameterError: if the merged settings are invalid
        """
        candidate = validate_settings(replace(self._settings, **self._coerce(values)))
        self._overrides.update(values)
        self._settings = candidate
        logger.info(f"Codec settings overridden: {sorted(values)}")

    def reset(self):
        """Drop overrides and reload every source."""
        self._overrides = {}
        self._load_default_configs()

    def get_manager_status(self) -> Dict[str, Any]:
        """
        Get configuration manager status.

        Returns:
            Dictionary with status information
        """
        return {
            'sources': list(self._sources),
            'overrides': sorted(self._overrides),
            'settings': asdict(self._settings),
        }


# Global configuration manager instance
codec_config_manager = CodecConfigManager()
