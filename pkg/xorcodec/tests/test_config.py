"""
Tests for codec settings, the encoder registry and the encoder factory.
"""

import json
import os
import tempfile
from unittest.mock import patch

import numpy as np
import pytest
from django.test import SimpleTestCase

from ..engine import initialize_encoders
from ..engine.config import CodecConfigManager, codec_config_manager
from ..engine.encoders import ExhaustiveEncoder, TrellisEncoder
from ..engine.exceptions import InvalidParameterError
from ..engine.factory import EncoderFactory
from ..engine.interfaces import DecoderSpec
from ..engine.registry import EncoderRegistry, encoder_registry


def zero_spec(n_in=4, n_out=8, n_s=0):
    return DecoderSpec(n_in, n_out, n_s, np.zeros((n_out, n_in * (n_s + 1))))


@pytest.mark.unit
class CodecConfigManagerTest(SimpleTestCase):
    """Test settings resolution."""

    def tearDown(self):
        codec_config_manager.reset()

    def test_django_settings_applied(self):
        cfg = codec_config_manager.get_settings()

        self.assertEqual(cfg.search_trials, 4)
        self.assertEqual(cfg.calibration_bits, 4_000)
        self.assertEqual(cfg.trellis_cap, 26)
        self.assertIn('django_settings', codec_config_manager.get_manager_status()['sources'])

    def test_environment_overrides_settings(self):
        with patch.dict(os.environ, {'XORCODEC_CORRECTION_BLOCK': '64', 'XORCODEC_INVERT': 'false'}):
            manager = CodecConfigManager()

        self.assertEqual(manager.get_settings().correction_block, 64)
        self.assertFalse(manager.get_settings().invert)
        self.assertEqual(manager.get_manager_status()['sources'][-1], 'environment')

    def test_invalid_environment_is_skipped(self):
        with patch.dict(os.environ, {'XORCODEC_CORRECTION_BLOCK': '100'}):
            manager = CodecConfigManager()

        self.assertEqual(manager.get_settings().correction_block, 512)
        self.assertNotIn('environment', manager.get_manager_status()['sources'])

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'codec.json')
            with open(path, 'w') as f:
                json.dump({'search_trials': 7, 'mask_storage': 'verbatim'}, f)
            with patch.dict(os.environ, {'XORCODEC_CONFIG_FILE': path}):
                manager = CodecConfigManager()

        self.assertEqual(manager.get_settings().search_trials, 7)
        self.assertEqual(manager.get_settings().mask_storage, 'verbatim')

    def test_get_prefers_explicit_value(self):
        self.assertEqual(codec_config_manager.get('trellis_cap', 5), 5)
        self.assertEqual(codec_config_manager.get('trellis_cap'), 26)

    def test_override_and_reset(self):
        codec_config_manager.set_override(trellis_cap=20)
        self.assertEqual(codec_config_manager.get('trellis_cap'), 20)
        self.assertEqual(codec_config_manager.get_manager_status()['overrides'], ['trellis_cap'])

        codec_config_manager.reset()
        self.assertEqual(codec_config_manager.get('trellis_cap'), 26)

    def test_invalid_override_rejected(self):
        with self.assertRaises(InvalidParameterError):
            codec_config_manager.set_override(correction_block=3)
        with self.assertRaises(InvalidParameterError):
            codec_config_manager.set_override(encoder='greedy')
        with self.assertRaises(InvalidParameterError):
            codec_config_manager.set_override(colour='blue')
        self.assertEqual(codec_config_manager.get('correction_block'), 512)


@pytest.mark.unit
class EncoderRegistryTest(SimpleTestCase):
    """Test the encoder registry functionality."""

    def setUp(self):
        encoder_registry.clear_registry()

    def tearDown(self):
        encoder_registry.clear_registry()
        initialize_encoders()

    def test_singleton(self):
        self.assertIs(EncoderRegistry(), encoder_registry)

    def test_register_encoder(self):
        self.assertTrue(encoder_registry.register_encoder('trellis', TrellisEncoder()))
        self.assertIn('trellis', encoder_registry.get_available_encoders())

    def test_register_rejects_non_encoder(self):
        self.assertFalse(encoder_registry.register_encoder('bogus', object()))

    def test_unregister(self):
        encoder_registry.register_encoder('trellis', TrellisEncoder())

        self.assertTrue(encoder_registry.unregister_encoder('trellis'))
        self.assertFalse(encoder_registry.unregister_encoder('trellis'))

    def test_auto_prefers_exhaustive_without_shift_register(self):
        encoder_registry.register_encoder('trellis', TrellisEncoder())
        encoder_registry.register_encoder('exhaustive', ExhaustiveEncoder())

        self.assertEqual(encoder_registry.find_best_encoder(zero_spec(n_s=0)), 'exhaustive')
        self.assertEqual(encoder_registry.find_best_encoder(zero_spec(n_s=1), 'auto'), 'trellis')

    def test_explicit_preference(self):
        encoder_registry.register_encoder('trellis', TrellisEncoder())
        encoder_registry.register_encoder('exhaustive', ExhaustiveEncoder())

        self.assertEqual(encoder_registry.find_best_encoder(zero_spec(), 'trellis'), 'trellis')
        self.assertIsNone(encoder_registry.find_best_encoder(zero_spec(n_s=1), 'exhaustive'))
        self.assertIsNone(encoder_registry.find_best_encoder(zero_spec(), 'missing'))

    def test_registry_status(self):
        encoder_registry.register_encoder('trellis', TrellisEncoder())
        status = encoder_registry.get_registry_status()

        self.assertEqual(status['total_encoders'], 1)
        self.assertEqual(status['encoders']['trellis']['runs'], 0)


@pytest.mark.unit
class EncoderFactoryTest(SimpleTestCase):
    """Test encoder creation."""

    def tearDown(self):
        codec_config_manager.reset()
        initialize_encoders()

    def test_initialize_encoders(self):
        encoder_registry.clear_registry()

        self.assertTrue(initialize_encoders())
        self.assertEqual(sorted(encoder_registry.get_available_encoders()), ['exhaustive', 'trellis'])

    def test_default_encoder(self):
        self.assertIsInstance(EncoderFactory.create_encoder(None, zero_spec()), ExhaustiveEncoder)
        self.assertIsInstance(EncoderFactory.create_encoder(None, zero_spec(n_s=2)), TrellisEncoder)

    def test_configured_encoder(self):
        codec_config_manager.set_override(encoder='trellis')
        self.assertIsInstance(EncoderFactory.create_encoder(None, zero_spec()), TrellisEncoder)

    def test_cap_override_gives_fresh_instance(self):
        encoder = EncoderFactory.create_encoder('trellis', zero_spec(), trellis_cap=12)

        self.assertEqual(encoder.trellis_cap, 12)
        self.assertIsNot(encoder, encoder_registry.get_encoder('trellis'))

    def test_empty_registry_reinitialized(self):
        encoder_registry.clear_registry()
        self.assertIsInstance(EncoderFactory.create_encoder('auto', zero_spec()), ExhaustiveEncoder)

    def test_unsupported_returns_none(self):
        self.assertIsNone(EncoderFactory.create_encoder('exhaustive', zero_spec(n_s=1)))
