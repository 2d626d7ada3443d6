"""
Shared plumbing of the codec management commands.

Every command prints one JSON document on stdout (or CSV where noted). A
CodecError or OSError becomes an error document plus a CommandError that
carries the command's exit status.
"""

import json
import logging
import sys
from typing import Any, Dict, Optional

import numpy as np
from django.core.management.base import BaseCommand, CommandError, CommandParser

from xorcodec.engine.config import codec_config_manager
from xorcodec.engine.exceptions import CodecError, InvalidParameterError
from xorcodec.engine.gf2decoder import read_matrix_blob
from xorcodec.engine.interfaces import DecoderSpec
from xorcodec.engine.matrixsearch import CalibrationData, SearchConfig, select_best
from xorcodec.engine.sweep import auto_n_out

logger = logging.getLogger(__name__)

IO_ERROR_EXIT = 3
USAGE_ERROR_EXIT = InvalidParameterError.exit_code

# Options every Django command carries; left out of provenance records
_DJANGO_OPTIONS = {
    'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
    'force_color', 'skip_checks', 'stdout', 'stderr',
}


def json_default(value):
    """Serialize numpy scalars and arrays inside report documents."""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (tuple, set)):
        return list(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def n_out_arg(value: str):
    """argparse type for an n_out that may be 'auto'."""
    if value == 'auto':
        return value
    return int(value)


class CodecCommandParser(CommandParser):
    """Argument errors exit with the invalid-parameter status."""

    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(USAGE_ERROR_EXIT, f"{self.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=USAGE_ERROR_EXIT)


class CodecCommand(BaseCommand):
    """
    Base class of the codec commands.

    Subclasses implement ``run(**options)`` and return the report document,
    or None when they already wrote their own output.
    """

    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.__class__ = CodecCommandParser
        return parser

    def run(self, **options) -> Optional[Dict[str, Any]]:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            document = self.run(**options)
        except CodecError as e:
            logger.error(f"{self.command_name()} failed: {e.message}")
            self.emit(e.to_dict())
            raise CommandError(e.message, returncode=e.exit_code) from e
        except OSError as e:
            self.emit({
                'status': 'error',
                'error': 'io_error',
                'message': str(e),
                'details': {'path': e.filename},
            })
            raise CommandError(str(e), returncode=IO_ERROR_EXIT) from e

        if document is not None:
            self.emit(document)

    def emit(self, document: Dict[str, Any]) -> None:
        self.stdout.write(json.dumps(document, indent=2, sort_keys=True, default=json_default))

    def command_name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    def provenance(self, options: Dict[str, Any]) -> Dict[str, Any]:
        """Command options plus resolved codec settings, for the report."""
        return {
            'command': self.command_name(),
            'options': {k: v for k, v in sorted(options.items()) if k not in _DJANGO_OPTIONS},
            'settings': codec_config_manager.get_manager_status()['settings'],
        }


def add_encoder_arguments(parser):
    parser.add_argument('--encoder', choices=['auto', 'exhaustive', 'trellis'], default=None,
                        help='Block encoder (default: configured encoder)')
    parser.add_argument('--trellis-cap', type=int, default=None,
                        help='Largest n_in*(n_s+1) the trellis may use')
    parser.add_argument('--workers', type=int, default=None,
                        help='Worker processes (default: configured workers)')


def add_search_arguments(parser):
    parser.add_argument('--n-in', type=int, default=None, help='Decoder input width')
    parser.add_argument('--n-out', type=n_out_arg, default='auto',
                        help="Decoder output width, or 'auto' for floor(n_in/(1-S))")
    parser.add_argument('--n-s', type=int, default=0, help='Shift-register depth')
    parser.add_argument('--trials', type=int, default=None, help='Random matrices to try')
    parser.add_argument('--seed', type=int, default=0, help='Matrix search seed')
    parser.add_argument('--calibration-bits', type=int, default=None,
                        help='Bits of calibration data per trial')


def resolve_decoder(
    options: Dict[str, Any],
    calibration: CalibrationData,
    S: float,
) -> Dict[str, Any]:
    """
    Load ``--matrix`` or search a decoder on the given calibration data.

    Returns:
        {'spec': DecoderSpec, 'calibration_E': float or None, 'source': str}
    """
    if options.get('matrix'):
        spec = read_matrix_blob(options['matrix'])
        return {'spec': spec, 'calibration_E': None, 'source': options['matrix']}

    n_in = options.get('n_in')
    if not n_in:
        raise InvalidParameterError("Either --matrix or --n-in is required")
    n_out = options.get('n_out', 'auto')
    if n_out == 'auto':
        if not 0.0 <= S < 1.0:
            raise InvalidParameterError(f"Cannot derive n_out at pruning rate {S}; pass --n-out")
        n_out = auto_n_out(n_in, S)

    cfg = SearchConfig.from_settings(
        trials=options.get('trials'),
        seed=options.get('seed', 0),
        calibration=calibration,
        encoder=options.get('encoder'),
        trellis_cap=options.get('trellis_cap'),
        workers=options.get('workers'),
    )
    spec, calibration_e = select_best(cfg, n_in, n_out, options.get('n_s', 0))
    return {'spec': spec, 'calibration_E': calibration_e, 'source': 'search'}


def describe_spec(spec: DecoderSpec) -> Dict[str, Any]:
    return {
        'n_in': spec.n_in,
        'n_out': spec.n_out,
        'n_s': spec.n_s,
        'compression_ratio': spec.compression_ratio,
    }
