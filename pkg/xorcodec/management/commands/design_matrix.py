"""
Django management command to design a decoder matrix by random search
Usage: python manage.py design_matrix --n-in 8 --n-out 80 --n-s 1 --trials 32 --out m.xmtx
"""

import json

from xorcodec.engine.bitplane import group_bitplanes, load_weight_dump
from xorcodec.engine.config import codec_config_manager
from xorcodec.engine.exceptions import InvalidParameterError
from xorcodec.engine.gf2decoder import write_matrix_blob
from xorcodec.engine.matrixsearch import CalibrationData, SearchConfig, select_best

from ._base import CodecCommand, add_encoder_arguments, describe_spec


class Command(CodecCommand):
    help = 'Search random decoder matrices and keep the one with the best calibration efficiency'

    def add_arguments(self, parser):
        parser.add_argument('--n-in', type=int, required=True)
        parser.add_argument('--n-out', type=int, required=True)
        parser.add_argument('--n-s', type=int, default=0)
        parser.add_argument('--trials', type=int, default=None)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--sparsity', type=float, default=0.9,
                            help='Pruning rate of the synthetic calibration mask')
        parser.add_argument('--calibration-bits', type=int, default=None)
        parser.add_argument('--fill-probability', type=float, default=0.5,
                            help='Probability of a 1 in each matrix position')
        parser.add_argument('--weights', default=None,
                            help='Calibrate on a weight dump instead of synthetic data')
        parser.add_argument('--manifest', default=None)
        parser.add_argument('--plane', type=int, default=None,
                            help='Bit plane of the dump to calibrate on (1 = MSB); all planes if omitted')
        parser.add_argument('--out', required=True, help='Matrix blob to write')
        parser.add_argument('--sidecar', default=None, help='JSON sidecar (default: <out>.json)')
        add_encoder_arguments(parser)

    def run(self, **options):
        calibration_bits = codec_config_manager.get('calibration_bits', options['calibration_bits'])
        calibration = None
        if options['weights']:
            raw, manifest, mask = load_weight_dump(options['weights'], options['manifest'])
            planes = group_bitplanes(raw, manifest, mask).planes
            k = options['plane']
            if k is not None:
                if not 1 <= k <= manifest.bit_width:
                    raise InvalidParameterError(f"--plane must be in 1..{manifest.bit_width}, got {k}")
                planes = planes[k - 1:k]
            invert = codec_config_manager.get_settings().invert
            calibration = CalibrationData.from_planes(planes, mask, calibration_bits, invert)

        cfg = SearchConfig.from_settings(
            trials=options['trials'],
            seed=options['seed'],
            calibration=calibration,
            calibration_bits=calibration_bits,
            sparsity=options['sparsity'],
            fill_probability=options['fill_probability'],
            encoder=options['encoder'],
            trellis_cap=options['trellis_cap'],
            workers=options['workers'],
        )
        spec, calibration_e = select_best(cfg, options['n_in'], options['n_out'], options['n_s'])

        size = write_matrix_blob(spec, options['out'])
        sidecar_path = options['sidecar'] or f"{options['out']}.json"
        sidecar = {
            'seed': cfg.seed,
            'trials': cfg.trials,
            'E_calibration': calibration_e,
            **describe_spec(spec),
        }
        with open(sidecar_path, 'w') as f:
            json.dump(sidecar, f, indent=2, sort_keys=True)

        return {
            'status': 'ok',
            'matrix': options['out'],
            'matrix_bytes': size,
            'sidecar': sidecar_path,
            **sidecar,
            'config': self.provenance(options),
        }
