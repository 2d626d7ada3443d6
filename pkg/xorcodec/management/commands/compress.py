"""
Django management command to compress a weight dump into an artifact
Usage: python manage.py compress --weights w.bin --out w.f2fx --n-in 8 --n-s 1
"""

from xorcodec.engine.artifact import save_artifact
from xorcodec.engine.bitplane import group_bitplanes, load_weight_dump
from xorcodec.engine.codec import compress
from xorcodec.engine.config import codec_config_manager
from xorcodec.engine.interfaces import CorrectionConfig
from xorcodec.engine.matrixsearch import CalibrationData

from ._base import CodecCommand, add_encoder_arguments, add_search_arguments, describe_spec, resolve_decoder


class Command(CodecCommand):
    help = 'Compress a pruned weight dump with a fixed-to-fixed XOR-gate decoder'

    def add_arguments(self, parser):
        parser.add_argument('--weights', required=True, help='Raw weight dump')
        parser.add_argument('--manifest', default=None, help='Manifest (default: <weights>.json)')
        parser.add_argument('--out', required=True, help='Artifact to write')
        parser.add_argument('--matrix', default=None, help='Decoder matrix blob; searched if omitted')
        add_search_arguments(parser)
        parser.add_argument('--correction-block', type=int, default=None,
                            help='Correction window length p (power of two)')
        parser.add_argument('--no-invert', action='store_true', help='Disable per-plane inversion')
        parser.add_argument('--mask-storage', choices=['reference', 'verbatim'], default=None)
        add_encoder_arguments(parser)

    def run(self, **options):
        raw, manifest, mask = load_weight_dump(options['weights'], options['manifest'])
        S = 1.0 - mask.popcount() / manifest.element_count

        invert = False if options['no_invert'] else codec_config_manager.get_settings().invert
        calibration = None
        if not options['matrix']:
            planes = group_bitplanes(raw, manifest, mask).planes
            bits = codec_config_manager.get('calibration_bits', options['calibration_bits'])
            calibration = CalibrationData.from_planes(planes, mask, bits, invert)
        decoder = resolve_decoder(options, calibration, S)

        cfg = CorrectionConfig(codec_config_manager.get('correction_block', options['correction_block']))
        artifact, report = compress(
            raw, manifest, mask, decoder['spec'], cfg,
            invert=invert,
            encoder=options['encoder'],
            trellis_cap=options['trellis_cap'],
            workers=options['workers'],
            mask_storage=options['mask_storage'],
            mask_path=manifest.mask_file,
        )
        size = save_artifact(artifact, options['out'])

        return {
            'status': 'ok',
            'artifact': options['out'],
            'artifact_bytes': size,
            'decoder': {**describe_spec(decoder['spec']), 'source': decoder['source'],
                        'calibration_E': decoder['calibration_E']},
            'correction_block': cfg.p,
            'report': report.to_dict(),
            'config': self.provenance(options),
        }
