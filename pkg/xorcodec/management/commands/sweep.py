"""
Django management command to run an efficiency / memory-save sweep
Usage: python manage.py sweep --sparsities 0.9 --n-in 8 --n-out 40 80 120 --n-s 2 --out sweep.csv
"""

from xorcodec.engine.config import codec_config_manager
from xorcodec.engine.sweep import SweepSpec, run_sweep, write_csv, write_svg

from ._base import CodecCommand, add_encoder_arguments, n_out_arg


def _zero_ratio_arg(value: str):
    if value in ('none', 'uniform'):
        return None
    return float(value)


class Command(CodecCommand):
    help = 'Sweep pruning rate and decoder geometry on synthetic data, one CSV row per cell'

    def add_arguments(self, parser):
        parser.add_argument('--sparsities', type=float, nargs='+', required=True)
        parser.add_argument('--n-in', type=int, nargs='+', required=True)
        parser.add_argument('--n-out', type=n_out_arg, nargs='+', default=['auto'])
        parser.add_argument('--n-s', type=int, nargs='+', default=[0])
        parser.add_argument('--zero-ratios', type=_zero_ratio_arg, nargs='+', default=[None],
                            help="Plane zero ratios; 'none' for uniform bits")
        parser.add_argument('--mask-models', choices=['bernoulli', 'fixed'], nargs='+', default=['bernoulli'])
        parser.add_argument('--length', type=int, default=100_000, help='Bits of data per cell')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--trials', type=int, default=None)
        parser.add_argument('--calibration-bits', type=int, default=None)
        parser.add_argument('--correction-block', type=int, default=None)
        parser.add_argument('--no-invert', action='store_true')
        parser.add_argument('--out', default=None, help='CSV file (default: CSV on stdout)')
        parser.add_argument('--svg', default=None, help='Optional plot of E and memory save')
        parser.add_argument('--no-wall-time', action='store_true',
                            help='Leave out the timing column for byte-stable CSV')
        add_encoder_arguments(parser)

    def run(self, **options):
        settings = codec_config_manager.get_settings()
        spec = SweepSpec(
            sparsities=tuple(options['sparsities']),
            n_ins=tuple(options['n_in']),
            n_outs=tuple(options['n_out']),
            n_ss=tuple(options['n_s']),
            length=options['length'],
            seed=options['seed'],
            trials=codec_config_manager.get('search_trials', options['trials']),
            calibration_bits=codec_config_manager.get('calibration_bits', options['calibration_bits']),
            zero_ratios=tuple(options['zero_ratios']),
            mask_models=tuple(options['mask_models']),
            correction_block=codec_config_manager.get('correction_block', options['correction_block']),
            invert=settings.invert and not options['no_invert'],
            encoder=options['encoder'],
            trellis_cap=options['trellis_cap'],
            workers=codec_config_manager.get('workers', options['workers']),
        )
        rows = run_sweep(spec)
        text = write_csv(rows, options['out'], include_wall_time=not options['no_wall_time'])
        if options['svg']:
            write_svg(rows, options['svg'])

        if not options['out']:
            self.stdout.write(text, ending='')
            return None
        return {
            'status': 'ok',
            'csv': options['out'],
            'svg': options['svg'],
            'cells': len(rows),
            'failed_cells': sum(1 for r in rows if r['status'] != 'ok'),
            'config': self.provenance(options),
        }
