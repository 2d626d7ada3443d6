"""
Django management command to report sparsity statistics of a weight dump
Usage: python manage.py stats --weights w.bin --n-out 80
"""

from xorcodec.engine.bitplane import group_bitplanes, load_weight_dump, plane_zero_ratios
from xorcodec.engine.synth import block_nu_stats, csr_row_cv, theoretical_block_stats

from ._base import CodecCommand


class Command(CodecCommand):
    help = 'Per-block unpruned counts, per-plane zero ratios and CSR row irregularity of a dump'

    def add_arguments(self, parser):
        parser.add_argument('--weights', required=True)
        parser.add_argument('--manifest', default=None)
        parser.add_argument('--n-out', type=int, nargs='+', default=[80],
                            help='Block lengths to profile')

    def run(self, **options):
        raw, manifest, mask = load_weight_dump(options['weights'], options['manifest'])
        plane_set = group_bitplanes(raw, manifest, mask)
        S = 1.0 - mask.popcount() / manifest.element_count

        blocks = []
        for n_out in options['n_out']:
            entry = {'empirical': block_nu_stats(mask, n_out, S).to_dict()}
            if S < 1.0:
                entry['theoretical'] = theoretical_block_stats(n_out, S)
            blocks.append(entry)

        row_length = manifest.shape[-1]
        return {
            'status': 'ok',
            'weights': options['weights'],
            'shape': list(manifest.shape),
            'bit_width': manifest.bit_width,
            'S_observed': S,
            'plane_zero_ratios': plane_zero_ratios(plane_set),
            'blocks': blocks,
            'csr_row_length': row_length,
            'csr_row_cv': csr_row_cv(row_length, S) if 0.0 < S < 1.0 else None,
            'config': self.provenance(options),
        }
