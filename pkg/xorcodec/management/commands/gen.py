"""
Django management command to generate a synthetic pruned weight dump
Usage: python manage.py gen --out weights.bin --bits 1000000 --sparsity 0.9 --seed 1
"""

import numpy as np

from xorcodec.engine.bitplane import save_weight_dump, values_to_raw
from xorcodec.engine.exceptions import InvalidParameterError
from xorcodec.engine.interfaces import TensorManifest
from xorcodec.engine.synth import gen_bernoulli_mask, gen_biased_plane, gen_fixed_nu_mask, gen_weights

from ._base import CodecCommand

# Spawn-key namespaces of the generator seed
WEIGHT_STREAM = 20
MASK_STREAM = 21


class Command(CodecCommand):
    help = 'Generate random weights with a random pruning mask in the weight dump format'

    def add_arguments(self, parser):
        parser.add_argument('--out', required=True, help='Raw weight file to write')
        parser.add_argument('--manifest', default=None, help='Manifest path (default: <out>.json)')
        parser.add_argument('--mask-out', default=None, help='Mask path (default: <out>.mask)')
        parser.add_argument('--bits', type=int, required=True, help='Number of elements')
        parser.add_argument('--bit-width', type=int, default=1, help='Bits per element')
        parser.add_argument('--sparsity', type=float, required=True, help='Pruning rate S')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--mask-model', choices=['bernoulli', 'fixed'], default='bernoulli',
                            help='Independent pruning, or exactly n_u unpruned bits per block')
        parser.add_argument('--block', type=int, default=None,
                            help='Block length of the fixed mask model')
        parser.add_argument('--zero-ratio', type=float, default=None,
                            help='Probability of a 0 bit in every plane (default: uniform bits)')

    def run(self, **options):
        count = options['bits']
        bit_width = options['bit_width']
        S = options['sparsity']
        seed = options['seed']
        if count <= 0:
            raise InvalidParameterError(f"--bits must be positive, got {count}")

        manifest = TensorManifest((count,), bit_width)
        if options['zero_ratio'] is None:
            values = gen_weights(count, bit_width, seed, (WEIGHT_STREAM,))
        else:
            values = np.zeros(count, dtype=np.uint64)
            for k in range(bit_width):
                plane = gen_biased_plane(count, options['zero_ratio'], seed, (WEIGHT_STREAM, k))
                values |= plane.to_bits().astype(np.uint64) << np.uint64(bit_width - 1 - k)

        if options['mask_model'] == 'fixed':
            block = options['block']
            if not block:
                raise InvalidParameterError("--block is required with --mask-model fixed")
            n_u = round(block * (1.0 - S))
            mask = gen_fixed_nu_mask(count, block, n_u, seed, (MASK_STREAM, block))
        else:
            mask = gen_bernoulli_mask(count, S, seed, (MASK_STREAM,))

        written = save_weight_dump(
            values_to_raw(values, manifest), manifest, mask,
            options['out'], options['manifest'], options['mask_out'],
        )
        unpruned = mask.popcount()
        return {
            'status': 'ok',
            'weights': options['out'],
            'manifest': written.to_dict(),
            'element_count': count,
            'bit_width': bit_width,
            'unpruned': unpruned,
            'S_observed': 1.0 - unpruned / count,
            'config': self.provenance(options),
        }
