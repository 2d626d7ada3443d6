"""
Django management command to estimate the decoder's hardware cost
Usage: python manage.py cost --n-in 8 --n-out 80 --n-s 2
"""

import numpy as np

from xorcodec.engine.exceptions import InvalidParameterError
from xorcodec.engine.gf2decoder import hardware_cost, read_matrix_blob
from xorcodec.engine.interfaces import DecoderSpec

from ._base import CodecCommand, describe_spec


class Command(CodecCommand):
    help = 'XOR gate, transistor, latency and flip-flop estimates of an XOR-gate decoder'

    def add_arguments(self, parser):
        parser.add_argument('--matrix', default=None, help='Matrix blob to describe')
        parser.add_argument('--n-in', type=int, default=None)
        parser.add_argument('--n-out', type=int, default=None)
        parser.add_argument('--n-s', type=int, default=0)

    def run(self, **options):
        if options['matrix']:
            spec = read_matrix_blob(options['matrix'])
        else:
            if not options['n_in'] or not options['n_out']:
                raise InvalidParameterError("Either --matrix or both --n-in and --n-out are required")
            n_in, n_out, n_s = options['n_in'], options['n_out'], options['n_s']
            # The cost model depends on dimensions only
            spec = DecoderSpec(n_in, n_out, n_s, np.zeros((n_out, n_in * (n_s + 1)), dtype=np.uint8))

        return {
            'status': 'ok',
            **describe_spec(spec),
            **hardware_cost(spec),
            'config': self.provenance(options),
        }
