"""
Django management command to compute the minimum symbol set of masked blocks
Usage: python manage.py entropy --nb 4 --nu 2
"""

from xorcodec.engine.entropy import DEFAULT_ASSIGNMENT_BUDGET, DEFAULT_NODE_BUDGET, min_symbol_set

from ._base import CodecCommand


class Command(CodecCommand):
    help = 'Smallest symbol set covering every n_b-bit block with n_u unpruned bits, and its entropy'

    def add_arguments(self, parser):
        parser.add_argument('--nb', type=int, required=True, help='Block length n_b')
        parser.add_argument('--nu', type=int, required=True, help='Unpruned bits per block n_u')
        parser.add_argument('--node-budget', type=int, default=DEFAULT_NODE_BUDGET,
                            help='Search nodes before falling back to a greedy cover')
        parser.add_argument('--assignment-budget', type=int, default=DEFAULT_ASSIGNMENT_BUDGET,
                            help='Assignment search steps before keeping the best assignment found')

    def run(self, **options):
        table = min_symbol_set(
            options['nb'], options['nu'], options['node_budget'], options['assignment_budget']
        )
        return {'status': 'ok', **table.to_dict(), 'config': self.provenance(options)}
