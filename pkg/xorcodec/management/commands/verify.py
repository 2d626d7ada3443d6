"""
Django management command to check that an artifact restores a weight dump
Usage: python manage.py verify --artifact w.f2fx --weights w.bin
"""

from xorcodec.engine.artifact import load_artifact
from xorcodec.engine.bitplane import load_weight_dump
from xorcodec.engine.codec import verify_roundtrip
from xorcodec.engine.exceptions import MalformedInputError

from ._base import CodecCommand


class Command(CodecCommand):
    help = 'Decompress an artifact and compare every unpruned bit with the original dump'

    def add_arguments(self, parser):
        parser.add_argument('--artifact', required=True)
        parser.add_argument('--weights', required=True, help='Original raw weight dump')
        parser.add_argument('--manifest', default=None, help='Manifest (default: <weights>.json)')

    def run(self, **options):
        raw, manifest, mask = load_weight_dump(options['weights'], options['manifest'])
        artifact = load_artifact(options['artifact'])
        stored = artifact.manifest
        if stored.shape != manifest.shape or stored.bit_width != manifest.bit_width:
            raise MalformedInputError(
                "Artifact was built for another tensor",
                {'artifact': stored.to_dict(), 'weights': manifest.to_dict()},
            )

        result = verify_roundtrip(artifact, raw, mask)
        return {
            **result,
            'artifact': options['artifact'],
            'weights': options['weights'],
            'config': self.provenance(options),
        }
