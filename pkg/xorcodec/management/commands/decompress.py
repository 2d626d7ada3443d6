"""
Django management command to restore a weight dump from an artifact
Usage: python manage.py decompress --artifact w.f2fx --out restored.bin
"""

import json

from xorcodec.engine.artifact import load_artifact
from xorcodec.engine.bitplane import save_weight_dump
from xorcodec.engine.codec import decompress
from xorcodec.engine.interfaces import TensorManifest

from ._base import CodecCommand


class Command(CodecCommand):
    help = 'Decode an artifact back into the raw weight dump format'

    def add_arguments(self, parser):
        parser.add_argument('--artifact', required=True)
        parser.add_argument('--out', required=True, help='Raw weight file to write')
        parser.add_argument('--manifest', default=None, help='Manifest path (default: <out>.json)')

    def run(self, **options):
        artifact = load_artifact(options['artifact'])
        raw = decompress(artifact)
        out = options['out']
        manifest_path = options['manifest'] or f"{out}.json"

        if artifact.mask is not None:
            written = save_weight_dump(raw, artifact.manifest, artifact.mask, out, manifest_path)
        else:
            # Referenced masks stay with the caller; the dump is written without one
            written = TensorManifest(artifact.manifest.shape, artifact.manifest.bit_width)
            with open(out, 'wb') as f:
                f.write(raw)
            with open(manifest_path, 'w') as f:
                json.dump(written.to_dict(), f, indent=2, sort_keys=True)

        return {
            'status': 'ok',
            'artifact': options['artifact'],
            'weights': out,
            'manifest': written.to_dict(),
            'planes': len(artifact.planes),
            'bytes': len(raw),
            'mask_reference': artifact.mask_reference,
            'config': self.provenance(options),
        }
