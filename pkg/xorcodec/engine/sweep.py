"""
Experiment sweeps over pruning rate and decoder geometry.

Every grid cell draws its data from the sweep seed (plane and mask depend
only on the cell's data parameters), selects a decoder on a calibration
slice of that data, compresses the full plane and reports one row. Rows
come back in grid order: S, n_in, n_out, n_s, zero_ratio, mask_model.
"""

import csv
import io
import itertools
import logging
import math
import time
from dataclasses import dataclass
from functools import partial
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bitplane import values_to_raw
from .codec import compress
from .exceptions import CodecError, InvalidParameterError
from .interfaces import CorrectionConfig, PackedBitVector, TensorManifest
from .matrixsearch import CalibrationData, SearchConfig, select_best
from .synth import derive_rng, gen_bernoulli_mask, gen_biased_plane, gen_fixed_nu_mask, gen_random_plane
from .utils.parallel_utils import ordered_map

logger = logging.getLogger(__name__)

AUTO = 'auto'
MASK_MODELS = ('bernoulli', 'fixed')

# Spawn-key namespaces of the sweep seed
_PLANE_STREAM = 10
_MASK_STREAM = 11
_SEARCH_STREAM = 12

CSV_FIELDS = [
    'S', 'n_in', 'n_out', 'n_s', 'zero_ratio', 'mask_model', 'status',
    'E', 'calibration_E', 'encoded_bits', 'error_bits', 'correction_bits',
    'exact_footprint_bits', 'exact_memory_save', 'analytic_memory_save',
    'inverted', 'error', 'wall_time',
]


def auto_n_out(n_in: int, S: float) -> int:
    """floor(n_in / (1 - S)), robust to binary rounding of S."""
    return math.floor(n_in / (1.0 - S) + 1e-9)


def _key(value: float) -> int:
    return int(round(value * 1_000_000))


@dataclass(frozen=True)
class SweepSpec:
    """Grid and data parameters of a sweep."""
    sparsities: Tuple[float, ...]
    n_ins: Tuple[int, ...]
    n_outs: Tuple[Union[int, str], ...] = (AUTO,)
    n_ss: Tuple[int, ...] = (0,)
    length: int = 100_000
    seed: int = 0
    trials: int = 32
    calibration_bits: int = 50_000
    zero_ratios: Tuple[Optional[float], ...] = (None,)
    mask_models: Tuple[str, ...] = ('bernoulli',)
    correction_block: int = 512
    invert: bool = True
    encoder: Optional[str] = None
    trellis_cap: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.length <= 0:
            raise InvalidParameterError(f"Sweep length must be positive, got {self.length}")
        for S in self.sparsities:
            if not 0.0 <= S < 1.0:
                raise InvalidParameterError(f"Pruning rate must be in [0, 1), got {S}")
        for n_out in self.n_outs:
            if n_out != AUTO and (not isinstance(n_out, int) or n_out <= 0):
                raise InvalidParameterError(f"n_out must be a positive integer or 'auto', got {n_out!r}")
        for model in self.mask_models:
            if model not in MASK_MODELS:
                raise InvalidParameterError(f"Unknown mask model '{model}'", {'known': list(MASK_MODELS)})

    def cells(self) -> List[Dict[str, Any]]:
        """Grid cells in output order; 'auto' n_out is resolved per (S, n_in)."""
        cells = []
        for S, n_in, n_out, n_s, zero_ratio, model in itertools.product(
            self.sparsities, self.n_ins, self.n_outs, self.n_ss, self.zero_ratios, self.mask_models
        ):
            cells.append({
                'S': S,
                'n_in': n_in,
                'n_out': auto_n_out(n_in, S) if n_out == AUTO else n_out,
                'n_s': n_s,
                'zero_ratio': zero_ratio,
                'mask_model': model,
            })
        return cells


def cell_data(spec: SweepSpec, cell: Dict[str, Any]) -> Tuple[PackedBitVector, PackedBitVector]:
    """Plane and mask of a cell; independent of the decoder parameters except for fixed-n_u masks."""
    if cell['zero_ratio'] is None:
        plane = gen_random_plane(spec.length, spec.seed, (_PLANE_STREAM,))
    else:
        plane = gen_biased_plane(spec.length, cell['zero_ratio'], spec.seed, (_PLANE_STREAM, _key(cell['zero_ratio'])))

    if cell['mask_model'] == 'fixed':
        n_u = round(cell['n_out'] * (1.0 - cell['S']))
        mask = gen_fixed_nu_mask(spec.length, cell['n_out'], n_u, spec.seed, (_MASK_STREAM, _key(cell['S']), cell['n_out']))
    else:
        mask = gen_bernoulli_mask(spec.length, cell['S'], spec.seed, (_MASK_STREAM, _key(cell['S'])))
    return plane, mask


def run_cell(cell: Dict[str, Any], spec: SweepSpec) -> Dict[str, Any]:
    """Select a decoder for one cell, compress its data, and report a CSV row."""
    row: Dict[str, Any] = {name: '' for name in CSV_FIELDS}
    row.update({k: ('' if v is None else v) for k, v in cell.items()})
    start = time.perf_counter()
    try:
        plane, mask = cell_data(spec, cell)
        search = SearchConfig(
            trials=spec.trials,
            seed=_cell_search_seed(spec, cell),
            calibration=CalibrationData.from_planes([plane], mask, spec.calibration_bits, spec.invert),
            encoder=spec.encoder,
            trellis_cap=spec.trellis_cap,
            workers=1,
        )
        decoder, calibration_e = select_best(search, cell['n_in'], cell['n_out'], cell['n_s'])

        manifest = TensorManifest((spec.length,), 1)
        raw = values_to_raw(plane.to_bits().astype(np.uint64), manifest)
        _, report = compress(
            raw, manifest, mask, decoder,
            CorrectionConfig(spec.correction_block),
            invert=spec.invert, encoder=spec.encoder, trellis_cap=spec.trellis_cap, workers=1,
        )
        row.update({
            'status': 'ok',
            'E': report.efficiency,
            'calibration_E': calibration_e,
            'encoded_bits': report.encoded_bits,
            'error_bits': report.mismatch_bits,
            'correction_bits': report.correction_bits,
            'exact_footprint_bits': report.exact_footprint_bits,
            'exact_memory_save': report.exact_memory_save,
            'analytic_memory_save': report.analytic_memory_save,
            'inverted': report.inverted_planes > 0,
        })
    except CodecError as e:
        logger.warning(f"Sweep cell {cell} skipped: {e.message}")
        row.update({'status': e.code, 'error': e.message})
    row['wall_time'] = round(time.perf_counter() - start, 3)
    return row


def _cell_search_seed(spec: SweepSpec, cell: Dict[str, Any]) -> int:
    """Matrix-search seed of a cell; shared by cells with the same decoder geometry."""
    rng = derive_rng(spec.seed, _SEARCH_STREAM, cell['n_in'], cell['n_out'], cell['n_s'])
    return int(rng.integers(0, 2**63 - 1))


def run_sweep(spec: SweepSpec) -> List[Dict[str, Any]]:
    """Run every cell; rows are returned in grid order."""
    cells = spec.cells()
    logger.info(f"Running sweep of {len(cells)} cells on {spec.length} bits (seed={spec.seed})")
    rows = ordered_map(partial(run_cell, spec=spec), cells, spec.workers)
    failed = sum(1 for r in rows if r['status'] != 'ok')
    logger.info(f"Sweep finished: {len(rows) - failed} ok, {failed} skipped")
    return rows


def write_csv(rows: Iterable[Dict[str, Any]], target=None, include_wall_time: bool = True) -> str:
    """
    Write sweep rows as CSV.

    Args:
        rows: Rows from run_sweep
        target: Path to write, or None to only return the text
        include_wall_time: Drop the timing column for byte-stable output

    Returns:
        The CSV text
    """
    fields = CSV_FIELDS if include_wall_time else [f for f in CSV_FIELDS if f != 'wall_time']
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    text = buffer.getvalue()
    if target:
        with open(target, 'w', newline='') as f:
            f.write(text)
    return text


def write_svg(rows: Sequence[Dict[str, Any]], path: str) -> None:
    """Plot E and exact memory save against n_out, one line per (S, n_in, n_s)."""
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    series: Dict[Tuple, List[Dict[str, Any]]] = {}
    for row in rows:
        if row['status'] == 'ok':
            series.setdefault((row['S'], row['n_in'], row['n_s']), []).append(row)

    fig, (ax_e, ax_save) = plt.subplots(1, 2, figsize=(10, 4))
    for (S, n_in, n_s), points in sorted(series.items()):
        points = sorted(points, key=lambda r: r['n_out'])
        n_outs = [r['n_out'] for r in points]
        label = f"S={S}, n_in={n_in}, n_s={n_s}"
        ax_e.plot(n_outs, [r['E'] for r in points], marker='o', label=label)
        ax_save.plot(n_outs, [100 * r['exact_memory_save'] for r in points], marker='o', label=label)

    ax_e.set_xlabel('n_out')
    ax_e.set_ylabel('E (%)')
    ax_save.set_xlabel('n_out')
    ax_save.set_ylabel('memory save (%)')
    ax_save.legend(fontsize='small')
    fig.tight_layout()
    fig.savefig(path, format='svg')
    plt.close(fig)
    logger.info(f"Wrote sweep plot {path}")
