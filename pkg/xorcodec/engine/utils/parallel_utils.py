"""
Ordered worker pool for embarrassingly parallel codec jobs.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """
    Apply ``fn`` to every item and return results in input order.

    With ``workers`` > 1 the items run in a process pool; ``fn`` and the
    items must then be picklable. Results are identical to the serial run
    because every job derives its own randomness from its arguments.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug(f"Dispatching {len(items)} jobs to {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
