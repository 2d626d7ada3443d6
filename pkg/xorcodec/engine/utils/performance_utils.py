"""
Performance tracking utilities for codec operations.
"""

import logging
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator

logger = logging.getLogger(__name__)


class PerformanceTracker:
    """Track wall time and throughput of named codec operations."""

    def __init__(self, summary_every: int = 50):
        self.summary_every = summary_every
        self.performance_monitoring_enabled = True
        self.usage_stats: Dict[str, Dict[str, float]] = {}
        self.total_records = 0

    def track_operation(self, operation: str, seconds: float, bits: int = 0) -> None:
        """
        Record one run of an operation.

        Args:
            operation: Operation name (e.g. 'encode', 'decode', 'spmv_csr')
            seconds: Wall time of the run
            bits: Number of payload bits the run processed
        """
        if not self.performance_monitoring_enabled:
            return

        stats = self.usage_stats.setdefault(
            operation, {'runs': 0, 'total_seconds': 0.0, 'total_bits': 0, 'best_seconds': float('inf')}
        )
        stats['runs'] += 1
        stats['total_seconds'] += seconds
        stats['total_bits'] += bits
        stats['best_seconds'] = min(stats['best_seconds'], seconds)
        self.total_records += 1

        if self.summary_every and self.total_records % self.summary_every == 0:
            self._log_performance_summary()

    @contextmanager
    def timed(self, operation: str, bits: int = 0) -> Iterator[None]:
        """Context manager recording the wall time of the enclosed block."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.track_operation(operation, time.perf_counter() - start, bits)

    def _log_performance_summary(self) -> None:
        for operation, stats in self.usage_stats.items():
            avg = stats['total_seconds'] / stats['runs']
            logger.info(
                f"Performance Summary - {operation}: runs={stats['runs']}, "
                f"avg={avg:.4f}s, best={stats['best_seconds']:.4f}s, "
                f"bits={int(stats['total_bits'])}"
            )

    def get_performance_metrics(self) -> Dict[str, Any]:
        """
        Get per-operation metrics with derived averages and throughput.

        Returns:
            Dict keyed by operation name
        """
        metrics = {}
        for operation, stats in self.usage_stats.items():
            entry = dict(stats)
            entry['average_seconds'] = stats['total_seconds'] / stats['runs']
            entry['bits_per_second'] = (
                stats['total_bits'] / stats['total_seconds'] if stats['total_seconds'] > 0 else 0.0
            )
            metrics[operation] = entry
        return metrics

    def clear_performance_metrics(self) -> None:
        """Clear performance metrics (for testing or reset)."""
        self.usage_stats = {}
        self.total_records = 0
        logger.info("Performance metrics cleared")


# Global tracker shared by the codec pipeline
performance_tracker = PerformanceTracker()
