"""
Run-time bookkeeping for dephasim commands
"""

import logging
import threading
from dataclasses import asdict, dataclass
from datetime import datetime
from typing import Any, Dict, List, Optional


@dataclass
class CommandMetrics:
    """Metrics for one command invocation"""
    timestamp: datetime
    command: str
    processing_time: float
    success: bool
    exit_code: int = 0
    rows_written: int = 0
    error_message: Optional[str] = None


@dataclass
class RunSummary:
    """Aggregate over all recorded commands"""
    total_commands: int = 0
    successful_commands: int = 0
    total_processing_time: float = 0.0
    avg_processing_time: float = 0.0
    rows_written: int = 0
    error_rate: float = 0.0


class RunMonitor:
    """Track command timings and outcomes; reported through logging only"""

    def __init__(self, max_history: int = 1000):
        self.history: List[CommandMetrics] = []
        self.max_history = max_history
        self.start_time = datetime.now()
        self.lock = threading.Lock()
        self.logger = logging.getLogger("dephasim.monitor")

    def record_command(self,
                       command: str,
                       processing_time: float,
                       success: bool = True,
                       exit_code: int = 0,
                       rows_written: int = 0,
                       error_message: Optional[str] = None) -> None:
        """Record metrics for a single command"""
        metrics = CommandMetrics(
            timestamp=datetime.now(),
            command=command,
            processing_time=processing_time,
            success=success,
            exit_code=exit_code,
            rows_written=rows_written,
            error_message=error_message,
        )
        with self.lock:
            self.history.append(metrics)
            if len(self.history) > self.max_history:
                self.history = self.history[-self.max_history:]
        self.logger.debug(f"{command}: {processing_time:.3f}s, exit {exit_code}")

    def get_summary(self) -> RunSummary:
        with self.lock:
            recent = list(self.history)
        if not recent:
            return RunSummary()

        total = len(recent)
        successful = sum(1 for m in recent if m.success)
        total_time = sum(m.processing_time for m in recent)
        return RunSummary(
            total_commands=total,
            successful_commands=successful,
            total_processing_time=total_time,
            avg_processing_time=total_time / total,
            rows_written=sum(m.rows_written for m in recent),
            error_rate=(total - successful) / total * 100,
        )

    def get_report(self, cache_stats: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Summary plus optional kernel-cache statistics"""
        report = {
            'uptime_seconds': (datetime.now() - self.start_time).total_seconds(),
            'summary': asdict(self.get_summary()),
        }
        if cache_stats is not None:
            report['kernel_cache'] = cache_stats
        return report

    def log_report(self, cache_stats: Optional[Dict[str, Any]] = None) -> None:
        report = self.get_report(cache_stats)
        summary = report['summary']
        self.logger.info(f"{summary['total_commands']} command(s), "
                         f"{summary['total_processing_time']:.3f}s total, "
                         f"{summary['rows_written']} rows written")
        if cache_stats is not None:
            self.logger.info(f"kernel cache: {cache_stats['entries']} entries, "
                             f"hit rate {cache_stats['hit_rate']:.1%}")


# Global monitor instance
run_monitor = RunMonitor()
