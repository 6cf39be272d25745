"""
Run logging: timestamped JSON events and the final run report.
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional
import json
import logging
import math

import numpy as np
import psutil

logger = logging.getLogger(__name__)

REPORT_NAME = "run_report.json"


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars and arrays, and non-finite floats, for JSON."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, Path):
        return str(value)
    return value


class RunLogger:
    """Writer of the machine-readable run report."""

    def __init__(self, output_dir: Optional[str] = None, run_id: Optional[str] = None):
        """
        Initialize the run logger.

        Args:
            output_dir: Directory for the report (default: current directory)
            run_id: Run identifier (default: a timestamp)
        """
        self.output_dir = Path(output_dir) if output_dir else Path.cwd()
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.run_id = run_id or datetime.now().strftime("run-%Y%m%d-%H%M%S")
        self.report_path = self.output_dir / REPORT_NAME
        self.events: List[Dict[str, Any]] = []
        self.artifacts: List[str] = []
        self.peak_rss = 0

    def log_start(self, config: Dict[str, Any]) -> None:
        """
        Log the run start.

        Args:
            config: Configuration echo
        """
        self._write_event({"event": "start", "config": config})

    def log_solve(self, m: float, report: Dict[str, Any]) -> None:
        """Log one finished solve."""
        self._write_event({"event": "solve", "m": m, "report": report})

    def log_artifact(self, path: Path) -> None:
        """Log an artifact written to disk."""
        try:
            rel = str(Path(path).resolve().relative_to(self.output_dir.resolve()))
        except ValueError:
            rel = str(path)
        self.artifacts.append(rel)
        self._write_event({"event": "artifact", "path": rel})

    def log_error(self, error: str) -> None:
        """Log a run error."""
        self._write_event({"event": "error", "error": error})

    def log_complete(self, summary: Dict[str, Any]) -> None:
        """
        Log run completion.

        Args:
            summary: Scalars of the run
        """
        self._write_event({"event": "complete", "summary": summary})

    def _write_event(self, entry: Dict[str, Any]) -> None:
        self.peak_rss = max(self.peak_rss, psutil.Process().memory_info().rss)
        entry = {"run_id": self.run_id, "timestamp": datetime.now().isoformat(), **entry}
        self.events.append(to_jsonable(entry))
        self._flush()

    def _flush(self) -> None:
        report = {
            "run_id": self.run_id,
            "events": self.events,
            "artifacts": self.artifacts,
            "peak_rss_bytes": self.peak_rss,
        }
        with open(self.report_path, "w") as f:
            json.dump(report, f, indent=2)

    def read(self) -> Dict[str, Any]:
        """Load the report back from disk."""
        with open(self.report_path, "r") as f:
            return json.load(f)
