# rscavity/utils/run_logger.py

import json
from collections import Counter
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Optional

from .config import get_settings


class RunLogger:
    """
    Appends one record per command invocation to a rotating JSONL log.

    Each line is a self-contained JSON object (the run manifest plus
    outcome), so the log can be tailed or grepped without loading it.

    Rotation: a new file is started each calendar day (UTC).
    File path: data/run_logs/YYYY-MM-DD.jsonl (``RSCAVITY_LOG_DIR`` overrides)

    Records include:
        command, parameters, seed, tool_version, wall_time,
        output_digest, exit_code, error, timestamp (ISO-8601 UTC)
    """

    def __init__(self, log_dir: Optional[Path] = None):
        self.log_dir = Path(log_dir) if log_dir is not None else get_settings().log_dir
        self.log_dir.mkdir(parents=True, exist_ok=True)

    # ── Public API ────────────────────────────────────────────────────

    def log_run(self, manifest: Dict, exit_code: int = 0, error: Optional[str] = None) -> Path:
        """Append one run record and return the log file it went to."""
        record = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            **manifest,
            "exit_code": exit_code,
            "error":     error,
        }
        log_path = self._today_log_path()
        with open(log_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(record, ensure_ascii=False, default=str) + "\n")
        return log_path

    def recent_stats(self, days: int = 7) -> Dict:
        """
        Return aggregate stats over the last ``days`` log files.

        {
            "days_covered": int,
            "total_runs": int,
            "failure_rate": float,   # fraction of runs with a non-zero exit code
            "by_command": {command: count},
            "log_files": [str, ...]
        }
        """
        files = sorted(self.log_dir.glob("*.jsonl"))[-days:] if days > 0 else []
        total = failed = 0
        by_command: Counter = Counter()

        for path in files:
            with open(path, encoding="utf-8") as f:
                for line in f:
                    try:
                        r = json.loads(line)
                    except json.JSONDecodeError:
                        continue
                    total += 1
                    by_command[r.get("command", "?")] += 1
                    if r.get("exit_code", 0) != 0:
                        failed += 1

        return {
            "days_covered": len(files),
            "total_runs":   total,
            "failure_rate": round(failed / total, 4) if total else 0.0,
            "by_command":   dict(sorted(by_command.items())),
            "log_files":    [p.name for p in files],
        }

    # ── Internals ─────────────────────────────────────────────────────

    def _today_log_path(self) -> Path:
        today = datetime.now(timezone.utc).strftime("%Y-%m-%d")
        return self.log_dir / f"{today}.jsonl"
