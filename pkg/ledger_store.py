"""Persistent storage for audit ledgers and command reports.

Writes the JSON-lines record ledger, the fixed-width ledger table and any other
report text under an output directory (``Config.output_dir()`` by default).

Design goals:
 - Atomic writes (temp file + os.replace) so a crashed sweep never leaves half a ledger
 - Byte-stable output: callers pass already-sorted records, nothing here reorders
 - Thread safety via a threading.Lock (reports may be written from worker threads)
 - Graceful corruption handling on read (backup to .corrupt, return what parsed)
"""
from __future__ import annotations

import json
import logging
import os
import threading
from pathlib import Path
from typing import Iterable, List, Optional

from config import Config
from models.tree_models import AuditRecord

logger = logging.getLogger(__name__)

DEFAULT_RECORDS_FILENAME = "audit_records.jsonl"
DEFAULT_LEDGER_FILENAME = "audit_ledger.txt"


class LedgerStore:
    def __init__(self, directory: Optional[str] = None) -> None:
        self.directory = Path(directory) if directory else Config.output_dir()
        self._lock = threading.Lock()

    def path_for(self, name: str) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.directory / path

    def write_text(self, name: str, text: str) -> Path:
        """Atomically replace ``name`` (relative to the store directory) with ``text``."""
        target = self.path_for(name)
        with self._lock:
            self._write_raw(target, text)
        return target

    def write_records(self, records: Iterable[AuditRecord], name: str = DEFAULT_RECORDS_FILENAME) -> Path:
        lines = "".join(json.dumps(r.model_dump(mode="json"), ensure_ascii=False) + "\n" for r in records)
        return self.write_text(name, lines)

    def read_records(self, name: str = DEFAULT_RECORDS_FILENAME) -> List[AuditRecord]:
        target = self.path_for(name)
        with self._lock:
            return self._read_raw(target)

    # --- File IO helpers (synchronous; guarded by the lock) ---
    def _read_raw(self, target: Path) -> List[AuditRecord]:
        if not target.is_file():
            return []
        records: List[AuditRecord] = []
        corrupt = False
        with target.open("r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(AuditRecord.model_validate(json.loads(line)))
                except (json.JSONDecodeError, ValueError) as e:
                    logger.warning(f"Skipping bad ledger line {lineno} in {target}: {e}")
                    corrupt = True
        if corrupt:
            backup_path = target.with_suffix(".corrupt")
            try:
                os.replace(target, backup_path)
                logger.warning(f"Corrupted ledger moved to {backup_path}")
            except OSError as e:
                logger.warning(f"Failed to backup corrupted ledger: {e}")
        return records

    def _write_raw(self, target: Path, text: str) -> None:
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp_path = target.with_name(target.name + ".tmp")
        try:
            with tmp_path.open("w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            # Atomic replace
            os.replace(tmp_path, target)
        except OSError as e:
            logger.error(f"Failed writing {target}: {e}")
            tmp_path.unlink(missing_ok=True)
            raise


__all__ = ["LedgerStore", "DEFAULT_RECORDS_FILENAME", "DEFAULT_LEDGER_FILENAME"]
