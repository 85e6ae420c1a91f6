"""
Artifact writers: traces, ensemble summaries, run records and provenance.

Files are written atomically and contain no wall-clock data, so an identical
(config, seed) pair reproduces byte-identical artifacts.
"""

import csv
import io
import json
import logging
import os
import tempfile
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Protocol

from pydantic import BaseModel

from falqon_lab.exceptions import SerializationError
from falqon_lab.models import Provenance, SummaryRow

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ("layer", "count", "r_A_mean", "r_A_std", "phi_mean", "phi_std")


class ExportableTrace(Protocol):
    def to_csv(self) -> str: ...

    def to_dict(self) -> dict[str, Any]: ...


def atomic_write_text(path: Path, text: str) -> None:
    """Write through a temporary sibling file and ``os.replace`` it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except OSError as e:
        Path(tmp_name).unlink(missing_ok=True)
        raise SerializationError(f"failed to write {path}: {e}", {"path": str(path)}) from e
    logger.debug(f"Wrote {path}")


def dump_json(data: Any) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json")
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, data: Any) -> Path:
    atomic_write_text(path, dump_json(data))
    return Path(path)


def read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise SerializationError(f"cannot read JSON from {path}: {e}") from e


def write_trace(
    trace: ExportableTrace,
    directory: Path,
    stem: str,
    provenance: Provenance | None = None,
) -> tuple[Path, Path]:
    """Write ``<stem>.csv`` and ``<stem>.json`` (trace, config echo and provenance)."""
    directory = Path(directory)
    csv_path = directory / f"{stem}.csv"
    json_path = directory / f"{stem}.json"
    atomic_write_text(csv_path, trace.to_csv())

    record: dict[str, Any] = {"trace": trace.to_dict()}
    if provenance is not None:
        record["provenance"] = provenance.model_dump(mode="json")
    write_json(json_path, record)
    return csv_path, json_path


def format_summary(rows: Sequence[SummaryRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.layer,
                row.count,
                f"{row.r_A_mean:.17g}",
                f"{row.r_A_std:.17g}",
                f"{row.phi_mean:.17g}",
                f"{row.phi_std:.17g}",
            ]
        )
    return buffer.getvalue()


def write_summary(rows: Sequence[SummaryRow], path: Path) -> Path:
    atomic_write_text(path, format_summary(rows))
    return Path(path)


def format_rows(columns: Sequence[str], rows: Sequence[dict[str, Any]]) -> str:
    """CSV of dict rows; floats at 17 significant digits, missing keys empty."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        cells = []
        for column in columns:
            value = row.get(column)
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(f"{value:.17g}")
            else:
                cells.append(str(value))
        writer.writerow(cells)
    return buffer.getvalue()


def write_rows(path: Path, columns: Sequence[str], rows: Sequence[dict[str, Any]]) -> Path:
    atomic_write_text(path, format_rows(columns, rows))
    return Path(path)
