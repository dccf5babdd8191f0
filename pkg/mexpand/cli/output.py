"""Result documents and plot-ready tables."""

from __future__ import annotations

from pathlib import Path

import pandas as pd
from loguru import logger

from mexpand.exceptions import ExperimentError
from mexpand.utils import dumps

CSV_COLUMNS = ["j", "error", "bound", "order_running"]


def write_result(out_dir: Path, document: dict) -> Path:
    path = out_dir / "result.json"
    try:
        path.write_bytes(dumps(document))
    except OSError as e:
        raise ExperimentError(f"cannot write {path}: {e}") from e
    logger.info(f"wrote {path}")
    return path


def write_errors_csv(out_dir: Path, rows: list[dict]) -> Path:
    path = out_dir / "errors.csv"
    frame = pd.DataFrame(rows, columns=CSV_COLUMNS)
    try:
        frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n", float_format="%.17g")
    except OSError as e:
        raise ExperimentError(f"cannot write {path}: {e}") from e
    logger.info(f"wrote {path} ({len(frame)} rows)")
    return path
