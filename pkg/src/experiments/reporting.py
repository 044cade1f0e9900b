#!/usr/bin/env python3
"""
reporting.py

Write run results as tables (CSV or markdown), plot-data series and JSON
artifacts, and read them back. Existing files are only replaced when
`force` is set, so recorded runs are not clobbered by accident.
"""

from __future__ import annotations

import csv
import json
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List, Sequence

from src.experiments.datasets import DataError
from src.experiments.metrics import IterationRecord
from src.experiments.runner import RunArtifact


logger = logging.getLogger(__name__)

RESULTS_COLUMNS = ["iteration", "time_s", "energy", "rmse", "mae", "hn_rmse", "hn_mae", "similarity_score"]
TABLE_HEADERS = [
    "Iteration",
    "Time (s)",
    "Energy Consumption",
    "RMSE",
    "MAE",
    "HN(RMSE)",
    "HN(MAE)",
    "Similarity Score",
]
SUMMARY_COLUMNS = [
    "normalizer",
    "iterations",
    "final_rmse",
    "final_mae",
    "final_hn_rmse",
    "final_hn_mae",
    "similarity_score",
    "max_similarity_change",
    "time_s",
]
PLOT_METRICS = ["time_s", "energy", "rmse", "mae", "hn_rmse", "hn_mae", "similarity_score"]
FORMATS = ("csv", "markdown")
SUFFIXES = {"csv": ".csv", "markdown": ".md"}


class OutputExistsError(FileExistsError):
    """Refusing to overwrite an existing output without force."""


class OutputWriteError(RuntimeError):
    """An output directory or file could not be created."""


@contextmanager
def output_errors(target) -> Iterator[None]:
    """Report OS failures while writing `target` as OutputWriteError."""
    try:
        yield
    except OutputExistsError:
        raise
    except OSError as exc:
        raise OutputWriteError(f"cannot write {target}: {exc}") from exc


def prepare_output_dir(out_dir) -> Path:
    out_dir = Path(out_dir)
    with output_errors(out_dir):
        out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def _prepare(path: Path, force: bool) -> Path:
    path = Path(path)
    if path.exists() and not force:
        raise OutputExistsError(f"{path} already exists (use --force to overwrite)")
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _record_row(record: IterationRecord) -> List[float]:
    return [
        record.iteration,
        record.elapsed_s,
        record.energy,
        record.rmse,
        record.mae,
        record.hn_rmse,
        record.hn_mae,
        record.similarity_score,
    ]


def _markdown(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = [
        "| " + " | ".join(headers) + " |",
        "|" + "|".join("---" for _ in headers) + "|",
    ]
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def emit_table(artifact: RunArtifact, path: Path, fmt: str = "csv", force: bool = False) -> Path:
    """One row per IterationRecord, columns in the experiment-table order."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown table format '{fmt}' (expected one of {FORMATS})")
    if not artifact.records:
        raise ValueError("refusing to emit a table for an artifact with no records")
    path = _prepare(path, force)

    with path.open("w", encoding="utf-8", newline="") as f:
        if fmt == "csv":
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(RESULTS_COLUMNS)
            for record in artifact.records:
                row = _record_row(record)
                writer.writerow([str(row[0])] + [repr(float(v)) for v in row[1:]])
        else:
            rows = [
                [
                    str(r.iteration),
                    f"{r.elapsed_s:.2f}",
                    f"{r.energy:.2f}",
                    f"{r.rmse:.4f}",
                    f"{r.mae:.4f}",
                    f"{r.hn_rmse:.4f}",
                    f"{r.hn_mae:.4f}",
                    f"{r.similarity_score:.4f}",
                ]
                for r in artifact.records
            ]
            f.write(f"### {artifact.normalizer.value} metrics for {len(rows)} iterations\n\n")
            f.write(_markdown(TABLE_HEADERS, rows))

    logger.info(f"Wrote {fmt} table to {path}")
    return path


def load_results_csv(path: Path) -> List[IterationRecord]:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != RESULTS_COLUMNS:
            raise DataError(f"{path}: line 1: header must be {','.join(RESULTS_COLUMNS)}")
        records = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RESULTS_COLUMNS):
                raise DataError(f"{path}: line {line_no}: expected {len(RESULTS_COLUMNS)} values, got {len(row)}")
            try:
                records.append(
                    IterationRecord(
                        iteration=int(row[0]),
                        elapsed_s=float(row[1]),
                        energy=float(row[2]),
                        rmse=float(row[3]),
                        mae=float(row[4]),
                        hn_rmse=float(row[5]),
                        hn_mae=float(row[6]),
                        similarity_score=float(row[7]),
                    )
                )
            except ValueError as exc:
                raise DataError(f"{path}: line {line_no}: {exc}") from exc
    return records


def emit_plot_data(artifact: RunArtifact, path: Path, force: bool = False) -> Path:
    """(iteration, value) series per metric, as JSON."""
    if not artifact.records:
        raise ValueError("refusing to emit plot data for an artifact with no records")
    path = _prepare(path, force)
    series: Dict[str, List[List[float]]] = {}
    for metric in PLOT_METRICS:
        attr = "elapsed_s" if metric == "time_s" else metric
        series[metric] = [[r.iteration, getattr(r, attr)] for r in artifact.records]
    with path.open("w", encoding="utf-8") as f:
        json.dump({"normalizer": artifact.normalizer.value, "series": series}, f, indent=2)
        f.write("\n")
    logger.info(f"Wrote plot data to {path}")
    return path


def save_artifact(artifact: RunArtifact, path: Path, force: bool = False) -> Path:
    path = _prepare(path, force)
    with path.open("w", encoding="utf-8") as f:
        json.dump(artifact.to_dict(), f, indent=2)
        f.write("\n")
    return path


def load_artifact(path: Path) -> RunArtifact:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            return RunArtifact.from_dict(json.load(f))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: not a run artifact: {exc}") from exc


def emit_summary(artifacts: Sequence[RunArtifact], path: Path, fmt: str = "csv", force: bool = False) -> Path:
    """Side-by-side final metrics, one row per normalizer run."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown table format '{fmt}' (expected one of {FORMATS})")
    if not artifacts or any(not a.records for a in artifacts):
        raise ValueError("summary needs complete artifacts")
    path = _prepare(path, force)

    rows = []
    for a in artifacts:
        last = a.records[-1]
        rows.append(
            [
                a.normalizer.value,
                len(a.records),
                last.rmse,
                last.mae,
                last.hn_rmse,
                last.hn_mae,
                last.similarity_score,
                a.similarity.max_abs_change if a.similarity else 0.0,
                last.elapsed_s,
            ]
        )

    with path.open("w", encoding="utf-8", newline="") as f:
        if fmt == "csv":
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SUMMARY_COLUMNS)
            for row in rows:
                writer.writerow(row[:2] + [repr(float(v)) for v in row[2:]])
        else:
            text_rows = [[row[0], str(row[1])] + [f"{v:.4f}" for v in row[2:]] for row in rows]
            f.write(_markdown(SUMMARY_COLUMNS, text_rows))

    logger.info(f"Wrote comparison summary to {path}")
    return path


def write_run_outputs(artifact: RunArtifact, out_dir: Path, fmt: str = "csv", force: bool = False) -> Dict[str, Path]:
    """Artifact JSON, results table and plot data for one run."""
    paths = run_output_paths(artifact, out_dir, fmt)
    refuse_existing(paths.values(), force)
    save_artifact(artifact, paths["artifact"], force=True)
    emit_table(artifact, paths["table"], fmt, force=True)
    emit_plot_data(artifact, paths["plot"], force=True)
    return paths


def run_output_paths(artifact: RunArtifact, out_dir: Path, fmt: str = "csv") -> Dict[str, Path]:
    out_dir = Path(out_dir)
    kind = artifact.normalizer.value
    return {
        "artifact": out_dir / f"run_{kind}.json",
        "table": out_dir / f"results_{kind}{SUFFIXES[fmt]}",
        "plot": out_dir / f"plot_{kind}.json",
    }


def refuse_existing(paths, force: bool) -> None:
    """Fail before writing anything if any target exists and force is off."""
    if force:
        return
    existing = [Path(p) for p in paths if Path(p).exists()]
    if existing:
        names = ", ".join(p.as_posix() for p in existing)
        raise OutputExistsError(f"refusing to overwrite {names} (use --force)")
