#!/usr/bin/env python3
"""
cli.py

Command-line experiment harness.

Usage:
    python -m src.experiments.cli gen-data --out data/ --seed 7
    python -m src.experiments.cli run --normalizer holonorm --iterations 10 --out results/
    python -m src.experiments.cli compare --out results/ --format markdown
    python -m src.experiments.cli table --artifact results/run_tanh.json --format markdown
    python -m src.experiments.cli plot-data --artifact results/run_tanh.json
    python -m src.experiments.cli demo

Exit codes: 0 success, 2 config error, 3 data error, 4 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

# Ensure repo root is on sys.path for `src.*` imports when run as a script
REPO_ROOT = Path(__file__).resolve().parents[2]
if REPO_ROOT.as_posix() not in sys.path:
    sys.path.insert(0, REPO_ROOT.as_posix())

from src.experiments.config import ConfigError, ExperimentConfig, resolve_config
from src.experiments.datasets import DataError, generate_orthogonal3d, write_csv_dataset
from src.experiments.reporting import (
    FORMATS,
    SUFFIXES,
    OutputExistsError,
    OutputWriteError,
    emit_plot_data,
    emit_summary,
    emit_table,
    load_artifact,
    output_errors,
    prepare_output_dir,
    refuse_existing,
    run_output_paths,
    write_run_outputs,
)
from src.experiments.runner import RunArtifact, compare_normalizers, run_experiment
from src.numerics.normalizers import NormalizerKind, holonorm, tanh_normalize
from src.numerics.similarity import cosine, orthogonality_destruction_demo


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_RUNTIME = 4

LOG_LEVEL = os.environ.get("HOLONORM_LOG_LEVEL", "INFO")

EXAMPLE_VECTORS = [(1.0, 2.0, 3.0), (12.0, 3.0, -6.0), (1.0, -2.0, 1.0)]


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="Flat JSON config file.")
    parser.add_argument("--dataset", default=None, help="'orthogonal3d' or a dataset CSV path.")
    parser.add_argument("--n-vectors", dest="n_vectors", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--iterations", type=int, default=None)
    parser.add_argument("--steps", dest="steps_per_iteration", type=int, default=None,
                        help="PSO steps per outer iteration.")
    parser.add_argument("--particles", dest="n_particles", type=int, default=None)
    parser.add_argument("--w", type=float, default=None, help="PSO inertia (default 0.5).")
    parser.add_argument("--c1", type=float, default=None, help="PSO cognitive weight (default 0.5).")
    parser.add_argument("--c2", type=float, default=None, help="PSO social weight (default 0.5).")
    parser.add_argument("--layers", dest="n_layers", type=int, default=None)
    parser.add_argument("--placement", choices=["pre", "post"], default=None)
    parser.add_argument("--out", dest="output_dir", type=Path, default=None, help="Output directory.")
    parser.add_argument("--format", choices=FORMATS, default="csv")
    parser.add_argument("--force", action="store_true", help="Overwrite existing outputs.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="HoloNorm normalization experiments.")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="Logging level (default from HOLONORM_LOG_LEVEL).")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-data", help="Write the orthogonal3d dataset as CSV.")
    gen.add_argument("--n-vectors", dest="n_vectors", type=int, default=1000)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", dest="output_dir", type=Path, default=None)
    gen.add_argument("--force", action="store_true")

    run = sub.add_parser("run", help="Train under one normalizer and write its table.")
    run.add_argument("--normalizer", choices=[k.value for k in NormalizerKind], default="holonorm")
    _add_experiment_flags(run)

    compare = sub.add_parser("compare", help="Run all four normalizers with identical seeds.")
    _add_experiment_flags(compare)

    table = sub.add_parser("table", help="Re-emit the results table of a saved run.")
    table.add_argument("--artifact", type=Path, required=True)
    table.add_argument("--format", choices=FORMATS, default="markdown")
    table.add_argument("--out", type=Path, default=None, help="Output file (default: next to the artifact).")
    table.add_argument("--force", action="store_true")

    plot = sub.add_parser("plot-data", help="Write (iteration, metric) series of a saved run.")
    plot.add_argument("--artifact", type=Path, required=True)
    plot.add_argument("--out", type=Path, default=None)
    plot.add_argument("--force", action="store_true")

    sub.add_parser("demo", help="Print the holonorm vs tanh example-vector comparison.")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    keys = (
        "dataset", "n_vectors", "seed", "iterations", "steps_per_iteration",
        "n_particles", "w", "c1", "c2", "n_layers", "placement", "output_dir",
    )
    out = {key: getattr(args, key, None) for key in keys}
    if out.get("output_dir") is not None:
        out["output_dir"] = Path(out["output_dir"]).as_posix()
    return out


def cmd_gen_data(args: argparse.Namespace) -> int:
    cfg = resolve_config(overrides={"seed": args.seed, "n_vectors": args.n_vectors,
                                    "output_dir": args.output_dir.as_posix() if args.output_dir else None})
    vectors = generate_orthogonal3d(cfg.n_vectors, cfg.seed)
    target = prepare_output_dir(cfg.output_dir) / "orthogonal3d.csv"
    with output_errors(target):
        path = write_csv_dataset(target, vectors, vectors, force=args.force)
    logger.info(f"Wrote {len(vectors)} vectors to {path}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args.config, _overrides(args))
    kind = NormalizerKind.parse(args.normalizer)
    probe = RunArtifact(config={}, normalizer=kind)
    refuse_existing(run_output_paths(probe, cfg.output_dir, args.format).values(), args.force)
    prepare_output_dir(cfg.output_dir)

    artifact = run_experiment(cfg, kind)
    with output_errors(cfg.output_dir):
        paths = write_run_outputs(artifact, cfg.output_dir, args.format, force=args.force)
    print(f"Run {kind.value}: {len(artifact.records)} iterations, final rmse={artifact.records[-1].rmse:.4f}")
    print(f"Wrote {paths['table']}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    cfg: ExperimentConfig = resolve_config(args.config, _overrides(args))
    summary_path = cfg.output_dir / f"compare_summary{SUFFIXES[args.format]}"
    targets: List[Path] = [summary_path]
    for kind in NormalizerKind:
        targets += run_output_paths(RunArtifact(config={}, normalizer=kind), cfg.output_dir, args.format).values()
    refuse_existing(targets, args.force)
    prepare_output_dir(cfg.output_dir)

    artifacts = compare_normalizers(cfg)
    # single writer, after every run has finished
    with output_errors(cfg.output_dir):
        for artifact in artifacts:
            write_run_outputs(artifact, cfg.output_dir, args.format, force=args.force)
        emit_summary(artifacts, summary_path, args.format, force=args.force)
    print(summary_path.read_text(encoding="utf-8"))
    return EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    artifact = load_artifact(args.artifact)
    out = args.out or args.artifact.with_name(f"results_{artifact.normalizer.value}{SUFFIXES[args.format]}")
    with output_errors(out):
        emit_table(artifact, out, args.format, force=args.force)
    print(out.read_text(encoding="utf-8"))
    return EXIT_OK


def cmd_plot_data(args: argparse.Namespace) -> int:
    artifact = load_artifact(args.artifact)
    out = args.out or args.artifact.with_name(f"plot_{artifact.normalizer.value}.json")
    with output_errors(out):
        emit_plot_data(artifact, out, force=args.force)
    print(f"Wrote {out}")
    return EXIT_OK


def _fmt(v: np.ndarray) -> str:
    return "(" + ", ".join(f"{x:.4f}" for x in v) + ")"


def cmd_demo(args: argparse.Namespace) -> int:
    print("Vector | HoloNorm | Tanh")
    for values in EXAMPLE_VECTORS:
        x = np.array(values)
        print(f"{_fmt(x)} | {_fmt(holonorm(x))} | {_fmt(tanh_normalize(x))}")

    print("\nPairwise cosine before -> after (holonorm, tanh)")
    vecs = [np.array(v) for v in EXAMPLE_VECTORS]
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            x, y = vecs[i], vecs[j]
            print(
                f"{_fmt(x)} . {_fmt(y)}: {cosine(x, y):+.4f} -> "
                f"{cosine(holonorm(x), holonorm(y)):+.4f}, {cosine(tanh_normalize(x), tanh_normalize(y)):+.4f}"
            )

    before, after_tanh, after_hn = orthogonality_destruction_demo(vecs[0], vecs[1])
    print(f"\nOrthogonal pair inner product: before={before:.4f} tanh={after_tanh:.4f} holonorm={after_hn:.4f}")
    return EXIT_OK


COMMANDS = {
    "gen-data": cmd_gen_data,
    "run": cmd_run,
    "compare": cmd_compare,
    "table": cmd_table,
    "plot-data": cmd_plot_data,
    "demo": cmd_demo,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        logger.error(f"Config error: {exc}")
        return EXIT_CONFIG
    except (OutputExistsError, OutputWriteError) as exc:
        logger.error(f"Output error: {exc}")
        return EXIT_RUNTIME
    except (DataError, OSError) as exc:
        # read side: datasets, configs and artifacts
        logger.error(f"Data error: {exc}")
        return EXIT_DATA
    except Exception as exc:
        logger.error(f"Run failed: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
