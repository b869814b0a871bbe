"""Command-line entry point.

Subcommands: train (models + accuracy table), attack (machine-readable
metric CSVs), report (everything, Markdown included), bench (synonym for
the full end-to-end run). Exit codes: 0 success, 1 config error, 2 data
error, 3 partial cell failure with the report still written.
"""
from __future__ import annotations

import argparse
import sys

from .data import DataError, EncodingError, SplitError
from .harness import (ConfigError, apply_only, emit_reports, load_config,
                      run_benchmark)
from .schema import SchemaError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3

_SCOPES = {"train": "train", "attack": "attack", "report": "full", "bench": "full"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tabattack",
        description="Adversarial-example benchmark over tabular datasets.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("train", "train all configured models and write the accuracy table"),
        ("attack", "run the attack sweep and write metric CSVs"),
        ("report", "full run with Markdown report and case dumps"),
        ("bench", "end-to-end benchmark (same artifacts as report)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default="configs/default.yaml",
                       help="experiment config path")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--jobs", type=int, default=None,
                       help="worker count for attack cells")
        p.add_argument("--only", default=None,
                       help="restrict cells, e.g. dataset=diabetes,model=LR,"
                            "attack=DeepFool")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = _replace(cfg, seed=args.seed)
        if args.out is not None:
            cfg = _replace(cfg, output_dir=args.out)
        if args.jobs is not None:
            cfg = _replace(cfg, parallelism=args.jobs)
        cfg = apply_only(cfg, args.only)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        save_to = None
        if args.command == "train":
            save_to = f"{cfg.output_dir}/models"
        result = run_benchmark(cfg, save_models_to=save_to,
                               train_only=args.command == "train")
        emit_reports(result, cfg.output_dir, scope=_SCOPES[args.command])
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SchemaError, DataError, EncodingError, SplitError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA

    n_err = sum(1 for c in result.attack_cells if c.status == "error")
    n_err += sum(1 for c in result.model_cells if c.error)
    if n_err:
        print(f"{n_err} cell(s) failed; report written to {cfg.output_dir}",
              file=sys.stderr)
        return EXIT_PARTIAL
    print(f"done: {len(result.model_cells)} model cells, "
          f"{sum(1 for c in result.attack_cells if c.status == 'ok')} attack cells, "
          f"report in {cfg.output_dir}")
    return EXIT_OK


def _replace(cfg, **kw):
    from dataclasses import replace
    return replace(cfg, **kw)


if __name__ == "__main__":
    sys.exit(main())
