"""Command-line entry point.

Subcommands:
  train --config FILE --seed N --out DIR [--dump-mix FILE]
  eval  --checkpoint FILE --config FILE --out DIR
  grid  --checkpoint FILE --bounds xmin,xmax,ymin,ymax --res N --out FILE [--score KIND]
  sweep --config FILE --methods LIST --k LIST --seeds LIST --out DIR

Exit codes: 0 success, 2 configuration error, 3 training divergence,
1 any other failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .errors import ConfigError, OodLabError, TrainingDivergenceError
from .harness import (
    SWEEP_METHODS,
    default_config,
    evaluate,
    export_score_grid,
    load_config,
    make_datasets,
    run_experiment,
    run_sweep,
    write_report_csv,
)
from .nn import forward, load_checkpoint
from .oodcore import SCORE_KINDS, score_rows, write_scores_csv

__all__ = ["main"]


def _load_base_config(path):
    return default_config() if path is None else load_config(path)


def _parse_int_list(text: str, flag: str):
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"{flag}: expected a comma-separated integer list, got {text!r}") from exc


def _parse_bounds(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"--bounds: expected xmin,xmax,ymin,ymax, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"--bounds: non-numeric bound in {text!r}") from exc


def _cmd_train(args) -> int:
    config = _load_base_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    hook = None
    captured = {}
    if args.dump_mix is not None:
        def hook(t, model, outliers, scores, mixed):
            if t == 0 and mixed is not None:
                captured["batch"] = mixed

    _, result = run_experiment(config, out_dir=args.out, hook=hook)
    if args.dump_mix is not None and "batch" in captured:
        mixed = captured["batch"]
        with open(args.dump_mix, "w", encoding="utf-8") as fh:
            fh.write("i,j,lambda,x,y\n")
            for i, j, lam, (x, y) in zip(
                mixed.index_i, mixed.index_j, mixed.lam, mixed.points
            ):
                fh.write(f"{int(i)},{int(j)},{float(lam)!r},{float(x)!r},{float(y)!r}\n")
    agg = result.aggregate
    print(
        f"trained seed={config.seed} k={config.data.aux_k} mix={config.mix.kind}: "
        f"fpr95={agg.fpr95:.4f} auroc={agg.auroc:.4f} aupr={agg.aupr:.4f} "
        f"id_acc={agg.id_acc:.4f} gamma={agg.gamma:.4f} ({result.wall_ms:.0f} ms)"
    )
    print(f"wrote checkpoint.bin, history.csv, report.csv to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    config = _load_base_config(args.config)
    model = load_checkpoint(args.checkpoint)
    data = make_datasets(config)
    result = evaluate(model, data.id_test, [data.ood_test], config.score_kind, config.tpr_target)
    os.makedirs(args.out, exist_ok=True)
    write_report_csv(os.path.join(args.out, "report.csv"), result)
    id_scores = score_rows(forward(model, data.id_test.points), config.score_kind)
    ood_scores = score_rows(forward(model, data.ood_test.points), config.score_kind)
    write_scores_csv(os.path.join(args.out, "scores.csv"), id_scores, ood_scores)
    agg = result.aggregate
    print(
        f"evaluated {args.checkpoint}: fpr95={agg.fpr95:.4f} auroc={agg.auroc:.4f} "
        f"aupr={agg.aupr:.4f} id_acc={agg.id_acc:.4f} gamma={agg.gamma:.4f}"
    )
    print(f"wrote report.csv, scores.csv to {args.out}")
    return 0


def _cmd_grid(args) -> int:
    model = load_checkpoint(args.checkpoint)
    bounds = _parse_bounds(args.bounds)
    export_score_grid(model, args.score, bounds, args.res, args.out)
    print(f"wrote {args.res}x{args.res} {args.score} score grid to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    config = _load_base_config(args.config)
    methods = [m for m in args.methods.split(",") if m.strip() != ""]
    k_levels = _parse_int_list(args.k, "--k") if args.k else []
    seeds = _parse_int_list(args.seeds, "--seeds")
    rows = run_sweep(config, methods, k_levels, seeds, out_dir=args.out)
    for row in rows:
        if row["status"] == "ok":
            print(
                f"{row['method']} k={row['k']} seed={row['seed']}: "
                f"fpr95={row['fpr95']:.4f} auroc={row['auroc']:.4f}"
            )
        else:
            print(f"{row['method']} k={row['k']} seed={row['seed']}: {row['status']}")
    print(f"wrote {len(rows)} rows to {os.path.join(args.out, 'results.csv')}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oodlab",
        description="Train and evaluate small OOD detectors on a synthetic 2-D benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="one training run: checkpoint, history, report")
    p_train.add_argument("--config", default=None, help="JSON config file (defaults used when omitted)")
    p_train.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_train.add_argument("--out", required=True, help="output directory")
    p_train.add_argument("--dump-mix", default=None, help="also write the first mixed outlier batch as CSV")
    p_train.set_defaults(func=_cmd_train)

    p_eval = sub.add_parser("eval", help="metrics for an existing checkpoint")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--config", default=None, help="JSON config file (defaults used when omitted)")
    p_eval.add_argument("--out", required=True, help="output directory")
    p_eval.set_defaults(func=_cmd_eval)

    p_grid = sub.add_parser("grid", help="score heatmap lattice over a bounding box")
    p_grid.add_argument("--checkpoint", required=True)
    p_grid.add_argument("--bounds", required=True, help="xmin,xmax,ymin,ymax")
    p_grid.add_argument("--res", required=True, type=int, help="lattice points per axis (>= 2)")
    p_grid.add_argument("--out", required=True, help="output CSV file")
    p_grid.add_argument("--score", default="energy", choices=SCORE_KINDS)
    p_grid.set_defaults(func=_cmd_grid)

    p_sweep = sub.add_parser("sweep", help="method x diversity x seed grid, one results.csv")
    p_sweep.add_argument("--config", default=None, help="JSON base config (defaults used when omitted)")
    p_sweep.add_argument(
        "--methods",
        required=True,
        help=f"comma-separated tokens from {', '.join(SWEEP_METHODS)}; a token may pin its diversity level as name@k",
    )
    p_sweep.add_argument("--k", default=None, help="comma-separated diversity levels for unpinned methods")
    p_sweep.add_argument("--seeds", required=True, help="comma-separated seeds")
    p_sweep.add_argument("--out", required=True, help="output directory for results.csv")
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TrainingDivergenceError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return 3
    except (OodLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
