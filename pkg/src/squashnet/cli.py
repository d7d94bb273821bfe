"""Command-line experiment runner.

Exit codes: 0 success, 2 configuration error, 3 training divergence,
4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .datasets import (
    FOUR_LINE_DEFAULT,
    TWO_LINE_DEFAULT,
    IdxFormatError,
    dataset_to_csv,
    gen_circle,
    gen_gaussian,
    gen_halfplane_region,
    gen_spiral,
)
from .experiments import (
    ConfigError,
    DEFAULT_BENCHMARK_ACTIVATIONS,
    ExperimentConfig,
    load_benchmark_data,
    run_activation_benchmark,
    run_gate_experiment,
    run_toy_experiment,
)
from .nn import DivergenceError
from .report import ExperimentReport, emit_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squashnet",
        description="Squashing-activation experiments: toy replications, "
                    "activation benchmark, and nilpotent gate networks.",
    )
    parser.add_argument("--seed", type=int, default=None, help="run seed (default 0)")
    parser.add_argument("--out", default=None, help="output directory (default runs/)")
    parser.add_argument("--config", default=None, help="JSON config file; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-data", help="generate a dataset and write it as CSV")
    gen.add_argument("dataset",
                     choices=["gaussian", "circle", "spiral", "two-line", "four-line"])
    gen.add_argument("--n", type=int, default=None,
                     help="points per class (total points for the region datasets)")

    toy = sub.add_parser("toy", help="run one toy replication experiment")
    toy.add_argument("which", choices=["gaussian", "circle", "spiral"])

    bench = sub.add_parser("bench", help="activation comparison on an IDX dataset")
    bench.add_argument("--data-dir", default=None, help="directory with the IDX files")
    bench.add_argument("--train-limit", type=int, default=None)
    bench.add_argument("--test-limit", type=int, default=None)
    bench.add_argument("--activations", default=None, help="comma-separated names")

    gates = sub.add_parser("gates", help="inequality + frozen-AND-gate experiment")
    gates.add_argument("which", choices=["two-line", "four-line"])
    gates.add_argument("--activation", default=None,
                       choices=["squashing", "relu", "sigmoid", "tanh"])

    rep = sub.add_parser("report", help="re-emit CSV/SVG from a saved report JSON")
    rep.add_argument("report_json")
    rep.add_argument("--formats", default=None, help="comma-separated: csv,json,svg")
    return parser


def _load_config(args) -> ExperimentConfig:
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{args.config}: top level must be a JSON object")
        config = ExperimentConfig.from_json_dict(raw)
    else:
        config = ExperimentConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.out_dir = args.out
    return config


def _formats(config: ExperimentConfig):
    return tuple(config.formats) if config.formats else ("csv", "json", "svg")


def _cmd_gen_data(args, config: ExperimentConfig) -> int:
    seed = config.seed
    name = args.dataset
    if name == "gaussian":
        data = gen_gaussian(args.n or config.n_per_class or 250, seed)
    elif name == "circle":
        data = gen_circle(args.n or config.n_per_class or 250, seed)
    elif name == "spiral":
        data = gen_spiral(
            args.n or config.n_per_class or 250,
            turns=config.turns or 1.75,
            noise=config.noise if config.noise is not None else 0.1,
            seed=seed,
        )
    else:
        lines = TWO_LINE_DEFAULT if name == "two-line" else FOUR_LINE_DEFAULT
        data = gen_halfplane_region(lines, n=args.n or config.n_points or 500, seed=seed)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = dataset_to_csv(data, out_dir / f"{name}_seed{seed}.csv")
    print(f"wrote {path} ({len(data)} points, {data.n_classes} classes)")
    return EXIT_OK


def _cmd_toy(args, config: ExperimentConfig) -> int:
    report = run_toy_experiment(
        args.which,
        seed=config.seed,
        epochs=config.epochs,
        learning_rate=config.learning_rate,
        batch_size=config.batch_size,
        beta0=config.beta0,
        n_per_class=config.n_per_class or 250,
        test_fraction=config.test_fraction or 0.2,
        noise=config.noise,
        turns=config.turns,
    )
    paths = emit_report(report, config.out_dir, f"toy_{args.which}_seed{config.seed}",
                        _formats(config))
    final = report.final
    print(f"toy {args.which} seed {config.seed}: "
          f"train_acc={final.train_acc:.4f} test_acc={final.test_acc:.4f} "
          f"train_loss={final.train_loss:.4f} betas={final.betas}")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_gates(args, config: ExperimentConfig) -> int:
    which = args.which.replace("-", "_")
    result = run_gate_experiment(
        which,
        seed=config.seed,
        activation=args.activation or config.activation or "squashing",
        epochs=config.epochs,
        learning_rate=config.learning_rate,
        beta_layer1=config.beta_layer1,
        beta_gate=config.beta_gate,
        n_points=config.n_points or 500,
        test_fraction=config.test_fraction or 0.2,
    )
    basename = f"gates_{which}_seed{config.seed}"
    paths = emit_report(result.report, config.out_dir, basename, _formats(config))
    if result.explanation is not None:
        out_dir = Path(config.out_dir)
        txt = out_dir / f"{basename}_explanation.txt"
        txt.write_text(result.explanation.to_text() + "\n")
        js = out_dir / f"{basename}_explanation.json"
        js.write_text(result.explanation.to_json())
        paths += [txt, js]
    final = result.report.final
    print(f"gates {which} seed {config.seed}: "
          f"train_acc={final.train_acc:.4f} test_acc={final.test_acc:.4f} "
          f"betas={final.betas}")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_bench(args, config: ExperimentConfig) -> int:
    data_dir = args.data_dir or config.data_dir
    if not data_dir:
        raise ConfigError("bench requires --data-dir (or data_dir in the config file)")
    train_data, test_data = load_benchmark_data(
        data_dir,
        train_limit=args.train_limit if args.train_limit is not None
        else (config.train_limit if config.train_limit is not None else 6000),
        test_limit=args.test_limit if args.test_limit is not None
        else (config.test_limit if config.test_limit is not None else 1000),
        seed=config.seed,
    )
    if args.activations:
        activations = tuple(s.strip() for s in args.activations.split(",") if s.strip())
    elif config.activations:
        activations = tuple(config.activations)
    else:
        activations = DEFAULT_BENCHMARK_ACTIVATIONS
    reports = run_activation_benchmark(
        train_data, test_data,
        activations=activations,
        epochs=config.epochs or 10,
        learning_rate=config.learning_rate or 1e-4,
        batch_size=config.batch_size if config.batch_size is not None else 32,
        seed=config.seed,
        beta0=config.beta0 if config.beta0 is not None else 0.1,
    )
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = ["activation,final_train_acc,final_test_acc,final_train_loss,final_test_loss,total_seconds"]
    for name, report in reports.items():
        emit_report(report, out_dir, f"bench_{name}_seed{config.seed}", _formats(config))
        final = report.final
        total = sum(r.seconds for r in report.records)
        summary.append(
            f"{name},{final.train_acc!r},{final.test_acc!r},"
            f"{final.train_loss!r},{final.test_loss!r},{total!r}"
        )
        print(f"bench {name}: train_acc={final.train_acc:.4f} test_acc={final.test_acc:.4f}")
    summary_path = out_dir / f"bench_summary_seed{config.seed}.csv"
    summary_path.write_text("\n".join(summary) + "\n")
    print(f"wrote {summary_path}")
    return EXIT_OK


def _cmd_report(args, config: ExperimentConfig) -> int:
    path = Path(args.report_json)
    try:
        report = ExperimentReport.from_json(path.read_text())
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: not a valid report file ({exc})") from None
    formats = tuple(s.strip() for s in (args.formats or "csv,svg").split(",") if s.strip())
    try:
        paths = emit_report(report, config.out_dir, path.stem, formats)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for out in paths:
        print(f"wrote {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args)
        if args.command == "gen-data":
            return _cmd_gen_data(args, config)
        if args.command == "toy":
            return _cmd_toy(args, config)
        if args.command == "gates":
            return _cmd_gates(args, config)
        if args.command == "bench":
            return _cmd_bench(args, config)
        if args.command == "report":
            return _cmd_report(args, config)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (OSError, IdxFormatError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
