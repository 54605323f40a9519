"""Command-line entry point.

Subcommands:
  extract  --config cfg.json            write features.csv
  run      --config cfg.json            full run: report.json, CSVs, figures
  synth    --spec spec.json --out dir   synthetic recordings + ground truth

Exit codes: 0 ok, 2 I/O error, 3 validation/data error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (ConfigError, ConvergenceFailure, EdaBenchError,
                     MissingFile, UnstableDesign)
from .ingest import write_plain
from .pipeline import (ExperimentConfig, build_feature_matrix,
                       class_names_for, run_experiment)
from . import report as report_mod
from . import synth as synth_mod
from .ingest import load_manifest

EXIT_IO = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _load_config(args) -> ExperimentConfig:
    try:
        config = ExperimentConfig.load(args.config)
    except FileNotFoundError as exc:
        _fail(EXIT_IO, f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        _fail(EXIT_DATA, f"config {args.config}: invalid JSON ({exc})")
    if args.seed is not None:
        config.seed = args.seed
        for m in config.models:
            object.__setattr__(m, "seed", args.seed)
        for s in config.cv:
            if s.kind == "stratified_kfold":
                object.__setattr__(s, "seed", args.seed)
    if getattr(args, "no_plots", False):
        config.plots = False
    return config


def _fail(code: int, message: str):
    print(f"error: {message}", file=sys.stderr)
    sys.exit(code)


def cmd_extract(args) -> int:
    config = _load_config(args)
    manifest = load_manifest(config.manifest_path)
    matrix = build_feature_matrix(manifest, config.experiment,
                                  config.sample_rate_hz)
    out = config.output_dir / "features.csv"
    report_mod.write_features_output(matrix,
                                     class_names_for(config.experiment), out)
    print(f"wrote {out} ({len(matrix.labels)} observations)")
    return 0


def cmd_run(args) -> int:
    config = _load_config(args)
    run = run_experiment(config)
    report_mod.write_run_outputs(run, config.output_dir, plots=config.plots)
    print(f"wrote {config.output_dir}/report.json "
          f"({run['n_observations']} observations, "
          f"{len(run['results'])} models)")
    return 0


def cmd_synth(args) -> int:
    try:
        spec = synth_mod.load_spec(args.spec)
    except FileNotFoundError as exc:
        _fail(EXIT_IO, f"cannot read spec: {exc}")
    except json.JSONDecodeError as exc:
        _fail(EXIT_DATA, f"spec {args.spec}: invalid JSON ({exc})")
    if args.seed is not None:
        spec = synth_mod.SynthSpec(
            duration_s=spec.duration_s, fs_hz=spec.fs_hz,
            baseline_level=spec.baseline_level, drift_slope=spec.drift_slope,
            events=spec.events, noise_sd=spec.noise_sd, seed=args.seed)
    truth = synth_mod.generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rec_path = out / f"{truth.recording.subject_id}.txt"
    write_plain(truth.recording, rec_path)
    (out / f"{truth.recording.subject_id}_truth.json").write_text(
        json.dumps(synth_mod.truth_to_dict(truth), indent=2, sort_keys=True)
        + "\n")
    print(f"wrote {rec_path} ({len(truth.peak_times_s)} events)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edabench",
        description="EDA-only activity-state classification pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p_extract = sub.add_parser("extract", help="extract the feature matrix")
    p_extract.add_argument("--config", required=True)
    p_extract.add_argument("--seed", type=int, default=None)
    p_extract.set_defaults(func=cmd_extract)

    p_run = sub.add_parser("run", help="run the full experiment")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--jobs", type=int, default=1,
                       help="accepted for interface compatibility; "
                            "execution is sequential and order-fixed")
    p_run.add_argument("--no-plots", action="store_true",
                       help="skip figure rendering, emit data files only")
    p_run.set_defaults(func=cmd_run)

    p_synth = sub.add_parser("synth", help="generate synthetic recordings")
    p_synth.add_argument("--spec", required=True)
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--seed", type=int, default=None)
    p_synth.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MissingFile, OSError) as exc:
        _fail(EXIT_IO, str(exc))
    except (ConvergenceFailure, UnstableDesign) as exc:
        _fail(EXIT_NUMERIC, str(exc))
    except (ConfigError, EdaBenchError, ValueError) as exc:
        _fail(EXIT_DATA, str(exc))


if __name__ == "__main__":
    sys.exit(main())
