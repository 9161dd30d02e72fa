"""Command-line interface for the simulation/detection pipeline.

Exit codes: 0 success, 2 usage error (bad flags, missing files),
3 data/schema error (unparseable or inconsistent inputs), 4 numerical
failure (diverging simulation, exhausted generation budget).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dataset as dataset_mod
from . import ml
from ._svg import confusion_heatmap
from .attacks import LABEL_NAMES
from .dataset import FormatError, GenerationExhausted
from .evaluation import UnknownFormat, report_render
from .features import FeatureMatrix, LengthError, extract_matrix
from .ml import DimensionMismatch, UnknownModelFormat
from .ml.serialize import model_tag
from .pipeline import (CLASSIFIER_ORDER, ConfigError, PipelineConfig,
                       RunManifest, evaluate_model, load_config_file,
                       load_scenario_file, report_json_payload, run_bench,
                       write_trajectory_artifacts)
from .selection import DegenerateLabels, SelectionMask, apply_mask, fit_mask
from .simulation import NonFiniteStateError, simulate

_USAGE_ERRORS = (FileNotFoundError, IsADirectoryError, NotADirectoryError)
_DATA_ERRORS = (ConfigError, FormatError, UnknownModelFormat,
                DimensionMismatch, UnknownFormat, DegenerateLabels,
                LengthError, ValueError)
_NUMERIC_ERRORS = (NonFiniteStateError, GenerationExhausted,
                   FloatingPointError, OverflowError)


def _load_pipeline_config(args) -> PipelineConfig:
    seed = getattr(args, "seed", None)
    if args.config is not None:
        return load_config_file(args.config, seed_override=seed)
    config = PipelineConfig()
    if seed is None:
        return config
    ds = dataset_mod.DatasetConfig(
        class_counts=config.dataset.class_counts, seed=int(seed),
        ranges=config.dataset.ranges, params=config.dataset.params,
        sim=config.dataset.sim)
    return PipelineConfig(dataset=ds, fdr_q=config.fdr_q,
                          train_fraction=config.train_fraction,
                          classifier_overrides=config.classifier_overrides)


def cmd_simulate(args) -> int:
    config = _load_pipeline_config(args)
    scenario = load_scenario_file(args.scenario)
    trajectory = simulate(config.dataset.params, config.dataset.sim, scenario)
    paths = write_trajectory_artifacts(trajectory, args.out)
    for path in paths:
        print(f"wrote {path}")
    return 0


def cmd_gen_dataset(args) -> int:
    config = _load_pipeline_config(args)
    data = dataset_mod.generate_dataset(config.dataset)
    out_dir = Path(args.out)
    dataset_mod.save(data, out_dir)
    manifest = RunManifest(seed=config.seed,
                           config_digest=config.dataset.digest())
    for name in ("meta.json", "samples.csv"):
        manifest.record(out_dir, name)
    manifest.unhashed = ["manifest.json", "timings.txt"]
    manifest.write(out_dir)
    print(f"wrote {out_dir}/meta.json, samples.csv, manifest.json "
          f"({len(data.samples)} samples)")
    return 0


def cmd_featurize(args) -> int:
    data = dataset_mod.load(args.dataset)
    matrix = extract_matrix(data)
    matrix.to_csv(args.out)
    print(f"wrote {args.out} ({len(matrix.labels)} rows x "
          f"{matrix.values.shape[1]} features)")
    return 0


def cmd_select(args) -> int:
    matrix = FeatureMatrix.from_csv(args.train)
    mask = fit_mask(matrix, q=args.fdr_q)
    mask.save(args.out)
    print(f"wrote {args.out} ({len(mask.kept_indices)} of "
          f"{len(mask.names)} features kept at q={args.fdr_q:g})")
    return 0


def cmd_train(args) -> int:
    config = _load_pipeline_config(args)
    matrix = FeatureMatrix.from_csv(args.train)
    mask = SelectionMask.load(args.mask)
    selected = apply_mask(mask, matrix)
    model = ml.train_classifier(args.classifier, selected.values,
                                selected.labels,
                                config=config.classifier_config(args.classifier),
                                seed=config.seed)
    ml.save_model(model, args.out)
    print(f"wrote {args.out} ({args.classifier} on "
          f"{len(selected.labels)} rows)")
    return 0


def cmd_evaluate(args) -> int:
    model = ml.load_model(args.model)
    matrix = FeatureMatrix.from_csv(args.test)
    mask = SelectionMask.load(args.mask)
    cm, report = evaluate_model(model, matrix, mask)

    out = Path(args.out)
    tag = model_tag(model)
    with open(out, "w") as fh:
        json.dump(report_json_payload(tag, report), fh, indent=1,
                  sort_keys=True)
        fh.write("\n")
    csv_path = out.with_suffix(".csv")
    csv_path.write_text(report_render(report, "csv"))
    svg_path = out.with_name(out.stem + "_confusion.svg")
    svg_path.write_text(confusion_heatmap(
        report.percent_matrix, LABEL_NAMES,
        title=f"{tag}: row-normalized confusion (%)"))

    sys.stdout.write(report_render(report, args.format))
    for path in (out, csv_path, svg_path):
        print(f"wrote {path}")
    return 0


def cmd_bench(args) -> int:
    config = _load_pipeline_config(args)
    out_dir = Path(args.out)
    manifest = run_bench(config, out_dir)
    print(f"wrote {len(manifest.artifacts) + len(manifest.unhashed)} files "
          f"under {out_dir} (seed {manifest.seed}, "
          f"config {manifest.config_digest})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agcdetect",
        description="Two-area AGC simulation and measurement-attack "
                    "detection pipeline.",
        epilog="exit codes: 0 success, 2 usage error, 3 data/schema error, "
               "4 numerical failure")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_seed(p):
        p.add_argument("--config", default=None,
                       help="pipeline config file (JSON); defaults used "
                            "when omitted")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")

    p = sub.add_parser("simulate",
                       help="run one scenario, write trajectory CSV + SVG")
    add_config_seed(p)
    p.add_argument("--scenario", required=True,
                   help="scenario file (JSON)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-dataset",
                       help="generate the labeled dataset directory")
    add_config_seed(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("featurize",
                       help="extract the feature matrix from a dataset")
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--out", required=True, help="output feature CSV")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("select",
                       help="fit the FDR feature-selection mask")
    p.add_argument("--train", required=True, help="training feature CSV")
    p.add_argument("--fdr-q", type=float, default=0.05,
                   help="FDR level (default 0.05)")
    p.add_argument("--out", required=True, help="output mask JSON")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("train", help="train one classifier")
    add_config_seed(p)
    p.add_argument("--train", required=True, help="training feature CSV")
    p.add_argument("--mask", required=True, help="selection mask JSON")
    p.add_argument("--classifier", required=True, choices=CLASSIFIER_ORDER)
    p.add_argument("--out", required=True, help="output model JSON")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate",
                       help="evaluate a model, write report + heatmap")
    p.add_argument("--model", required=True, help="model JSON")
    p.add_argument("--test", required=True, help="test feature CSV")
    p.add_argument("--mask", required=True, help="selection mask JSON")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--format", choices=("json", "csv", "table"),
                   default="table", help="stdout render format")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench",
                       help="full pipeline over all six classifiers")
    add_config_seed(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
