"""End-to-end pipeline configuration and the benchmark orchestrator.

A single JSON config file drives every stage.  All sections are optional
and partial; anything omitted falls back to the defaults that reproduce
the reference protocol:

    {
      "seed": 7,
      "dataset": {
        "class_counts": [200, 700, 700, 800],
        "ranges":     { ...ScenarioRanges fields... },
        "plant":      { ...AgcParameters fields... },
        "simulation": { "dt": 0.005, "horizon": 80.0, "measurement_rate": 10.0 }
      },
      "selection": { "fdr_q": 0.05 },
      "split":     { "train_fraction": 0.8 },
      "classifiers": { "rf": { "n_trees": 500 }, ... }
    }

The benchmark writes every artifact under one output directory and records
them in a manifest; apart from wall-clock timings (kept in their own file)
all artifacts are byte-deterministic in the config and seed.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import dataset as dataset_mod
from . import ml
from ._svg import confusion_heatmap, line_plot
from .attacks import LABEL_NAMES, Scenario
from .dataset import DatasetConfig, ScenarioRanges
from .evaluation import METRIC_FIELDS, confusion, format_2dec, metrics
from .features import extract_matrix
from .selection import apply_mask, fit_mask
from .simulation import AgcParameters, SimulationConfig

CLASSIFIER_ORDER = ("dt", "rf", "gnb", "knn", "svm", "gbt")

RESULTS_HEADER = "classifier," + ",".join(METRIC_FIELDS)


class ConfigError(ValueError):
    """Config or scenario file failed to parse or validate."""


def _read_json(path) -> dict:
    path = Path(path)
    text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, "
            f"column {exc.colno}: {exc.msg}") from exc


def _merged(section_name: str, defaults: dict, overrides: dict) -> dict:
    unknown = set(overrides) - set(defaults)
    if unknown:
        raise ConfigError(
            f"unknown {section_name} keys: {sorted(unknown)} "
            f"(known: {sorted(defaults)})")
    out = dict(defaults)
    out.update(overrides)
    return out


@dataclass(frozen=True)
class PipelineConfig:
    """Dataset generation plus selection/split/classifier settings."""

    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    fdr_q: float = 0.05
    train_fraction: float = 0.8
    classifier_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.fdr_q < 1.0:
            raise ConfigError("selection.fdr_q must lie in (0, 1)")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("split.train_fraction must lie in (0, 1)")
        for tag in self.classifier_overrides:
            if tag not in CLASSIFIER_ORDER:
                raise ConfigError(f"unknown classifier tag in config: {tag!r}")

    @property
    def seed(self) -> int:
        return self.dataset.seed

    def classifier_config(self, tag: str):
        base = ml.default_config(tag).to_dict()
        merged = _merged(f"classifiers.{tag}", base,
                         self.classifier_overrides.get(tag, {}))
        return type(ml.default_config(tag)).from_dict(merged)

    def to_dict(self) -> dict:
        return {"dataset": self.dataset.to_dict(), "fdr_q": self.fdr_q,
                "train_fraction": self.train_fraction,
                "classifiers": self.classifier_overrides}

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def parse_config(raw: dict, seed_override=None) -> PipelineConfig:
    """Build a PipelineConfig from a parsed config-file dict."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    known = {"seed", "dataset", "selection", "split", "classifiers"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)} "
                          f"(known: {sorted(known)})")

    seed = raw.get("seed", DatasetConfig().seed)
    if seed_override is not None:
        seed = seed_override
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an integer, got {seed!r}")

    ds_raw = dict(raw.get("dataset", {}))
    unknown = set(ds_raw) - {"class_counts", "ranges", "plant", "simulation"}
    if unknown:
        raise ConfigError(f"unknown dataset keys: {sorted(unknown)}")
    try:
        ranges = ScenarioRanges.from_dict(_merged(
            "dataset.ranges", ScenarioRanges().to_dict(),
            ds_raw.get("ranges", {})))
        params = AgcParameters.from_dict(_merged(
            "dataset.plant", AgcParameters().to_dict(),
            ds_raw.get("plant", {})))
        sim = SimulationConfig.from_dict(_merged(
            "dataset.simulation", SimulationConfig().to_dict(),
            ds_raw.get("simulation", {})))
        counts = ds_raw.get("class_counts", list(DatasetConfig().class_counts))
        ds_config = DatasetConfig(class_counts=tuple(counts), seed=seed,
                                  ranges=ranges, params=params, sim=sim)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid dataset section: {exc}") from exc

    selection = _merged("selection", {"fdr_q": 0.05},
                        raw.get("selection", {}))
    split = _merged("split", {"train_fraction": 0.8}, raw.get("split", {}))
    classifiers = raw.get("classifiers", {})
    if not isinstance(classifiers, dict):
        raise ConfigError("classifiers section must be an object")

    config = PipelineConfig(dataset=ds_config,
                            fdr_q=float(selection["fdr_q"]),
                            train_fraction=float(split["train_fraction"]),
                            classifier_overrides=classifiers)
    for tag in classifiers:
        config.classifier_config(tag)   # validate override keys eagerly
    return config


def load_config_file(path, seed_override=None) -> PipelineConfig:
    return parse_config(_read_json(path), seed_override=seed_override)


def load_scenario_file(path) -> Scenario:
    raw = _read_json(path)
    try:
        return Scenario.from_dict(raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: invalid scenario: {exc}") from exc


@dataclass
class RunManifest:
    """Record of one benchmark run: seed, config digest, artifact hashes.

    ``timings`` (stage -> seconds) is carried separately from the hashed
    artifact list so that a manifest of a rerun with the same seed is
    byte-identical.
    """

    seed: int
    config_digest: str
    artifacts: dict = field(default_factory=dict)   # rel path -> sha256
    unhashed: list = field(default_factory=list)    # rel paths, not compared
    timings: dict = field(default_factory=dict)

    def record(self, out_dir: Path, rel_path: str) -> None:
        blob = (Path(out_dir) / rel_path).read_bytes()
        self.artifacts[rel_path] = hashlib.sha256(blob).hexdigest()

    def to_dict(self) -> dict:
        return {"seed": self.seed, "config_digest": self.config_digest,
                "artifacts": dict(sorted(self.artifacts.items())),
                "unhashed": sorted(self.unhashed)}

    def write(self, out_dir) -> None:
        out_dir = Path(out_dir)
        with open(out_dir / "manifest.json", "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")
        lines = [f"{stage} {seconds:.3f}s"
                 for stage, seconds in self.timings.items()]
        (out_dir / "timings.txt").write_text("\n".join(lines) + "\n")


def write_trajectory_artifacts(trajectory, csv_path) -> list:
    """Trajectory CSV plus an SVG of the three measured channels."""
    csv_path = Path(csv_path)
    trajectory.to_csv(csv_path)
    svg_path = csv_path.with_suffix(".svg")
    times = trajectory.times
    series = {"f1 (Hz)": trajectory.measured_delta_f1,
              "f2 (Hz)": trajectory.measured_delta_f2,
              "ptie (pu)": trajectory.measured_delta_Ptie}
    svg = line_plot(times, series, title="measured channel deviations",
                    y_label="deviation")
    svg_path.write_text(svg)
    return [csv_path, svg_path]


def evaluate_model(model, test_matrix, mask):
    """Confusion + metrics of a trained model on a (full) feature matrix."""
    selected = apply_mask(mask, test_matrix)
    predictions = ml.predict(model, selected.values)
    cm = confusion(selected.labels, predictions)
    return cm, metrics(cm)


def report_json_payload(tag, report) -> dict:
    payload = {"classifier": tag}
    payload.update({name: float(format_2dec(getattr(report, name)))
                    for name in METRIC_FIELDS})
    payload["percent_matrix"] = [[float(format_2dec(v)) for v in row]
                                 for row in report.percent_matrix]
    payload["class_names"] = list(LABEL_NAMES)
    if report.notes:
        payload["notes"] = list(report.notes)
    return payload


def results_csv_text(rows) -> str:
    """Combined summary-table CSV: one row per classifier."""
    lines = [RESULTS_HEADER]
    for tag, report in rows:
        lines.append(tag + "," + ",".join(
            format_2dec(getattr(report, name)) for name in METRIC_FIELDS))
    return "\n".join(lines) + "\n"


def run_bench(config: PipelineConfig, out_dir) -> RunManifest:
    """Full pipeline: dataset -> features -> selection -> six classifiers.

    Writes, under ``out_dir``: the dataset, train/test feature matrices,
    the selection mask, per-classifier model/report/heatmap files, the
    combined results.csv, manifest.json, and timings.txt.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(seed=config.seed, config_digest=config.digest())
    clock = time.perf_counter

    def timed(stage, fn):
        start = clock()
        result = fn()
        manifest.timings[stage] = clock() - start
        return result

    full = timed("generate_dataset",
                 lambda: dataset_mod.generate_dataset(config.dataset))
    dataset_mod.save(full, out_dir / "dataset")
    for name in ("meta.json", "samples.csv"):
        manifest.record(out_dir, f"dataset/{name}")

    train_set, test_set = dataset_mod.split(full, config.train_fraction,
                                            seed=config.seed)
    train_matrix = timed("featurize_train", lambda: extract_matrix(train_set))
    test_matrix = timed("featurize_test", lambda: extract_matrix(test_set))
    train_matrix.to_csv(out_dir / "features_train.csv")
    test_matrix.to_csv(out_dir / "features_test.csv")
    manifest.record(out_dir, "features_train.csv")
    manifest.record(out_dir, "features_test.csv")

    mask = timed("select", lambda: fit_mask(train_matrix, q=config.fdr_q))
    mask.save(out_dir / "mask.json")
    manifest.record(out_dir, "mask.json")

    selected_train = apply_mask(mask, train_matrix)
    rows = []
    for tag in CLASSIFIER_ORDER:
        model = timed(f"train_{tag}", lambda: ml.train_classifier(
            tag, selected_train.values, selected_train.labels,
            config=config.classifier_config(tag), seed=config.seed))
        ml.save_model(model, out_dir / f"model_{tag}.json")
        manifest.record(out_dir, f"model_{tag}.json")

        cm, report = timed(f"evaluate_{tag}",
                           lambda: evaluate_model(model, test_matrix, mask))
        rows.append((tag, report))
        with open(out_dir / f"report_{tag}.json", "w") as fh:
            json.dump(report_json_payload(tag, report), fh, indent=1,
                      sort_keys=True)
            fh.write("\n")
        manifest.record(out_dir, f"report_{tag}.json")

        svg = confusion_heatmap(report.percent_matrix, LABEL_NAMES,
                                title=f"{tag}: row-normalized confusion (%)")
        (out_dir / f"confusion_{tag}.svg").write_text(svg)
        manifest.record(out_dir, f"confusion_{tag}.svg")

    (out_dir / "results.csv").write_text(results_csv_text(rows))
    manifest.record(out_dir, "results.csv")

    manifest.unhashed = ["manifest.json", "timings.txt"]
    manifest.write(out_dir)
    return manifest
