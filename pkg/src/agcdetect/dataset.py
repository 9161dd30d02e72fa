"""Labeled dataset generation, stratified splitting, and persistence.

A dataset is an ordered list of (trajectory, label, scenario) samples with
class histogram fixed by configuration.  Sample i is produced from an
independent random sub-stream derived from (seed, i), so regeneration is
reproducible regardless of order or parallelism.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .attacks import AttackKind, AttackSpec, Channel, Scenario
from .simulation import (AgcParameters, NonFiniteStateError, SimulationConfig,
                         Trajectory, simulate)

__all__ = [
    "ScenarioRanges",
    "DatasetConfig",
    "Sample",
    "Dataset",
    "GenerationExhausted",
    "FormatError",
    "sample_scenario",
    "generate_dataset",
    "split",
    "save",
    "load",
]

_CHANNEL_FOR_LABEL = {1: Channel.F1, 2: Channel.F2, 3: Channel.PTIE}
_KIND_ORDER = (AttackKind.STEP, AttackKind.RAMP, AttackKind.PULSE,
               AttackKind.SCALING, AttackKind.COMBINED)


class GenerationExhausted(RuntimeError):
    """Raised when a class burns through its redraw budget.

    Signals pathological parameter ranges: almost every drawn scenario
    makes the closed loop blow up.
    """


class FormatError(ValueError):
    """A persisted dataset failed to parse; carries the offending record."""

    def __init__(self, message, record_index=None):
        super().__init__(message)
        self.record_index = record_index


@dataclass(frozen=True)
class ScenarioRanges:
    """Uniform randomization ranges for scenario generation.

    Additive magnitudes and ramp slopes are drawn as a uniform magnitude
    with an independent fair sign; scale factors likewise.
    """

    load_magnitude: tuple[float, float] = (0.02, 0.06)   # pu
    load_time: tuple[float, float] = (5.0, 20.0)         # s
    attack_start_gap: float = 2.0                        # s after load_time
    attack_start_max: float = 30.0                       # s
    attack_duration: tuple[float, float] = (20.0, 35.0)  # s
    additive_magnitude: tuple[float, float] = (0.03, 0.2)     # Hz or pu
    ramp_rate: tuple[float, float] = (0.003, 0.015)      # (Hz or pu)/s
    scale_factor: tuple[float, float] = (0.4, 1.2)       # dimensionless

    def __post_init__(self):
        for name in ("load_magnitude", "load_time", "attack_duration",
                     "additive_magnitude", "ramp_rate", "scale_factor"):
            lo, hi = getattr(self, name)
            if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
                raise ValueError(f"{name} range must be ordered and finite")
        if self.attack_start_gap < 0:
            raise ValueError("attack_start_gap must be >= 0")

    def to_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v
                for k, v in self.__dict__.items()}

    @classmethod
    def from_dict(cls, d):
        kwargs = {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}
        return cls(**kwargs)


@dataclass(frozen=True)
class DatasetConfig:
    class_counts: tuple[int, int, int, int] = (200, 700, 700, 800)
    seed: int = 0
    ranges: ScenarioRanges = field(default_factory=ScenarioRanges)
    params: AgcParameters = field(default_factory=AgcParameters)
    sim: SimulationConfig = field(default_factory=SimulationConfig)

    def __post_init__(self):
        if len(self.class_counts) != 4 or any(c < 0 for c in self.class_counts):
            raise ValueError("class_counts must be four non-negative integers")
        object.__setattr__(self, "class_counts", tuple(int(c) for c in self.class_counts))

    def to_dict(self):
        return {"class_counts": list(self.class_counts), "seed": self.seed,
                "ranges": self.ranges.to_dict(), "params": self.params.to_dict(),
                "sim": self.sim.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(class_counts=tuple(d["class_counts"]), seed=d["seed"],
                   ranges=ScenarioRanges.from_dict(d["ranges"]),
                   params=AgcParameters.from_dict(d["params"]),
                   sim=SimulationConfig.from_dict(d["sim"]))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Sample:
    trajectory: Trajectory
    label: int
    scenario: Scenario

    def __post_init__(self):
        if self.label != self.scenario.label:
            raise ValueError("label inconsistent with scenario")

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return (self.label == other.label and self.scenario == other.scenario
                and self.trajectory == other.trajectory)


@dataclass
class Dataset:
    samples: list[Sample]
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.samples)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.samples == other.samples and self.metadata == other.metadata

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=int)

    def histogram(self):
        return tuple(int(c) for c in np.bincount(self.labels, minlength=4)[:4])


def _signed(rng, lo, hi):
    mag = rng.uniform(lo, hi)
    return mag if rng.uniform() < 0.5 else -mag


def sample_scenario(rng: np.random.Generator, class_label: int,
                    ranges: ScenarioRanges | None = None) -> Scenario:
    """Draw one randomized scenario for the given class.

    Draw order is fixed (load area, load magnitude, load time, then the
    attack fields) so that a given stream position always yields the same
    scenario.
    """
    if class_label not in (0, 1, 2, 3):
        raise ValueError("class_label must be in 0..3")
    r = ranges if ranges is not None else ScenarioRanges()
    load_area = 1 if rng.uniform() < 0.5 else 2
    load_magnitude = rng.uniform(*r.load_magnitude)
    load_time = rng.uniform(*r.load_time)
    if class_label == 0:
        return Scenario(load_area=load_area, load_magnitude=load_magnitude,
                        load_time=load_time)

    kind = _KIND_ORDER[rng.integers(len(_KIND_ORDER))]
    start_t = rng.uniform(load_time + r.attack_start_gap, r.attack_start_max)
    duration = rng.uniform(*r.attack_duration)
    magnitude = _signed(rng, *r.additive_magnitude)
    ramp_rate = _signed(rng, *r.ramp_rate)
    scale_factor = _signed(rng, *r.scale_factor)

    kw = {}
    if kind in (AttackKind.PULSE, AttackKind.STEP):
        kw["magnitude"] = magnitude
    if kind in (AttackKind.RAMP, AttackKind.COMBINED):
        kw["ramp_rate"] = ramp_rate
    if kind in (AttackKind.SCALING, AttackKind.COMBINED):
        kw["scale_factor"] = scale_factor
    if kind is not AttackKind.STEP:
        kw["duration"] = duration
    attack = AttackSpec(kind=kind, target=_CHANNEL_FOR_LABEL[class_label],
                        start_time=start_t, **kw)
    return Scenario(load_area=load_area, load_magnitude=load_magnitude,
                    load_time=load_time, attack=attack)


def _labels_in_order(class_counts):
    out = []
    for label, count in enumerate(class_counts):
        out.extend([label] * count)
    return out


def generate_dataset(config: DatasetConfig) -> Dataset:
    """Simulate one sample per configured scenario slot.

    Sample i uses the sub-stream SeedSequence([seed, i]); scenarios whose
    simulation leaves the finite range are redrawn from the same stream.
    Redraw counts land in the metadata.  Raises GenerationExhausted when a
    class needs more than 10x its count in redraws.
    """
    labels = _labels_in_order(config.class_counts)
    samples = []
    redraws = [0, 0, 0, 0]
    budget = [10 * c for c in config.class_counts]
    for i, label in enumerate(labels):
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, i]))
        while True:
            scenario = sample_scenario(rng, label, config.ranges)
            try:
                traj = simulate(config.params, config.sim, scenario)
                break
            except NonFiniteStateError:
                redraws[label] += 1
                if redraws[label] > budget[label]:
                    raise GenerationExhausted(
                        f"class {label}: more than {budget[label]} redraws; "
                        f"parameter ranges look pathological") from None
        samples.append(Sample(trajectory=traj, label=label, scenario=scenario))
    meta = {"seed": config.seed, "config": config.to_dict(),
            "config_digest": config.digest(),
            "histogram": list(config.class_counts), "redraws": redraws}
    return Dataset(samples=samples, metadata=meta)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def split(dataset: Dataset, train_fraction: float, seed: int):
    """Stratified shuffle split; train gets round(fraction * n_c) per class.

    Within each class the sample order is shuffled by the seed; the split
    is a partition (disjoint union) of the input, each side in original
    index order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    labels = dataset.labels
    train_idx = []
    test_idx = []
    for label in range(4):
        idx = np.flatnonzero(labels == label)
        if idx.size == 0:
            continue
        perm = rng.permutation(idx.size)
        n_train = _round_half_up(train_fraction * idx.size)
        chosen = idx[perm[:n_train]]
        train_idx.extend(chosen.tolist())
        test_idx.extend(idx[perm[n_train:]].tolist())
    train_idx.sort()
    test_idx.sort()

    def subset(indices, tag):
        meta = dict(dataset.metadata)
        meta["split"] = {"part": tag, "train_fraction": train_fraction,
                         "seed": seed, "indices": list(indices)}
        return Dataset(samples=[dataset.samples[i] for i in indices],
                       metadata=meta)

    return subset(train_idx, "train"), subset(test_idx, "test")


def save(dataset: Dataset, path) -> None:
    """Write a dataset directory: meta.json plus samples.csv.

    samples.csv has columns sample_id,label,channel,t,value with one row
    per (sample, channel, time) triple; floats are written with repr so
    the round-trip is lossless.
    """
    import pathlib

    p = pathlib.Path(path)
    p.mkdir(parents=True, exist_ok=True)
    meta = dict(dataset.metadata)
    meta["n_samples"] = len(dataset.samples)
    meta["histogram"] = list(dataset.histogram())
    meta["scenarios"] = [s.scenario.to_dict() for s in dataset.samples]
    meta["labels"] = [s.label for s in dataset.samples]
    rates = {s.trajectory.measurement_rate for s in dataset.samples}
    if len(rates) > 1:
        raise ValueError("mixed measurement rates in one dataset")
    meta["measurement_rate"] = rates.pop() if rates else None
    with open(p / "meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")
    with open(p / "samples.csv", "w", encoding="utf-8") as fh:
        fh.write("sample_id,label,channel,t,value\n")
        for i, s in enumerate(dataset.samples):
            t_repr = [repr(float(v)) for v in s.trajectory.times]
            for chan, series in zip(("f1", "f2", "ptie"), s.trajectory.channels()):
                prefix = f"{i},{s.label},{chan},"
                fh.writelines(
                    f"{prefix}{tj},{float(vj)!r}\n"
                    for tj, vj in zip(t_repr, series))


def load(path) -> Dataset:
    """Read a dataset directory written by :func:`save`."""
    import pathlib

    p = pathlib.Path(path)
    meta_path = p / "meta.json"
    csv_path = p / "samples.csv"
    if not meta_path.exists():
        raise FormatError(f"missing {meta_path}")
    if not csv_path.exists():
        raise FormatError(f"missing {csv_path}")
    with open(meta_path, encoding="utf-8") as fh:
        try:
            meta = json.load(fh)
        except json.JSONDecodeError as e:
            raise FormatError(f"meta.json does not parse: {e}") from None
    for key in ("n_samples", "labels", "scenarios", "measurement_rate"):
        if key not in meta:
            raise FormatError(f"meta.json missing key {key!r}")
    n = meta["n_samples"]
    labels = meta["labels"]
    scenarios = [Scenario.from_dict(d) for d in meta["scenarios"]]
    if len(labels) != n or len(scenarios) != n:
        raise FormatError("meta.json labels/scenarios length mismatch")

    try:
        series = _read_rows_fast(csv_path, n, labels)
    except FormatError:
        raise
    except Exception:
        # fall back to the line-by-line parser for a precise record index
        series = _read_rows_slow(csv_path, n, labels)

    rate = meta["measurement_rate"]
    samples = []
    for i in range(n):
        chans = {}
        for chan in ("f1", "f2", "ptie"):
            if (i, chan) not in series:
                raise FormatError(f"sample {i} missing channel {chan}",
                                  record_index=i)
            chans[chan] = np.asarray(series[(i, chan)], dtype=float)
        try:
            traj = Trajectory(chans["f1"], chans["f2"], chans["ptie"], rate)
        except ValueError as e:
            raise FormatError(f"sample {i}: {e}", record_index=i) from None
        samples.append(Sample(trajectory=traj, label=labels[i],
                              scenario=scenarios[i]))
    restored_meta = {k: v for k, v in meta.items()
                     if k not in ("labels", "scenarios", "n_samples",
                                  "measurement_rate")}
    return Dataset(samples=samples, metadata=restored_meta)


def _read_rows_fast(csv_path, n, labels):
    import pandas as pd

    df = pd.read_csv(csv_path, dtype={"sample_id": np.int64, "label": np.int64,
                                      "channel": str, "t": float, "value": float},
                     float_precision="round_trip")
    if list(df.columns) != ["sample_id", "label", "channel", "t", "value"]:
        raise FormatError(f"unexpected samples.csv header: {list(df.columns)}")
    sid = df["sample_id"].to_numpy()
    lab = df["label"].to_numpy()
    chan = df["channel"].to_numpy()
    bad = (sid < 0) | (sid >= n) | ~np.isin(chan, ("f1", "f2", "ptie"))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise FormatError(f"out-of-range record at line {i + 2}", record_index=i)
    mismatch = lab != np.asarray(labels)[sid]
    if mismatch.any():
        i = int(np.flatnonzero(mismatch)[0])
        raise FormatError(f"label mismatch at line {i + 2}", record_index=i)
    value = df["value"].to_numpy()
    series = {}
    order = np.lexsort((np.arange(len(sid)), chan, sid))  # stable within group
    sid_o, chan_o, val_o = sid[order], chan[order], value[order]
    boundaries = np.flatnonzero((sid_o[1:] != sid_o[:-1])
                                | (chan_o[1:] != chan_o[:-1])) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(sid_o)]))
    for a, b in zip(starts, ends):
        series[(int(sid_o[a]), str(chan_o[a]))] = val_o[a:b]
    return series


def _read_rows_slow(csv_path, n, labels):
    series = {}
    with open(csv_path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "sample_id,label,channel,t,value":
            raise FormatError(f"unexpected samples.csv header: {header!r}")
        for lineno, line in enumerate(fh):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 5:
                raise FormatError(f"malformed samples.csv line {lineno + 2}",
                                  record_index=lineno)
            try:
                sid = int(parts[0])
                lab = int(parts[1])
                chan = parts[2]
                float(parts[3])
                v = float(parts[4])
            except ValueError:
                raise FormatError(f"unparsable samples.csv line {lineno + 2}",
                                  record_index=lineno) from None
            if not 0 <= sid < n or chan not in ("f1", "f2", "ptie"):
                raise FormatError(f"out-of-range record at line {lineno + 2}",
                                  record_index=lineno)
            if lab != labels[sid]:
                raise FormatError(f"label mismatch at line {lineno + 2}",
                                  record_index=lineno)
            series.setdefault((sid, chan), []).append(v)
    return series
