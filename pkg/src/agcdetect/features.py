"""Statistical feature catalog: 100 named features per channel, 300 per sample.

Six kernel families per channel, concatenated in fixed registry order:

* basic statistics (9)
* energy / change statistics (5)
* entropy and complexity (3)
* autocorrelation aggregate and C3 (4)
* FFT coefficient magnitudes and spectral moments (69)
* percentiles and large-std flags (10)

Conventions for degenerate inputs (constant or zero-variance series) return
0 rather than NaN so vectors stay finite; anything non-finite that still
slips through is replaced by 0 and flagged on the feature vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LengthError",
    "FeatureVector",
    "FeatureMatrix",
    "CHANNEL_NAMES",
    "PER_CHANNEL_FEATURE_NAMES",
    "FEATURE_NAMES",
    "basic_stats",
    "energy_change",
    "entropy_complexity",
    "autocorr_c3",
    "fft_features",
    "percentiles_large_std",
    "extract_channel",
    "extract_sample",
    "extract_matrix",
]


class LengthError(ValueError):
    """Series too short for the requested feature kernel."""


CHANNEL_NAMES = ("f1", "f2", "ptie")

_BASIC_NAMES = ("mean", "median", "variance", "std_dev", "skewness",
                "kurtosis", "maximum", "minimum", "sum_values")
_ENERGY_NAMES = ("abs_energy", "absolute_sum_of_changes", "mean_abs_change",
                 "change_quantiles_mean__ql_0.25__qh_0.75",
                 "change_quantiles_std__ql_0.25__qh_0.75")
_ENTROPY_NAMES = ("sample_entropy__m_2__r_0.2std", "cid_ce__normalized",
                  "cid_ce__raw")
_AUTOCORR_NAMES = ("agg_autocorrelation_var__maxlag_32", "c3__lag_1",
                   "c3__lag_2", "c3__lag_3")
_FFT_NAMES = tuple(f"fft_coefficient_abs__k_{k}" for k in range(65)) + (
    "fft_aggregated__centroid", "fft_aggregated__variance",
    "fft_aggregated__skew", "fft_aggregated__kurtosis")
_PCTL_NAMES = tuple(f"quantile__q_0.{d}" for d in (1, 2, 3, 4, 6, 7, 8, 9)) + (
    "large_std__r_0.25", "large_std__r_0.35")

PER_CHANNEL_FEATURE_NAMES = (_BASIC_NAMES + _ENERGY_NAMES + _ENTROPY_NAMES
                             + _AUTOCORR_NAMES + _FFT_NAMES + _PCTL_NAMES)
assert len(PER_CHANNEL_FEATURE_NAMES) == 100

FEATURE_NAMES = tuple(f"{ch}__{name}" for ch in CHANNEL_NAMES
                      for name in PER_CHANNEL_FEATURE_NAMES)


def _as_series(x, min_len, caller):
    s = np.asarray(x, dtype=float)
    if s.ndim != 1:
        raise ValueError(f"{caller} expects a 1-d series")
    if len(s) < min_len:
        raise LengthError(f"{caller} needs at least {min_len} points, "
                          f"got {len(s)}")
    return s


def basic_stats(series) -> np.ndarray:
    """Mean, median, population variance/std, Fisher skewness, excess
    kurtosis, max, min, sum.  Zero-variance series report 0 skew/kurtosis."""
    x = _as_series(series, 2, "basic_stats")
    n = len(x)
    mean = x.sum() / n
    d = x - mean
    m2 = (d * d).sum() / n
    if m2 == 0.0:
        skew = kurt = 0.0
    else:
        m3 = (d ** 3).sum() / n
        m4 = (d ** 4).sum() / n
        skew = m3 / m2 ** 1.5
        kurt = m4 / (m2 * m2) - 3.0
    return np.array([mean, float(np.median(x)), m2, np.sqrt(m2), skew, kurt,
                     x.max(), x.min(), x.sum()])


def energy_change(series) -> np.ndarray:
    """Absolute energy, absolute sum of changes, mean absolute change, and
    the mean/std of |changes| restricted to the [q0.25, q0.75] corridor.

    A change contributes to the corridor statistics only when both of its
    endpoints lie inside the corridor (inclusive); an empty corridor gives
    0 for both."""
    x = _as_series(series, 2, "energy_change")
    diffs = np.diff(x)
    abs_diffs = np.abs(diffs)
    ql, qh = np.quantile(x, (0.25, 0.75))
    inside = (x >= ql) & (x <= qh)
    both = inside[:-1] & inside[1:]
    if both.any():
        sel = abs_diffs[both]
        cq_mean = sel.mean()
        cq_std = sel.std()  # population
    else:
        cq_mean = cq_std = 0.0
    return np.array([(x * x).sum(), abs_diffs.sum(), abs_diffs.mean(),
                     cq_mean, cq_std])


def _sample_entropy(x: np.ndarray) -> float:
    """Richman-Moorman sample entropy, m=2, r=0.2*std, Chebyshev distance,
    self-matches excluded; degenerate counts give 0."""
    n = len(x)
    sd = x.std()
    if sd == 0.0:
        return 0.0
    r = 0.2 * sd
    m = 2
    nt = n - m  # templates of length m and m+1 both indexed 0..nt-1
    d01 = np.abs(x[:nt, None] - x[None, :nt])
    d2 = np.maximum(d01, np.abs(x[1:nt + 1, None] - x[None, 1:nt + 1]))
    d3 = np.maximum(d2, np.abs(x[2:nt + 2, None] - x[None, 2:nt + 2]))
    iu = np.triu_indices(nt, k=1)
    b = int((d2[iu] <= r).sum())
    a = int((d3[iu] <= r).sum())
    if a == 0 or b == 0:
        return 0.0
    return float(-np.log(a / b))


def entropy_complexity(series) -> np.ndarray:
    """Sample entropy, CID-CE of the z-scored series, raw CID-CE."""
    x = _as_series(series, 4, "entropy_complexity")
    diffs = np.diff(x)
    cid_raw = float(np.sqrt((diffs * diffs).sum()))
    sd = x.std()
    if sd == 0.0:
        cid_norm = 0.0
    else:
        z = (x - x.mean()) / sd
        zd = np.diff(z)
        cid_norm = float(np.sqrt((zd * zd).sum()))
    return np.array([_sample_entropy(x), cid_norm, cid_raw])


def autocorr_c3(series) -> np.ndarray:
    """Variance of autocorrelations at lags 1..32, and C3 at lags 1..3.

    Autocorrelation at lag k is sum((x_t-mu)(x_{t+k}-mu)) / (n*var); a
    zero-variance series defines every lag as 0.  C3(lag) is the mean of
    x(t+2*lag)*x(t+lag)*x(t) over its n-2*lag valid positions."""
    x = _as_series(series, 97, "autocorr_c3")
    n = len(x)
    mean = x.mean()
    var = x.var()
    d = x - mean
    if var == 0.0:
        acf_var = 0.0
    else:
        acf = np.array([(d[:n - k] * d[k:]).sum() for k in range(1, 33)])
        acf /= n * var
        acf_var = acf.var()
    c3 = [float((x[2 * k:] * x[k:n - k] * x[:n - 2 * k]).mean())
          for k in (1, 2, 3)]
    return np.array([acf_var, *c3])


def fft_features(series) -> np.ndarray:
    """|DFT| at orders 0..64 plus spectral centroid/variance/skew/kurtosis.

    The series is transformed raw (no window, no detrending).  The moments
    treat the full one-sided magnitude spectrum as an unnormalized
    distribution over bin index; an all-zero spectrum gives four zeros."""
    x = _as_series(series, 130, "fft_features")
    spectrum = np.abs(np.fft.rfft(x))
    mags = spectrum[:65]
    total = spectrum.sum()
    if total == 0.0:
        agg = np.zeros(4)
    else:
        k = np.arange(len(spectrum))
        centroid = (k * spectrum).sum() / total
        dk = k - centroid
        m2 = (dk ** 2 * spectrum).sum() / total
        if m2 == 0.0:
            agg = np.array([centroid, 0.0, 0.0, 0.0])
        else:
            m3 = (dk ** 3 * spectrum).sum() / total
            m4 = (dk ** 4 * spectrum).sum() / total
            agg = np.array([centroid, m2, m3 / m2 ** 1.5, m4 / (m2 * m2)])
    return np.concatenate([mags, agg])


def percentiles_large_std(series) -> np.ndarray:
    """Percentiles 10..40 and 60..90 (linear interpolation) plus the two
    large-std indicator flags: 1 when std > r*(max-min)."""
    x = _as_series(series, 2, "percentiles_large_std")
    pct = np.percentile(x, (10, 20, 30, 40, 60, 70, 80, 90))
    spread = x.max() - x.min()
    # spread == 0 forces std == 0 mathematically; guard against the float
    # noise a constant series can leave in the computed std
    sd = x.std() if spread > 0.0 else 0.0
    flags = [1.0 if sd > r * spread else 0.0 for r in (0.25, 0.35)]
    return np.concatenate([pct, flags])


_KERNELS = (basic_stats, energy_change, entropy_complexity, autocorr_c3,
            fft_features, percentiles_large_std)


def extract_channel(series) -> np.ndarray:
    """All 100 per-channel features in registry order."""
    return np.concatenate([k(series) for k in _KERNELS])


@dataclass
class FeatureVector:
    """One sample's 300 features plus the non-finite replacement record."""

    values: np.ndarray
    replaced_indices: tuple[int, ...] = ()

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(FEATURE_NAMES),):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values")

    @property
    def had_nonfinite(self) -> bool:
        return bool(self.replaced_indices)

    @property
    def names(self):
        return FEATURE_NAMES


def extract_sample(trajectory) -> FeatureVector:
    """Concatenate channel blocks (f1, f2, ptie), replacing any non-finite
    feature value with 0 and recording which indices were touched."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        blocks = [extract_channel(ch) for ch in trajectory.channels()]
    values = np.concatenate(blocks)
    bad = ~np.isfinite(values)
    replaced = tuple(int(i) for i in np.flatnonzero(bad))
    if replaced:
        values = values.copy()
        values[bad] = 0.0
    return FeatureVector(values=values, replaced_indices=replaced)


@dataclass
class FeatureMatrix:
    """Sample-by-feature matrix with aligned labels."""

    values: np.ndarray            # (n_samples, 300)
    labels: np.ndarray            # (n_samples,)
    names: tuple = FEATURE_NAMES
    replaced: dict = field(default_factory=dict)  # row -> replaced indices

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ValueError("values must be (n_samples, n_features)")
        if len(self.labels) != len(self.values):
            raise ValueError("labels length must match row count")

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return (self.names == other.names
                and np.array_equal(self.values, other.values)
                and np.array_equal(self.labels, other.labels))

    def to_csv(self, path):
        """Header = 300 registry names + label; floats written with repr."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(self.names) + ",label\n")
            for row, label in zip(self.values, self.labels):
                fh.write(",".join(repr(float(v)) for v in row))
                fh.write(f",{int(label)}\n")

    @classmethod
    def from_csv(cls, path):
        import pandas as pd

        df = pd.read_csv(path, float_precision="round_trip")
        cols = list(df.columns)
        if cols[-1] != "label":
            raise ValueError("feature matrix CSV must end with a label column")
        names = tuple(cols[:-1])
        return cls(values=df[cols[:-1]].to_numpy(dtype=float),
                   labels=df["label"].to_numpy(dtype=int), names=names)


def extract_matrix(dataset) -> FeatureMatrix:
    """Feature matrix for every sample of a dataset, row order preserved."""
    rows = []
    replaced = {}
    for i, sample in enumerate(dataset.samples):
        fv = extract_sample(sample.trajectory)
        rows.append(fv.values)
        if fv.replaced_indices:
            replaced[i] = fv.replaced_indices
    values = np.vstack(rows) if rows else np.empty((0, len(FEATURE_NAMES)))
    return FeatureMatrix(values=values, labels=dataset.labels,
                         replaced=replaced)
