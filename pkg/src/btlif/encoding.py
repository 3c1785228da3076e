"""Iris ingestion and population coding.

Each of the four measured features is normalized against its training-set
range and spread over four gaussian receptive fields, giving sixteen input
currents per flower.  A feature sitting exactly on a field center drives
that input neuron at the peak current.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FEATURE_NAMES = ("sepal_length", "sepal_width", "petal_length", "petal_width")
CLASS_NAMES = ("setosa", "versicolor", "virginica")


@dataclass(frozen=True)
class IrisSample:
    sepal_length: float
    sepal_width: float
    petal_length: float
    petal_width: float
    label: int

    def __post_init__(self) -> None:
        for name in FEATURE_NAMES:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")
        if not 0 <= self.label < len(CLASS_NAMES):
            raise ValueError(f"label must be in 0..{len(CLASS_NAMES) - 1}")

    @property
    def features(self) -> tuple[float, float, float, float]:
        return (self.sepal_length, self.sepal_width,
                self.petal_length, self.petal_width)


@dataclass(frozen=True)
class PopulationCoder:
    """Per-feature min/max plus the shared receptive-field layout.

    centers live in normalized [0, 1] units; sigma is the shared gaussian
    width; i_max (amperes) is the current delivered at a field center.
    """

    feature_mins: tuple[float, ...]
    feature_maxs: tuple[float, ...]
    centers: tuple[float, ...]
    sigma: float
    i_max: float

    def __post_init__(self) -> None:
        if len(self.feature_mins) != len(self.feature_maxs):
            raise ValueError("feature_mins and feature_maxs must align")
        for lo, hi in zip(self.feature_mins, self.feature_maxs):
            if not hi > lo:
                raise ValueError("every feature must have max > min")
        for a, b in zip(self.centers, self.centers[1:]):
            if not b > a:
                raise ValueError("centers must be strictly increasing")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError("sigma must be positive")
        if not (math.isfinite(self.i_max) and self.i_max > 0.0):
            raise ValueError("i_max must be positive")

    @property
    def n_features(self) -> int:
        return len(self.feature_mins)

    @property
    def n_neurons(self) -> int:
        return self.n_features * len(self.centers)


def fit_coder(samples: list[IrisSample], fields_per_feature: int = 4,
              sigma: float | None = None, i_max: float = 7.5e-10) -> PopulationCoder:
    """Record per-feature ranges and lay out evenly spaced field centers.

    Centers sit at (2k+1)/(2m) for m fields, e.g. {1/8, 3/8, 5/8, 7/8};
    sigma defaults to half the center spacing.  A feature that is constant
    across the samples cannot be normalized and is reported by name.
    """
    if len(samples) < 2:
        raise ValueError("need at least 2 samples to fit the coder")
    if fields_per_feature < 1:
        raise ValueError("fields_per_feature must be >= 1")
    mins, maxs = [], []
    for idx, name in enumerate(FEATURE_NAMES):
        values = [s.features[idx] for s in samples]
        lo, hi = min(values), max(values)
        if not hi > lo:
            raise ValueError(f"feature {name} is constant ({lo!r}); cannot normalize")
        mins.append(lo)
        maxs.append(hi)
    m = fields_per_feature
    centers = tuple((2 * k + 1) / (2 * m) for k in range(m))
    if sigma is None:
        sigma = 1.0 / (2 * m)  # half the center spacing
    return PopulationCoder(tuple(mins), tuple(maxs), centers, sigma, i_max)


def encode(sample: IrisSample, coder: PopulationCoder) -> np.ndarray:
    """Input currents for one sample, feature-major order, shape (16,).

    current_j = i_max * exp(-(x - center_j)^2 / (2 sigma^2)) with x the
    feature clamped to [0, 1] after min/max normalization, so out-of-range
    test features saturate rather than extrapolate.
    """
    currents = np.empty(coder.n_neurons)
    two_sigma_sq = 2.0 * coder.sigma * coder.sigma
    pos = 0
    for idx in range(coder.n_features):
        lo, hi = coder.feature_mins[idx], coder.feature_maxs[idx]
        x = (sample.features[idx] - lo) / (hi - lo)
        x = min(1.0, max(0.0, x))
        for c in coder.centers:
            currents[pos] = coder.i_max * math.exp(-((x - c) ** 2) / two_sigma_sq)
            pos += 1
    return currents


def _parse_class(token: str) -> int:
    name = token.strip().lower()
    if name.startswith("iris-"):
        name = name[len("iris-"):]
    if name not in CLASS_NAMES:
        raise ValueError(f"unknown class name {token.strip()!r}")
    return CLASS_NAMES.index(name)


def load_iris(path) -> list[IrisSample]:
    """Load the 150-sample iris CSV; anything else is an error.

    Format: 4 numeric feature columns then the class name, with an optional
    header line (detected by a non-numeric first field).
    """
    samples: list[IrisSample] = []
    first_data_line = True
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if first_data_line:
                first_data_line = False
                try:
                    float(fields[0])
                except ValueError:
                    continue  # header line
            if len(fields) != 5:
                raise ValueError(f"{path}: line {lineno}: expected 5 fields, got {len(fields)}")
            try:
                values = [float(f) for f in fields[:4]]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric feature") from None
            try:
                label = _parse_class(fields[4])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            try:
                samples.append(IrisSample(*values, label=label))
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
    if len(samples) != 150:
        raise ValueError(f"{path}: expected 150 samples, got {len(samples)}")
    counts = [0, 0, 0]
    for s in samples:
        counts[s.label] += 1
    if counts != [50, 50, 50]:
        raise ValueError(f"{path}: expected 50 samples per class, got {counts}")
    return samples


def make_toy_dataset(n_per_class: int = 25, seed: int = 0) -> list[IrisSample]:
    """Two-class set separable on the first feature alone.

    Class 0 clusters near 0.2, class 1 near 0.8 (disjoint); the remaining
    features carry uninformative jitter so no feature range degenerates.
    """
    rng = np.random.default_rng(seed)
    samples = []
    for label, (lo, hi) in enumerate(((0.1, 0.3), (0.7, 0.9))):
        for _ in range(n_per_class):
            f0 = rng.uniform(lo, hi)
            noise = rng.uniform(0.4, 0.6, size=3)
            samples.append(IrisSample(f0, noise[0], noise[1], noise[2], label=label))
    return samples
