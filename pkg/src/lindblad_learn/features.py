"""Handcrafted per-series features and z-score standardization.

Feature order (``FEATURES_18``); the 10-feature set is its first ten entries:

    mean, std, max, min, median, p25, p75, range, iqr, slope,
    diff_mean, diff_std, diff2_mean, diff2_std, skew, kurtosis,
    fft_max, fft_mean

Conventions: population moments; percentiles by linear interpolation
between closest ranks; slope is the least-squares fit against t_k = k*dt;
kurtosis is excess kurtosis; skew and kurtosis of a constant series are 0.
DFT magnitudes use the unnormalized forward transform of the raw series
over bins 1..M//2 (DC excluded).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEATURES_18 = (
    "mean", "std", "max", "min", "median", "p25", "p75", "range", "iqr", "slope",
    "diff_mean", "diff_std", "diff2_mean", "diff2_std", "skew", "kurtosis",
    "fft_max", "fft_mean",
)
FEATURES_10 = FEATURES_18[:10]
FEATURE_SETS = {"f18": FEATURES_18, "f10": FEATURES_10}

_ZERO_VAR = 1e-24  # relative variance below which a series counts as constant


def _basic(x: np.ndarray, dt: float) -> list[float]:
    mean = x.mean()
    std = x.std()
    p25, median, p75 = np.percentile(x, [25.0, 50.0, 75.0])
    t = np.arange(x.size) * dt
    tc = t - t.mean()
    slope = float(tc @ (x - mean) / (tc @ tc))
    return [mean, std, x.max(), x.min(), median, p25, p75, x.max() - x.min(), p75 - p25, slope]


def features10(x, dt: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("features10 needs a 1-D series of length >= 2")
    return np.array(_basic(x, dt), dtype=float)


def features18(x, dt: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 4:
        raise ValueError("features18 needs a 1-D series of length >= 4")
    out = _basic(x, dt)
    d1 = np.diff(x)
    d2 = np.diff(x, n=2)
    centered = x - x.mean()
    m2 = np.mean(centered**2)
    if m2 <= _ZERO_VAR * max(1.0, x.mean() ** 2):
        skew = kurt = 0.0
    else:
        skew = np.mean(centered**3) / m2**1.5
        kurt = np.mean(centered**4) / m2**2 - 3.0
    mags = np.abs(np.fft.rfft(x))[1:]
    out += [d1.mean(), d1.std(), d2.mean(), d2.std(), skew, kurt, mags.max(), mags.mean()]
    return np.array(out, dtype=float)


_EXTRACTORS = {"f18": features18, "f10": features10}


def extract(series: dict[str, np.ndarray], channels, dt: float, feature_set: str = "f18") -> np.ndarray:
    """Channel-major feature vector: all features of channels[0], then channels[1], ..."""
    try:
        fn = _EXTRACTORS[feature_set]
    except KeyError:
        raise ValueError(f"unknown feature set {feature_set!r}") from None
    return np.concatenate([fn(series[name], dt) for name in channels])


@dataclass
class Standardizer:
    """Per-dimension z-scoring; constant dimensions get scale 1."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, data) -> "Standardizer":
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[0] < 2:
            raise ValueError("need at least two training vectors to fit a standardizer")
        mean = data.mean(axis=0)
        scale = data.std(axis=0)
        scale = np.where(scale > 1e-12 * np.maximum(1.0, np.abs(mean)), scale, 1.0)
        return cls(mean, scale)

    def apply(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.scale

    def invert(self, z) -> np.ndarray:
        return np.asarray(z, dtype=float) * self.scale + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardizer":
        return cls(np.asarray(d["mean"], dtype=float), np.asarray(d["scale"], dtype=float))
