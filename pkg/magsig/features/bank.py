"""
The 20-feature bank applied identically to every signal component.
"""
from __future__ import annotations

import warnings
from typing import Tuple

import numpy as np
from scipy import stats

from ..config import FramingDefaults
from ..errors import DomainError, PreconditionError

FEATURE_NAMES: Tuple[str, ...] = (
    "mean",
    "std",
    "min",
    "max",
    "range",
    "median",
    "rms",
    "energy",
    "skewness",
    "kurtosis",
    "mean_abs_dev",
    "mean_crossings",
    "peak_count",
    "mean_abs_diff",
    "max_abs_diff",
    "autocorr_lag1",
    "band_energy_1",
    "band_energy_2",
    "band_energy_3",
    "band_energy_4",
)
N_FEATURES = len(FEATURE_NAMES)
N_BANDS = 4


def _flat_rows(mean: np.ndarray, m2: np.ndarray) -> np.ndarray:
    # Same precision test scipy.stats uses for skew/kurtosis
    return m2 <= (np.finfo(float).resolution * mean) ** 2


def _band_energies(dev: np.ndarray, flat: np.ndarray) -> np.ndarray:
    power = np.abs(np.fft.rfft(dev, axis=1)[:, 1:]) ** 2
    total = power.sum(axis=1)
    groups = np.array_split(np.arange(power.shape[1]), N_BANDS)
    bands = np.stack([power[:, g].sum(axis=1) for g in groups], axis=1)
    ok = (total > 0) & ~flat
    out = np.zeros_like(bands)
    out[ok] = bands[ok] / total[ok, None]
    return out


def feature_bank(series: np.ndarray) -> np.ndarray:
    """(m, N) series -> (m, 20) features in FEATURE_NAMES order."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 2:
        raise PreconditionError(f"feature_bank expects a (m, N) batch, got shape {x.shape}")
    if x.shape[1] < FramingDefaults.MIN_SERIES:
        raise PreconditionError(f"series of {x.shape[1]} samples is shorter than {FramingDefaults.MIN_SERIES}")
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite samples in feature input")

    mean = x.mean(axis=1)
    dev = x - mean[:, None]
    m2 = np.mean(dev * dev, axis=1)
    flat = _flat_rows(mean, m2)
    std = np.where(flat, 0.0, np.sqrt(m2))
    lo = x.min(axis=1)
    hi = x.max(axis=1)
    square_mean = np.mean(x * x, axis=1)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        skewness = stats.skew(x, axis=1, bias=True)
        kurt = stats.kurtosis(x, axis=1, fisher=False, bias=True)
    skewness = np.where(flat, 0.0, np.nan_to_num(skewness))
    kurt = np.where(flat, 0.0, np.nan_to_num(kurt))

    positive = dev > 0
    crossings = np.count_nonzero(positive[:, 1:] != positive[:, :-1], axis=1)

    mid = x[:, 1:-1]
    peaks = (mid > x[:, :-2]) & (mid >= x[:, 2:]) & (mid > (mean + 0.5 * std)[:, None])
    peak_count = np.count_nonzero(peaks, axis=1)

    step = np.abs(np.diff(x, axis=1))
    lag = np.sum(dev[:, :-1] * dev[:, 1:], axis=1)
    denom = np.sum(dev * dev, axis=1)
    autocorr = np.zeros_like(mean)
    ok = (denom > 0) & ~flat
    autocorr[ok] = lag[ok] / denom[ok]

    columns = [
        mean,
        std,
        lo,
        hi,
        hi - lo,
        np.median(x, axis=1),
        np.sqrt(square_mean),
        square_mean,
        skewness,
        kurt,
        np.mean(np.abs(dev), axis=1),
        crossings.astype(float),
        peak_count.astype(float),
        step.mean(axis=1),
        step.max(axis=1),
        autocorr,
    ]
    return np.column_stack(columns + [_band_energies(dev, flat)])


def extract_component_features(series: np.ndarray) -> np.ndarray:
    """20 features of one component series (N >= 16 samples)."""
    series = np.asarray(series, dtype=float)
    if series.ndim != 1:
        raise PreconditionError("extract_component_features expects a 1-D series")
    return feature_bank(series[None, :])[0]
