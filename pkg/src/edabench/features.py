"""SCR event detection and the per-segment feature catalog.

Peaks are detected in the phasic component with a topographic prominence
threshold of one phasic standard deviation and a height of at least one
standard deviation above the baseline (the phasic mean).  Onsets and
recoveries are located where the signal crosses 50% of the peak height
above baseline, searching 10 s backward and 120 s forward respectively.

``extract_all`` computes the full 25-entry catalog (23 initial candidates
plus the two clustering/ramp features used by the three-class pipeline).
A feature that is undefined for a segment (e.g. interval statistics with a
single event) is carried as ``None``, never as NaN.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .dsp import decompose
from .errors import DegenerateDistribution
from .ingest import Segment
from .spectral import second_spectral_peak, welch_psd, band_power

ONSET_SEARCH_S = 10.0
RECOVERY_SEARCH_S = 120.0

FEATURE_CATALOG = (
    "mean_raw",
    "kurtosis",
    "skewness",
    "iqr",
    "mean_tonic",
    "tonic_variance",
    "mean_phasic",
    "phasic_variance",
    "phasic_mean_rise_time",
    "phasic_mean_recovery_time",
    "peak_density",
    "scr_peaks_per_min",
    "scr_interval_mean",
    "scr_interval_max",
    "scr_interval_rmssd",
    "peak_amplitude",
    "second_amplitude",
    "freq_peak_amplitude",
    "freq_2nd_peak_amplitude",
    "psd_band_power",
    "tonic_mean_slope",
    "tonic_ratio_up",
    "activation_duration",
    "scr_burst_fraction",
    "tonic_window_ramp",
)


@dataclass(frozen=True)
class ScrEvent:
    peak_idx: int
    onset_idx: int
    recovery_idx: int | None
    amplitude: float
    rise_time_s: float
    recovery_time_s: float | None


@dataclass(frozen=True)
class FeatureVector:
    subject_id: str
    label: object  # Condition of the source segment
    values: dict  # feature name -> float or None


def detect_scr_peaks(phasic: np.ndarray, fs_hz: float) -> list[ScrEvent]:
    phasic = np.asarray(phasic, dtype=float)
    if len(phasic) < 3:
        return []
    std = float(phasic.std())
    if std == 0.0:
        return []
    baseline = float(phasic.mean())
    peaks, _ = find_peaks(phasic, prominence=std, height=baseline + std)

    events = []
    prev_peak = -1
    for p in peaks:
        p = int(p)
        threshold = baseline + 0.5 * (phasic[p] - baseline)
        # onset: earliest index in the backward window exceeding the 50% level
        w0 = max(0, p - round(ONSET_SEARCH_S * fs_hz), prev_peak + 1)
        above = np.flatnonzero(phasic[w0:p] > threshold)
        onset = w0 + int(above[0]) if above.size else p - 1
        onset = max(onset, prev_peak + 1)
        if onset >= p:
            onset = p - 1
        if onset < 0:
            continue
        # recovery: first index in the forward window dropping below the 50% level
        w1 = min(len(phasic), p + 1 + round(RECOVERY_SEARCH_S * fs_hz))
        below = np.flatnonzero(phasic[p + 1:w1] < threshold)
        recovery = p + 1 + int(below[0]) if below.size else None
        events.append(ScrEvent(
            peak_idx=p,
            onset_idx=onset,
            recovery_idx=recovery,
            amplitude=float(phasic[p] - baseline),
            rise_time_s=(p - onset) / fs_hz,
            recovery_time_s=None if recovery is None else (recovery - p) / fs_hz,
        ))
        prev_peak = p
    return events


def phasic_mean_rise_time(events: list[ScrEvent]) -> float:
    if not events:
        return 0.0
    return float(np.mean([e.rise_time_s for e in events]))


def phasic_mean_recovery_time(events: list[ScrEvent]) -> float:
    times = [e.recovery_time_s for e in events if e.recovery_time_s is not None]
    if not times:
        return 0.0
    return float(np.mean(times))


def moment_features(x: np.ndarray) -> dict:
    """Skewness (mu3/sigma^3) and excess kurtosis (mu4/sigma^4 - 3)."""
    x = np.asarray(x, dtype=float)
    if len(x) < 3:
        raise DegenerateDistribution("need at least 3 samples")
    d = x - x.mean()
    var = np.mean(d ** 2)
    if var == 0.0:
        raise DegenerateDistribution("zero variance")
    sigma = np.sqrt(var)
    return {
        "skewness": float(np.mean(d ** 3) / sigma ** 3),
        "kurtosis_excess": float(np.mean(d ** 4) / sigma ** 4 - 3.0),
    }


def iqr(x: np.ndarray) -> float:
    """Q75 - Q25 with linear interpolation between order statistics."""
    x = np.asarray(x, dtype=float)
    q75, q25 = np.percentile(x, [75.0, 25.0])
    return float(q75 - q25)


def scr_interval_stats(events: list[ScrEvent], fs_hz: float) -> dict:
    if len(events) < 2:
        return {"mean_s": None, "max_s": None, "rmssd_s": None}
    times = np.array([e.peak_idx for e in events], dtype=float) / fs_hz
    intervals = np.diff(times)
    out = {
        "mean_s": float(intervals.mean()),
        "max_s": float(intervals.max()),
        "rmssd_s": None,
    }
    if len(events) >= 3:
        dd = np.diff(intervals)
        out["rmssd_s"] = float(np.sqrt(np.mean(dd ** 2)))
    return out


def peaks_per_min(events: list[ScrEvent], duration_s: float) -> float:
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    return 60.0 * len(events) / duration_s


def peak_density(events: list[ScrEvent], duration_s: float) -> float:
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    return len(events) / duration_s


def amplitude_features(events: list[ScrEvent]) -> dict:
    amps = sorted((e.amplitude for e in events), reverse=True)
    return {
        "peak_amplitude": amps[0] if len(amps) >= 1 else None,
        "second_amplitude": amps[1] if len(amps) >= 2 else None,
    }


def tonic_features(tonic: np.ndarray, fs_hz: float) -> dict:
    tonic = np.asarray(tonic, dtype=float)
    if len(tonic) < 2:
        raise ValueError("tonic too short")
    diffs = np.diff(tonic)
    up = diffs > 0
    # longest contiguous run of rising first differences
    longest = run = 0
    for flag in up:
        run = run + 1 if flag else 0
        longest = max(longest, run)
    return {
        "mean": float(tonic.mean()),
        "variance": float(tonic.var()),
        "mean_slope": float(diffs.mean() * fs_hz),
        "ratio_up": float(np.count_nonzero(up) / len(diffs)),
        "activation_duration_s": longest / fs_hz,
    }


def scr_burst_fraction(events: list[ScrEvent], fs_hz: float) -> float:
    """Fraction of inter-peak intervals shorter than half the mean interval."""
    if len(events) < 3:
        return 0.0
    times = np.array([e.peak_idx for e in events], dtype=float) / fs_hz
    intervals = np.diff(times)
    threshold = 0.5 * intervals.mean()
    return float(np.count_nonzero(intervals < threshold) / len(intervals))


def tonic_window_ramp(tonic: np.ndarray, fs_hz: float,
                      window_s: float = 120.0) -> float:
    """Fraction of consecutive non-overlapping windows with strictly rising mean."""
    tonic = np.asarray(tonic, dtype=float)
    win = round(window_s * fs_hz)
    n_win = len(tonic) // win
    if n_win < 2:
        return 0.0
    means = np.array([tonic[i * win:(i + 1) * win].mean() for i in range(n_win)])
    rising = np.diff(means) > 0
    return float(np.count_nonzero(rising) / len(rising))


def extract_all(segment: Segment) -> FeatureVector:
    """Decompose a segment and compute every catalog feature."""
    fs = segment.sample_rate_hz
    dec = decompose(segment)
    duration_s = len(segment.samples) / fs
    events = detect_scr_peaks(dec.phasic, fs)

    values = dict.fromkeys(FEATURE_CATALOG)

    values["mean_raw"] = float(dec.band.mean())
    try:
        moments = moment_features(dec.band)
        values["skewness"] = moments["skewness"]
        values["kurtosis"] = moments["kurtosis_excess"]
    except DegenerateDistribution:
        pass
    values["iqr"] = iqr(dec.band)

    ton = tonic_features(dec.tonic, fs)
    values["mean_tonic"] = ton["mean"]
    values["tonic_variance"] = ton["variance"]
    values["tonic_mean_slope"] = ton["mean_slope"]
    values["tonic_ratio_up"] = ton["ratio_up"]
    values["activation_duration"] = ton["activation_duration_s"]

    values["mean_phasic"] = float(dec.phasic.mean())
    values["phasic_variance"] = float(dec.phasic.var())
    values["phasic_mean_rise_time"] = phasic_mean_rise_time(events)
    values["phasic_mean_recovery_time"] = phasic_mean_recovery_time(events)
    values["peak_density"] = peak_density(events, duration_s)
    values["scr_peaks_per_min"] = peaks_per_min(events, duration_s)
    intervals = scr_interval_stats(events, fs)
    values["scr_interval_mean"] = intervals["mean_s"]
    values["scr_interval_max"] = intervals["max_s"]
    values["scr_interval_rmssd"] = intervals["rmssd_s"]
    amps = amplitude_features(events)
    values["peak_amplitude"] = amps["peak_amplitude"]
    values["second_amplitude"] = amps["second_amplitude"]

    psd = welch_psd(dec.band, fs)
    values["freq_peak_amplitude"] = float(psd.power.max())
    values["freq_2nd_peak_amplitude"] = second_spectral_peak(psd)
    values["psd_band_power"] = band_power(psd, 0.01, 1.0)

    values["scr_burst_fraction"] = scr_burst_fraction(events, fs)
    values["tonic_window_ramp"] = tonic_window_ramp(dec.tonic, fs)

    for name, v in values.items():
        if v is not None and not np.isfinite(v):
            values[name] = None

    return FeatureVector(subject_id=segment.subject_id, label=segment.label,
                         values=values)
