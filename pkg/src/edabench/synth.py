"""Seeded synthetic-EDA generator with ground-truth event annotations.

Events are difference-of-exponentials bumps (Bateman-style sudomotor
shape) on a linear tonic drift, plus seeded Gaussian noise.  The generator
exists purely as a test oracle for SCR detection and end-to-end pipeline
checks; it makes no claim of physiological calibration.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, OverlappingEvents
from .ingest import Condition, RawRecording


@dataclass(frozen=True)
class SynthEvent:
    onset_s: float
    amplitude: float
    rise_tau_s: float
    decay_tau_s: float

    def peak_time_s(self) -> float:
        """Analytic peak time of the difference-of-exponentials shape."""
        tr, td = self.rise_tau_s, self.decay_tau_s
        return self.onset_s + (td * tr / (td - tr)) * math.log(td / tr)

    def half_max_support(self) -> tuple[float, float]:
        """Interval where the shape exceeds half its peak (numeric bracketing)."""
        t = np.linspace(0, self.decay_tau_s * 12, 4096)
        y = self._shape(t)
        above = np.flatnonzero(y >= 0.5 * y.max())
        return (self.onset_s + t[above[0]], self.onset_s + t[above[-1]])

    def _shape(self, t_rel: np.ndarray) -> np.ndarray:
        tr, td = self.rise_tau_s, self.decay_tau_s
        y = np.where(t_rel >= 0, np.exp(-t_rel / td) - np.exp(-t_rel / tr), 0.0)
        peak = np.exp(-(self.peak_time_s() - self.onset_s) / td) \
            - np.exp(-(self.peak_time_s() - self.onset_s) / tr)
        return self.amplitude * y / peak

    def render(self, t: np.ndarray) -> np.ndarray:
        return self._shape(t - self.onset_s)


@dataclass(frozen=True)
class SynthSpec:
    duration_s: float
    fs_hz: float = 4.0
    baseline_level: float = 2.0
    drift_slope: float = 0.0       # per second
    events: tuple = ()
    noise_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.duration_s <= 0 or self.fs_hz <= 0:
            raise ConfigError("duration and sample rate must be positive")
        if any(e.amplitude <= 0 or e.rise_tau_s <= 0
               or e.decay_tau_s <= e.rise_tau_s for e in self.events):
            raise ConfigError("events need amplitude > 0 and decay_tau > rise_tau > 0")
        onsets = [e.onset_s for e in self.events]
        if onsets != sorted(onsets):
            raise ConfigError("events must be sorted by onset")


@dataclass(frozen=True)
class SynthTruth:
    recording: RawRecording
    peak_times_s: tuple
    peak_indices: tuple
    amplitudes: tuple
    tonic: np.ndarray


def generate(spec: SynthSpec) -> SynthTruth:
    supports = [e.half_max_support() for e in spec.events]
    for (_, hi), (lo, _) in zip(supports, supports[1:]):
        if lo < hi:
            raise OverlappingEvents(
                f"events overlap at half-max ({hi:.2f}s > {lo:.2f}s)")
    n = round(spec.duration_s * spec.fs_hz)
    if n < 1:
        raise ConfigError("duration too short for one sample")
    t = np.arange(n) / spec.fs_hz
    tonic = spec.baseline_level + spec.drift_slope * t
    x = tonic.copy()
    for e in spec.events:
        x = x + e.render(t)
    rng = np.random.default_rng(spec.seed)
    if spec.noise_sd > 0:
        x = x + spec.noise_sd * rng.standard_normal(n)
    rec = RawRecording(subject_id=f"synth{spec.seed:03d}",
                       condition=Condition.UNLABELED,
                       sample_rate_hz=spec.fs_hz, samples=x)
    peak_times = tuple(e.peak_time_s() for e in spec.events)
    return SynthTruth(
        recording=rec,
        peak_times_s=peak_times,
        peak_indices=tuple(round(pt * spec.fs_hz) for pt in peak_times),
        amplitudes=tuple(e.amplitude for e in spec.events),
        tonic=tonic,
    )


def spec_from_dict(doc: dict) -> SynthSpec:
    try:
        events = tuple(SynthEvent(
            onset_s=float(e["onset_s"]),
            amplitude=float(e["amplitude"]),
            rise_tau_s=float(e["rise_tau_s"]),
            decay_tau_s=float(e["decay_tau_s"]),
        ) for e in doc.get("events", []))
        tonic = doc.get("tonic", {})
        return SynthSpec(
            duration_s=float(doc["duration_s"]),
            fs_hz=float(doc.get("fs_hz", 4.0)),
            baseline_level=float(tonic.get("baseline_level", 2.0)),
            drift_slope=float(tonic.get("drift_slope", 0.0)),
            events=events,
            noise_sd=float(doc.get("noise_sd", 0.0)),
            seed=int(doc.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad synth spec: {exc}")


def load_spec(path: str | Path) -> SynthSpec:
    return spec_from_dict(json.loads(Path(path).read_text()))


def truth_to_dict(truth: SynthTruth) -> dict:
    return {
        "subject_id": truth.recording.subject_id,
        "sample_rate_hz": truth.recording.sample_rate_hz,
        "n_samples": len(truth.recording.samples),
        "events": [
            {"peak_time_s": pt, "peak_index": pi, "amplitude": a}
            for pt, pi, a in zip(truth.peak_times_s, truth.peak_indices,
                                 truth.amplitudes)
        ],
    }
