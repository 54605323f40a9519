"""Loading raw EDA recordings and cutting protocol-defined windows.

Input formats:
  * Empatica E4 export: line 1 = session start (unix epoch), line 2 = sample
    rate in Hz, one conductance value (microsiemens) per following line.
  * Plain: one value per line, sample rate supplied by the caller.

A JSON manifest lists every recording together with its subject id,
condition and exclusion status, so that dropped subjects are declarative
rather than buried in directory-scanning logic.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateEntry,
    EmptyBody,
    MalformedHeader,
    MissingFile,
    NonFiniteSample,
    WindowOutOfRange,
)


class Condition(Enum):
    REST = "Rest"
    AEROBIC = "Aerobic"
    STRESS = "Stress"
    ANAEROBIC = "Anaerobic"
    UNLABELED = "Unlabeled"


class Experiment(Enum):
    REST_AEROBIC = "rest_aerobic"
    STRESS_REST = "stress_rest"
    THREE_CLASS = "three_class"


@dataclass(frozen=True)
class RawRecording:
    subject_id: str
    condition: Condition
    sample_rate_hz: float
    samples: np.ndarray
    start_epoch_s: float | None = None

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if len(self.samples) == 0:
            raise ValueError("samples must be non-empty")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class WindowSpec:
    label: Condition
    start_s: float
    end_s: float

    def __post_init__(self):
        if self.start_s < 0 or self.end_s <= self.start_s:
            raise ValueError("window must satisfy 0 <= start < end")


@dataclass(frozen=True)
class Segment:
    subject_id: str
    label: Condition
    sample_rate_hz: float
    samples: np.ndarray
    source: str = ""
    window: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class ManifestEntry:
    subject_id: str
    condition: Condition
    path: str
    excluded: bool = False
    reason: str | None = None


@dataclass
class Manifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    base_dir: Path = field(default_factory=Path)

    def usable(self) -> list[ManifestEntry]:
        return [e for e in self.entries if not e.excluded]


def parse_e4_csv(data: bytes | str) -> tuple[float, float, np.ndarray]:
    """Parse an Empatica E4 EDA export.

    Returns (start_epoch_s, sample_rate_hz, samples).  The first two lines
    are the session start epoch and the sample rate; everything after is one
    sample per line.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    values = []
    for i, ln in enumerate(lines):
        try:
            values.append(float(ln.split(",")[0]))
        except ValueError:
            if i < 2:
                raise MalformedHeader(f"non-numeric header line {i + 1}: {ln!r}")
            raise NonFiniteSample(i + 1, ln)
    if len(values) < 3:
        raise EmptyBody("E4 file contains no sample lines")
    epoch, rate = values[0], values[1]
    if rate <= 0:
        raise MalformedHeader(f"non-positive sample rate {rate}")
    samples = np.asarray(values[2:], dtype=float)
    _check_finite(samples, header_lines=2)
    return epoch, rate, samples


def parse_plain(data: bytes | str) -> np.ndarray:
    """Parse the degenerate one-value-per-line format (rate supplied externally)."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise EmptyBody("plain recording contains no samples")
    values = []
    for i, ln in enumerate(lines):
        try:
            values.append(float(ln))
        except ValueError:
            raise NonFiniteSample(i + 1, ln)
    samples = np.asarray(values, dtype=float)
    _check_finite(samples, header_lines=0)
    return samples


def _check_finite(samples: np.ndarray, header_lines: int) -> None:
    bad = np.flatnonzero(~np.isfinite(samples))
    if bad.size:
        line = int(bad[0]) + header_lines + 1
        raise NonFiniteSample(line, samples[bad[0]])


def load_recording(path: str | Path, subject_id: str, condition: Condition,
                   sample_rate_hz: float = 4.0) -> RawRecording:
    """Load a recording, auto-detecting E4 vs plain format.

    An E4 file is recognised by its two header lines (large epoch value
    followed by a small rate); anything else is read as plain format at
    ``sample_rate_hz``.
    """
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))
    text = path.read_text()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    epoch = None
    rate = sample_rate_hz
    if len(lines) >= 3:
        try:
            first, second = float(lines[0].split(",")[0]), float(lines[1].split(",")[0])
            # epoch timestamps are huge; sample rates are small
            if first > 1e8 and 0 < second <= 1024:
                epoch, rate, samples = parse_e4_csv(text)
                return RawRecording(subject_id, condition, rate, samples, epoch)
        except ValueError:
            pass
    samples = parse_plain(text)
    return RawRecording(subject_id, condition, rate, samples, epoch)


def write_plain(rec: RawRecording, path: str | Path) -> None:
    """Write samples one per line using repr so a re-parse is bitwise identical."""
    Path(path).write_text("\n".join(repr(float(v)) for v in rec.samples) + "\n")


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))
    doc = json.loads(path.read_text())
    entries = []
    seen = set()
    for raw in doc.get("entries", []):
        entry = ManifestEntry(
            subject_id=str(raw["subject_id"]),
            condition=Condition(raw["condition"]),
            path=str(raw["path"]),
            excluded=bool(raw.get("excluded", False)),
            reason=raw.get("reason"),
        )
        key = (entry.subject_id, entry.condition)
        if key in seen:
            raise DuplicateEntry(f"duplicate manifest entry {key}")
        seen.add(key)
        entries.append(entry)
    return Manifest(entries=entries, base_dir=path.parent)


def slice_window(rec: RawRecording, w: WindowSpec) -> Segment:
    """Cut ``[round(start*fs), round(end*fs))`` out of a recording."""
    fs = rec.sample_rate_hz
    i0 = round(w.start_s * fs)
    i1 = round(w.end_s * fs)
    if i1 > len(rec.samples):
        raise WindowOutOfRange(
            f"window {w.start_s}-{w.end_s}s exceeds recording of "
            f"{rec.duration_s:.1f}s for subject {rec.subject_id}")
    return Segment(
        subject_id=rec.subject_id,
        label=w.label,
        sample_rate_hz=fs,
        samples=rec.samples[i0:i1].copy(),
        window=(w.start_s, w.end_s),
    )


def builtin_windows(experiment: Experiment) -> list[WindowSpec]:
    """Protocol-defined windows for each experiment.

    For the three-class experiment each file is used in full with its
    manifest condition as the label, so no fixed windows are returned.
    """
    if experiment is Experiment.REST_AEROBIC:
        return [
            WindowSpec(Condition.REST, 0.0, 120.0),
            WindowSpec(Condition.AEROBIC, 1560.0, 1740.0),
        ]
    if experiment is Experiment.STRESS_REST:
        return [
            WindowSpec(Condition.REST, 0.0, 120.0),
            WindowSpec(Condition.STRESS, 630.0, 750.0),
        ]
    return []


def full_window(rec: RawRecording) -> WindowSpec:
    return WindowSpec(rec.condition, 0.0, rec.duration_s)


# class encodings per experiment; binary positive class is the non-rest state
CLASS_MAPS = {
    Experiment.REST_AEROBIC: {Condition.REST: 0, Condition.AEROBIC: 1},
    Experiment.STRESS_REST: {Condition.REST: 0, Condition.STRESS: 1},
    Experiment.THREE_CLASS: {Condition.STRESS: 0, Condition.AEROBIC: 1,
                             Condition.ANAEROBIC: 2},
}


def segments_for_experiment(manifest: Manifest, experiment: Experiment,
                            sample_rate_hz: float = 4.0) -> list[Segment]:
    """Load every usable recording and cut its experiment windows."""
    segments = []
    for entry in manifest.usable():
        path = Path(entry.path)
        if not path.is_absolute():
            path = manifest.base_dir / path
        rec = load_recording(path, entry.subject_id, entry.condition,
                             sample_rate_hz)
        if experiment is Experiment.THREE_CLASS:
            windows = [full_window(rec)]
        else:
            windows = builtin_windows(experiment)
        for w in windows:
            seg = slice_window(rec, w)
            seg = Segment(seg.subject_id, seg.label, seg.sample_rate_hz,
                          seg.samples, source=str(path), window=seg.window)
            segments.append(seg)
    return segments
