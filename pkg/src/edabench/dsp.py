"""Butterworth filter design, zero-phase filtering and EDA decomposition.

The whole pipeline runs on the band-limited (0.01-1.0 Hz), min-max
normalized signal.  Tonic activity is its < 0.05 Hz content; phasic
activity its 0.1-0.5 Hz content.  All filters are fourth-order Butterworth
prototypes applied forward-backward, so the net response is zero-phase
with squared magnitude.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import signal as sig

from .errors import EdgeAboveNyquist, SignalTooShort, UnstableDesign
from .ingest import Segment

# Decimal places the normalized band signal is snapped to.  Recursive
# filtering of narrow-band designs at fs=4 amplifies last-ulp input
# differences to ~1e-9, so without this quantization an affine rescaling of
# the raw signal would perturb every downstream feature in the last digits.
BAND_DECIMALS = 6

BAND_EDGES_HZ = (0.01, 1.0)
TONIC_CUTOFF_HZ = 0.05
PHASIC_EDGES_HZ = (0.1, 0.5)
FILTER_ORDER = 4


class FilterKind(Enum):
    LOWPASS = "lowpass"
    BANDPASS = "bandpass"


@dataclass(frozen=True)
class FilterCoefficients:
    b: np.ndarray
    a: np.ndarray
    kind: FilterKind
    order: int
    edges_hz: tuple[float, ...]
    fs_hz: float


@dataclass(frozen=True)
class DecomposedSignal:
    band: np.ndarray
    tonic: np.ndarray
    phasic: np.ndarray
    fs_hz: float


def design_butterworth(kind: FilterKind, order: int, edges_hz, fs_hz: float
                       ) -> FilterCoefficients:
    """Digital Butterworth design (analog prototype + prewarped bilinear map)."""
    edges = np.atleast_1d(np.asarray(edges_hz, dtype=float))
    nyquist = fs_hz / 2.0
    if np.any(edges <= 0) or np.any(edges >= nyquist):
        raise EdgeAboveNyquist(
            f"edges {edges.tolist()} outside (0, {nyquist}) Hz")
    if order < 1:
        raise ValueError("order must be >= 1")
    btype = "lowpass" if kind is FilterKind.LOWPASS else "bandpass"
    wn = edges / nyquist
    b, a = sig.butter(order, wn[0] if kind is FilterKind.LOWPASS else wn,
                      btype=btype)
    if not np.all(np.isfinite(b)) or not np.all(np.isfinite(a)):
        raise UnstableDesign("non-finite coefficients")
    poles = np.roots(a)
    if np.any(np.abs(poles) >= 1.0):
        raise UnstableDesign(
            f"pole radius {np.abs(poles).max():.6f} outside unit circle")
    return FilterCoefficients(b=b, a=a, kind=kind, order=order,
                              edges_hz=tuple(edges.tolist()), fs_hz=fs_hz)


def frequency_response(coeffs: FilterCoefficients, freqs_hz) -> np.ndarray:
    """Single-pass |H(f)| evaluated at the given frequencies."""
    w = 2.0 * np.pi * np.asarray(freqs_hz, dtype=float) / coeffs.fs_hz
    _, h = sig.freqz(coeffs.b, coeffs.a, worN=w)
    return np.abs(h)


def _padlen(coeffs: FilterCoefficients) -> int:
    return 3 * (max(len(coeffs.a), len(coeffs.b)) - 1)


def filtfilt(coeffs: FilterCoefficients, x: np.ndarray) -> np.ndarray:
    """Zero-phase forward-backward filtering with odd-reflection padding."""
    x = np.asarray(x, dtype=float)
    min_len = 3 * max(len(coeffs.a), len(coeffs.b))
    if len(x) <= min_len:
        raise SignalTooShort(
            f"need more than {min_len} samples, got {len(x)}")
    return sig.filtfilt(coeffs.b, coeffs.a, x, padtype="odd",
                        padlen=_padlen(coeffs))


def minmax_normalize(x: np.ndarray) -> np.ndarray:
    """Map to [0, 1]; a constant signal maps to all zeros."""
    x = np.asarray(x, dtype=float)
    if len(x) == 0:
        raise ValueError("empty signal")
    lo = x.min()
    span = x.max() - lo
    if span <= 1e-12 * max(1.0, np.abs(x).max()):
        return np.zeros_like(x)
    return (x - lo) / span


def band_filters(fs_hz: float):
    bp = design_butterworth(FilterKind.BANDPASS, FILTER_ORDER, BAND_EDGES_HZ, fs_hz)
    lp = design_butterworth(FilterKind.LOWPASS, FILTER_ORDER, TONIC_CUTOFF_HZ, fs_hz)
    ph = design_butterworth(FilterKind.BANDPASS, FILTER_ORDER, PHASIC_EDGES_HZ, fs_hz)
    return bp, lp, ph


def decompose(segment: Segment) -> DecomposedSignal:
    """Band-limit, normalize and split a segment into tonic/phasic components.

    The raw samples are min-max normalized before filtering; the band-pass
    output is normalized again.  The pre-pass is a no-op in exact arithmetic
    (the filter is linear and the second normalization removes any affine
    map) but it pins the numerical scale, which together with the
    ``BAND_DECIMALS`` snap makes features exactly invariant to affine
    rescaling of the raw conductance.
    """
    fs = segment.sample_rate_hz
    bp, lp, ph = band_filters(fs)
    x = np.asarray(segment.samples, dtype=float)
    if np.ptp(x) <= 1e-12 * max(1.0, np.abs(x).max()):
        z = np.zeros_like(x)
        return DecomposedSignal(band=z, tonic=z.copy(), phasic=z.copy(), fs_hz=fs)
    band = filtfilt(bp, minmax_normalize(x))
    band = np.round(minmax_normalize(band), BAND_DECIMALS)
    tonic = filtfilt(lp, band)
    phasic = filtfilt(ph, band)
    return DecomposedSignal(band=band, tonic=tonic, phasic=phasic, fs_hz=fs)
