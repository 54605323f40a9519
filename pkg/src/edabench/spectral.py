"""Welch PSD estimation and spectral-structure features.

The estimator averages Hann-windowed, mean-removed periodograms over 50%
overlapping segments and returns a one-sided spectrum whose interior bins
are doubled, so that sum(power) * df matches the time-domain variance
(Parseval).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadBand, SegmentTooLong, TooFewBins

DEFAULT_SEGMENT_LEN = 128
DEFAULT_OVERLAP = 0.5


@dataclass(frozen=True)
class PsdEstimate:
    freqs_hz: np.ndarray
    power: np.ndarray
    df_hz: float
    segment_len: int
    overlap: float
    fs_hz: float


def welch_psd(x: np.ndarray, fs_hz: float,
              segment_len: int | None = None,
              overlap: float = DEFAULT_OVERLAP) -> PsdEstimate:
    x = np.asarray(x, dtype=float)
    n = len(x)
    if segment_len is None:
        segment_len = min(DEFAULT_SEGMENT_LEN, n)
    if segment_len > n:
        raise SegmentTooLong(f"segment_len {segment_len} > signal length {n}")
    if not (0 <= overlap < 1):
        raise ValueError("overlap must be in [0, 1)")
    segment_len -= segment_len % 2  # keep the Nyquist bin at exactly fs/2
    if segment_len < 2:
        raise SegmentTooLong("signal too short for spectral estimation")

    window = np.hanning(segment_len)
    u = np.sum(window ** 2)
    step = max(1, int(round(segment_len * (1.0 - overlap))))
    acc = np.zeros(segment_len // 2 + 1)
    count = 0
    for start in range(0, n - segment_len + 1, step):
        seg = x[start:start + segment_len]
        seg = seg - seg.mean()
        spec = np.fft.rfft(seg * window)
        p = (spec.real ** 2 + spec.imag ** 2) / (fs_hz * u)
        p[1:-1] *= 2.0  # one-sided: double everything but DC and Nyquist
        acc += p
        count += 1
    power = acc / count
    freqs = np.fft.rfftfreq(segment_len, d=1.0 / fs_hz)
    return PsdEstimate(freqs_hz=freqs, power=power, df_hz=fs_hz / segment_len,
                       segment_len=segment_len, overlap=overlap, fs_hz=fs_hz)


def count_spectral_peaks(psd: PsdEstimate) -> int:
    """Number of slope sign changes (+ to -); plateau ties credit the leftmost bin."""
    p = psd.power
    if len(p) < 3:
        raise TooFewBins("need at least 3 PSD bins")
    rising = p[:-2] < p[1:-1]
    falling = p[1:-1] >= p[2:]
    return int(np.count_nonzero(rising & falling))


def second_spectral_peak(psd: PsdEstimate) -> float:
    """Max of the PSD after masking the dominant peak out to its flanking minima."""
    p = psd.power
    if len(p) < 3:
        raise TooFewBins("need at least 3 PSD bins")
    g = int(np.argmax(p))
    lo = g
    while lo > 0 and p[lo - 1] <= p[lo]:
        lo -= 1
    hi = g
    while hi < len(p) - 1 and p[hi + 1] <= p[hi]:
        hi += 1
    rest = np.concatenate([p[:lo], p[hi + 1:]])
    return float(rest.max()) if rest.size else 0.0


def band_power(psd: PsdEstimate, lo_hz: float, hi_hz: float) -> float:
    """Rectangle-rule integral of the PSD over [lo, hi).

    The Nyquist bin is included when hi equals fs/2, so the full band
    recovers the Parseval total.
    """
    if not (0 <= lo_hz < hi_hz <= psd.fs_hz / 2):
        raise BadBand(f"band [{lo_hz}, {hi_hz}] outside [0, {psd.fs_hz / 2}]")
    mask = (psd.freqs_hz >= lo_hz) & (psd.freqs_hz < hi_hz)
    if hi_hz == psd.fs_hz / 2:
        mask |= psd.freqs_hz == hi_hz
    return float(np.sum(psd.power[mask]) * psd.df_hz)
