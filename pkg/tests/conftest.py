import numpy as np
import pytest

from edabench.ingest import Condition, Segment

FS = 4.0


def make_segment(samples, subject="S01", label=Condition.REST, fs=FS):
    return Segment(subject_id=subject, label=label, sample_rate_hz=fs,
                   samples=np.asarray(samples, dtype=float))


def bump_train(duration_s, onsets_s, rise_tau=0.5, decay_tau=2.0,
               amplitude=1.0, baseline=2.0, drift=0.002, noise_sd=0.0,
               seed=0, fs=FS):
    """Raw signal with difference-of-exponential bumps; returns (x, peak_idx)."""
    n = int(duration_s * fs)
    t = np.arange(n) / fs
    x = baseline + drift * t
    truth = []
    for o in onsets_s:
        tt = t - o
        shape = np.where(tt >= 0,
                         np.exp(-tt / decay_tau) - np.exp(-tt / rise_tau), 0.0)
        x = x + amplitude * shape / shape.max()
        t_peak = o + (decay_tau * rise_tau / (decay_tau - rise_tau)) \
            * np.log(decay_tau / rise_tau)
        truth.append(round(t_peak * fs))
    if noise_sd > 0:
        x = x + noise_sd * np.random.default_rng(seed).standard_normal(n)
    return x, truth


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
