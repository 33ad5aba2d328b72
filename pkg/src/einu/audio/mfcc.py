"""40-dimensional MFCC extraction: framing, power spectrum, mel filterbank,
log compression, and orthonormal DCT-II.

Front-end constants (16 kHz, 25 ms frames, 10 ms hop, Hamming window,
512-point transform, 64 mel filters, log floor 1e-10) are exposed as module
defaults and through MfccConfig.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from ..errors import BadFrameLength, TooFewFilters, TooShort
from .wav import SampleBuffer

SAMPLE_RATE = 16000
FRAME_LEN = 400        # 25 ms
HOP = 160              # 10 ms
N_FFT = 512
N_BINS = N_FFT // 2 + 1
N_FILTERS = 64
N_COEFFS = 40
PREEMPHASIS = 0.97
LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class MfccConfig:
    sample_rate: int = SAMPLE_RATE
    frame_len: int = FRAME_LEN
    hop: int = HOP
    n_fft: int = N_FFT
    n_filters: int = N_FILTERS
    n_coeffs: int = N_COEFFS
    preemphasis: float = PREEMPHASIS
    log_floor: float = LOG_FLOOR


@dataclass(frozen=True)
class MfccSequence:
    """T x 40 cepstral frames, 25 ms frame / 10 ms hop at 16 kHz."""

    frames: np.ndarray
    frame_duration: float = 0.025
    hop: float = 0.010

    def __post_init__(self):
        if self.frames.ndim != 2 or self.frames.shape[1] != N_COEFFS:
            raise ValueError(f"frames must be Tx{N_COEFFS}")
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("non-finite cepstral coefficients")

    def to_json_dict(self) -> dict:
        return {
            "sample_rate": SAMPLE_RATE,
            "hop": self.hop,
            "frames": self.frames.tolist(),
        }


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=float) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)


def power_spectrum(frame: np.ndarray, config: MfccConfig = MfccConfig()) -> np.ndarray:
    """Pre-emphasized, Hamming-windowed power spectrum of one frame.

    Returns bins 0..n_fft/2 of |DFT|^2 / n_fft after zero-padding to n_fft.
    """
    frame = np.asarray(frame, dtype=float)
    if frame.shape != (config.frame_len,):
        raise BadFrameLength(f"expected {config.frame_len} samples, got {frame.shape}")
    emph = np.empty_like(frame)
    emph[0] = frame[0]
    emph[1:] = frame[1:] - config.preemphasis * frame[:-1]
    windowed = emph * np.hamming(config.frame_len)
    spec = np.fft.rfft(windowed, n=config.n_fft)
    return (spec.real ** 2 + spec.imag ** 2) / config.n_fft


def mel_filterbank(n_filters: int = N_FILTERS,
                   f_lo: float = 0.0,
                   f_hi: float = SAMPLE_RATE / 2,
                   n_bins: int = N_BINS,
                   sample_rate: int = SAMPLE_RATE,
                   n_fft: int = N_FFT) -> np.ndarray:
    """Triangular mel filters, peak-normalized to 1, as an (n_filters, n_bins)
    weight matrix over FFT bin frequencies."""
    if n_filters < N_COEFFS:
        raise TooFewFilters(f"need at least {N_COEFFS} filters, got {n_filters}")
    mel_pts = np.linspace(hz_to_mel(f_lo), hz_to_mel(f_hi), n_filters + 2)
    hz_pts = mel_to_hz(mel_pts)
    bin_freqs = np.arange(n_bins) * sample_rate / n_fft
    weights = np.zeros((n_filters, n_bins))
    for i in range(n_filters):
        lo, ctr, hi = hz_pts[i], hz_pts[i + 1], hz_pts[i + 2]
        up = (bin_freqs - lo) / (ctr - lo)
        down = (hi - bin_freqs) / (hi - ctr)
        weights[i] = np.maximum(0.0, np.minimum(up, down))
    return weights


def frame_count(n_samples: int, config: MfccConfig = MfccConfig()) -> int:
    return (n_samples - config.frame_len) // config.hop + 1


def mfcc_sequence(buffer: SampleBuffer, config: MfccConfig = MfccConfig()) -> MfccSequence:
    """Full MFCC pipeline over a 16 kHz buffer.

    Per frame: power spectrum -> mel energies -> log (floored) ->
    orthonormal DCT-II -> first 40 coefficients.
    """
    if buffer.sample_rate != config.sample_rate:
        raise ValueError(f"buffer must be at {config.sample_rate} Hz")
    x = np.asarray(buffer.samples, dtype=float)
    if len(x) < config.frame_len:
        raise TooShort(f"need at least {config.frame_len} samples, got {len(x)}")
    fbank = mel_filterbank(config.n_filters, 0.0, config.sample_rate / 2,
                           config.n_fft // 2 + 1, config.sample_rate, config.n_fft)
    n_frames = frame_count(len(x), config)
    out = np.empty((n_frames, config.n_coeffs))
    for t in range(n_frames):
        frame = x[t * config.hop: t * config.hop + config.frame_len]
        pspec = power_spectrum(frame, config)
        mel = fbank @ pspec
        logmel = np.log(np.maximum(mel, config.log_floor))
        cep = scipy.fft.dct(logmel, type=2, norm="ortho")
        out[t] = cep[: config.n_coeffs]
    return MfccSequence(frames=out)
