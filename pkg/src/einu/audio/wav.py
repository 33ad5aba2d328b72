"""WAV ingestion: RIFF/PCM16 parsing, downmix, and resampling to 16 kHz."""

from __future__ import annotations

import io
import struct
import wave
from dataclasses import dataclass

import numpy as np

from ..errors import MalformedFile, UnsupportedEncoding

TARGET_RATE = 16000


@dataclass(frozen=True)
class SampleBuffer:
    """Mono float samples in [-1, 1) at a known sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if len(self.samples) == 0:
            raise ValueError("empty sample buffer")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("non-finite samples")

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def _resample_linear(x: np.ndarray, rate_in: int, rate_out: int) -> np.ndarray:
    if rate_in == rate_out:
        return x
    n_out = max(1, int(round(len(x) * rate_out / rate_in)))
    t_out = np.arange(n_out) * (rate_in / rate_out)
    return np.interp(t_out, np.arange(len(x)), x)


def read_wav(data: bytes) -> SampleBuffer:
    """Decode a PCM16 RIFF/WAVE byte string into a 16 kHz mono buffer.

    Stereo is downmixed by channel average; other rates are linearly
    resampled.
    """
    try:
        wf = wave.open(io.BytesIO(data), "rb")
    except (wave.Error, EOFError, struct.error) as exc:
        raise MalformedFile(f"not a readable RIFF/WAVE file: {exc}") from exc
    try:
        n_channels = wf.getnchannels()
        sampwidth = wf.getsampwidth()
        rate = wf.getframerate()
        n_frames = wf.getnframes()
        if sampwidth != 2:
            raise UnsupportedEncoding(f"only PCM 16-bit supported, got {8 * sampwidth}-bit")
        if n_channels not in (1, 2):
            raise UnsupportedEncoding(f"only mono/stereo supported, got {n_channels} channels")
        raw = wf.readframes(n_frames)
    except wave.Error as exc:
        raise MalformedFile(str(exc)) from exc
    finally:
        wf.close()

    if len(raw) < 2 * n_channels:
        raise MalformedFile("no sample data")
    usable = len(raw) - len(raw) % (2 * n_channels)
    ints = np.frombuffer(raw[:usable], dtype="<i2").astype(np.float64)
    if n_channels == 2:
        ints = ints.reshape(-1, 2).mean(axis=1)
    samples = ints / 32768.0
    samples = _resample_linear(samples, rate, TARGET_RATE)
    return SampleBuffer(samples=samples, sample_rate=TARGET_RATE)
