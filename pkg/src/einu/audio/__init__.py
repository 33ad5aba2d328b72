from .wav import SampleBuffer, read_wav
from .mfcc import (
    MfccSequence,
    power_spectrum,
    mel_filterbank,
    mfcc_sequence,
    hz_to_mel,
    mel_to_hz,
)

__all__ = [
    "SampleBuffer",
    "read_wav",
    "MfccSequence",
    "power_spectrum",
    "mel_filterbank",
    "mfcc_sequence",
    "hz_to_mel",
    "mel_to_hz",
]
