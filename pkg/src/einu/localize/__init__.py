from .tdoa import (
    MicArray,
    ArrivalSet,
    Bearing,
    MultilaterationResult,
    simulate_arrivals,
    pair_bearing,
    azimuth_from_cross,
    multilaterate,
    detect_onsets,
)

__all__ = [
    "MicArray",
    "ArrivalSet",
    "Bearing",
    "MultilaterationResult",
    "simulate_arrivals",
    "pair_bearing",
    "azimuth_from_cross",
    "multilaterate",
    "detect_onsets",
]
