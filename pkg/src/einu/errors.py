"""Exception types shared across the package."""


class EinuError(Exception):
    """Base class for all package errors."""


# --- simulation ---

class InvalidParams(EinuError):
    pass


class NonFiniteState(EinuError):
    pass


class PoseUnderTerrain(EinuError):
    pass


# --- gait / RL ---

class DimensionMismatch(EinuError):
    pass


class NonFiniteGradient(EinuError):
    pass


# --- audio ---

class MalformedFile(EinuError):
    pass


class UnsupportedEncoding(EinuError):
    pass


class BadFrameLength(EinuError):
    pass


class TooFewFilters(EinuError):
    pass


class TooShort(EinuError):
    pass


# --- localization ---

class Degenerate(EinuError):
    pass


class NoSignal(EinuError):
    pass


# --- emotion ---

class BadFrameDim(EinuError):
    pass


class BadFeatureDim(EinuError):
    pass


class NonFiniteLoss(EinuError):
    pass


class NoInput(EinuError):
    pass


class UnknownEmotion(EinuError):
    pass


# --- checkpoints ---

class BadMagic(EinuError):
    pass


class VersionMismatch(EinuError):
    pass


class LengthMismatch(EinuError):
    pass
