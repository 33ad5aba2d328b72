"""Sound source direction and position from a four-microphone cross array.

Microphones sit at (+d/2,0), (-d/2,0), (0,+d/2), (0,-d/2) in the robot
frame.  The delay of each opposite pair gives a direction cosine; the two
orthogonal pairs together give a full azimuth, and a Gauss-Newton solve on
the range differences recovers the source position in the near field.

Sign convention: dt_x = t(mic -x) - t(mic +x), so dt_x is positive when
the +x microphone hears the sound first (source toward +x).  Same for y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import Degenerate, NoSignal


@dataclass(frozen=True)
class MicArray:
    """Cross-shaped planar array of four microphones."""

    spacing: float = 0.1          # m between opposite mics
    speed_of_sound: float = 343.0  # m/s

    def __post_init__(self):
        if self.spacing <= 0 or self.speed_of_sound <= 0:
            raise ValueError("spacing and speed of sound must be positive")

    @property
    def positions(self) -> np.ndarray:
        """4x2 positions in the robot frame: +x, -x, +y, -y."""
        h = self.spacing / 2.0
        return np.array([[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])

    @property
    def max_delay(self) -> float:
        """Largest possible |dt| for an opposite pair."""
        return self.spacing / self.speed_of_sound


@dataclass(frozen=True)
class ArrivalSet:
    """Arrival times (s) at the four mics, ordered +x, -x, +y, -y."""

    times: tuple[float, float, float, float]

    @property
    def dt_x(self) -> float:
        return self.times[1] - self.times[0]

    @property
    def dt_y(self) -> float:
        return self.times[3] - self.times[2]


@dataclass(frozen=True)
class Bearing:
    azimuth: float      # rad, in [0, 2*pi)
    confidence: float   # [0, 1]; 0 flags the degenerate symmetric case


@dataclass
class MultilaterationResult:
    position: np.ndarray
    converged: bool
    iterations: int
    residual_norm: float = field(default=float("nan"))


def simulate_arrivals(source: np.ndarray | tuple[float, float],
                      emission_time: float,
                      array: MicArray) -> ArrivalSet:
    """Exact continuous-time arrivals of a planar source at each mic."""
    p = np.asarray(source, dtype=float)
    if not np.all(np.isfinite(p)) or p.shape != (2,):
        raise ValueError("source must be a finite 2-D position")
    dists = np.linalg.norm(array.positions - p[None, :], axis=1)
    t = emission_time + dists / array.speed_of_sound
    return ArrivalSet(times=tuple(float(x) for x in t))


def pair_bearing(dt: float, d: float, v: float) -> float:
    """Angle between the pair axis and the source direction.

    theta = arccos(dt*v/d), clamped so onset-quantization overshoot of the
    unit interval never raises.
    """
    if d <= 0 or v <= 0:
        raise ValueError("d and v must be positive")
    c = min(1.0, max(-1.0, dt * v / d))
    return math.acos(c)


def azimuth_from_cross(dt_x: float, dt_y: float, array: MicArray) -> Bearing:
    """Far-field azimuth from the two orthogonal pair delays."""
    v, d = array.speed_of_sound, array.spacing
    ux = min(1.0, max(-1.0, dt_x * v / d))
    uy = min(1.0, max(-1.0, dt_y * v / d))
    r2 = ux * ux + uy * uy
    if r2 < 1e-6:
        return Bearing(azimuth=0.0, confidence=0.0)
    az = math.atan2(uy, ux) % (2.0 * math.pi)
    return Bearing(azimuth=az, confidence=min(1.0, r2))


def multilaterate(arrivals: ArrivalSet,
                  array: MicArray,
                  init: Bearing | None = None,
                  max_iter: int = 50,
                  step_tol: float = 1e-9) -> MultilaterationResult:
    """Source position from range differences, Gauss-Newton least squares.

    Residuals are rho_i(p) = (|p - mic_i| - |p - mic_0|) - v*(t_i - t_0).
    Initialized at range 5d along the far-field azimuth unless `init` is
    given.  Raises Degenerate when every pair delay is ~0 (the source sits
    on the symmetry axis of a planar array and its position is
    unobservable).
    """
    mics = array.positions
    v = array.speed_of_sound
    t = np.asarray(arrivals.times, dtype=float)

    eps = 1e-12
    if abs(arrivals.dt_x) < eps and abs(arrivals.dt_y) < eps:
        raise Degenerate("all pair delays are zero; source on the symmetry axis")

    bearing = init or azimuth_from_cross(arrivals.dt_x, arrivals.dt_y, array)
    r0 = 5.0 * array.spacing
    p = np.array([r0 * math.cos(bearing.azimuth), r0 * math.sin(bearing.azimuth)])

    meas = v * (t[1:] - t[0])
    best_p, best_norm = p.copy(), float("inf")
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        diffs = p[None, :] - mics           # 4x2
        dists = np.linalg.norm(diffs, axis=1)
        dists = np.maximum(dists, 1e-12)
        rho = (dists[1:] - dists[0]) - meas
        grads = diffs / dists[:, None]      # unit vectors mic->p
        jac = grads[1:] - grads[0]          # 3x2
        norm = float(np.linalg.norm(rho))
        if norm < best_norm:
            best_norm, best_p = norm, p.copy()
        step, *_ = np.linalg.lstsq(jac, -rho, rcond=None)
        p = p + step
        if float(np.linalg.norm(step)) < step_tol:
            converged = True
            break

    if converged:
        best_p = p
        best_norm = float(np.linalg.norm(
            (np.linalg.norm(p[None, :] - mics, axis=1)[1:]
             - np.linalg.norm(p - mics[0])) - meas))
    return MultilaterationResult(position=best_p, converged=converged,
                                 iterations=it, residual_norm=best_norm)


def detect_onsets(streams: np.ndarray, threshold: float, fs: float) -> ArrivalSet:
    """First-threshold-crossing onset times per microphone stream.

    `streams` is 4xN (order +x, -x, +y, -y) at sample rate fs.  The
    quantization error bound per pair delay is 2/fs.
    """
    streams = np.asarray(streams, dtype=float)
    if streams.ndim != 2 or streams.shape[0] != 4:
        raise ValueError("expected 4 equal-length streams")
    times = []
    for ch in streams:
        idx = np.flatnonzero(np.abs(ch) >= threshold)
        if idx.size == 0:
            raise NoSignal("a microphone never crossed the onset threshold")
        times.append(float(idx[0]) / fs)
    return ArrivalSet(times=tuple(times))
