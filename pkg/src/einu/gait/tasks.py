"""Task definitions and the open-loop component of the hybrid policy.

Each task pairs a hand-designed time-parameterized joint trajectory a(t)
with a bounded learned feedback term.  Walk and gallop expose a 2-D
feedback over (stride-amplitude delta, frequency delta); standup and pose
expose a 1-D timing modulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..config import GaitConfig, PhysicsConfig
from ..errors import DimensionMismatch
from ..sim.physics import JointTargets, stance_angles, N_LEGS

TASKS = ("walk", "gallop", "standup", "pose")

TASK_BOUNDS = {
    "walk": 0.4,
    "gallop": 0.3,
    "standup": 0.1,
    "pose": 0.1,
}

WALK_OFFSETS = (0.0, 0.5, 0.25, 0.75)      # lateral sequence FL FR HL HR
GALLOP_OFFSETS = (0.0, 0.1, 0.5, 0.6)      # front pair, rear pair


@dataclass(frozen=True)
class TaskSpec:
    task: str
    action_dim: int
    feedback_bounds: tuple[float, float]
    episode_length: int
    gait: GaitConfig = field(default_factory=GaitConfig)
    phase_offsets: tuple[float, float, float, float] = WALK_OFFSETS
    duty_factor: float = 0.75
    pose_target: tuple[float, float] = (0.4, -0.8)  # hip, knee held in "pose"

    @property
    def bound(self) -> float:
        return self.feedback_bounds[1]


def make_task_spec(task: str, gait: GaitConfig | None = None,
                   episode_length: int = 400) -> TaskSpec:
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    gait = gait or GaitConfig()
    b = TASK_BOUNDS[task]
    if task in ("walk", "gallop"):
        return TaskSpec(
            task=task, action_dim=2, feedback_bounds=(-b, b),
            episode_length=episode_length, gait=gait,
            phase_offsets=WALK_OFFSETS if task == "walk" else GALLOP_OFFSETS,
            duty_factor=gait.duty_factor if task == "walk" else gait.gallop_duty_factor,
        )
    return TaskSpec(task=task, action_dim=1, feedback_bounds=(-b, b),
                    episode_length=episode_length, gait=gait)


def ramp_gain(t: float, gait: GaitConfig, stop_time: float | None = None) -> float:
    """Sigmoid amplitude ramp at start, mirrored when stopping."""
    up = 1.0 / (1.0 + math.exp(-gait.ramp_k * (t - gait.ramp_t0)))
    if stop_time is None:
        return up
    down = 1.0 / (1.0 + math.exp(gait.ramp_k * (t - stop_time - gait.ramp_t0)))
    return min(up, down)


def cyclic_leg_targets(leg_phase: float, amplitude: float, knee_lift: float,
                       duty: float, config: PhysicsConfig) -> tuple[float, float]:
    """Hip/knee targets for one leg at a point in its cycle.

    Stance (phase < duty): hip sweeps +amp -> -amp, knee held at stance.
    Swing: hip returns along a half-cosine while the knee flexes clear of
    the ground.
    """
    p = leg_phase % 1.0
    if p < duty:
        u = p / duty
        hip = config.stance_hip + amplitude * (1.0 - 2.0 * u)
        knee = config.stance_knee
    else:
        u = (p - duty) / (1.0 - duty)
        hip = config.stance_hip - amplitude * math.cos(math.pi * u)
        knee = config.stance_knee - knee_lift * math.sin(math.pi * u)
    return hip, knee


def gait_targets(spec: TaskSpec, phase: float, amplitude: float,
                 config: PhysicsConfig,
                 turn_bias: float = 0.0) -> JointTargets:
    """Joint targets for all four legs at a global phase (cycles).

    turn_bias in [-1, 1] scales left/right stride asymmetrically to steer:
    positive turns toward +yaw (left).
    """
    lift = spec.gait.knee_lift * (amplitude / max(spec.gait.stride_amplitude, 1e-9))
    out = np.empty(8)
    for leg in range(N_LEGS):
        # legs 0,2 are left (+y); stride shrinks on the inside of the turn
        side = 1.0 if leg % 2 == 0 else -1.0
        amp = amplitude * (1.0 - 0.5 * side * turn_bias)
        hip, knee = cyclic_leg_targets(phase + spec.phase_offsets[leg], amp,
                                       lift, spec.duty_factor, config)
        out[2 * leg], out[2 * leg + 1] = hip, knee
    return JointTargets(out, config)


def standup_progress(s: float) -> float:
    """Crouch-to-stance progress with a pause ("brake") at the halfway pose."""
    s = min(max(s, 0.0), 1.0)
    if s < 0.4:
        return 0.5 * (s / 0.4)
    if s < 0.6:
        return 0.5
    return 0.5 + 0.5 * (s - 0.6) / 0.4


def standup_targets(spec: TaskSpec, t: float, config: PhysicsConfig,
                    time_scale: float = 1.0) -> JointTargets:
    g = spec.gait
    p = standup_progress(time_scale * t / g.standup_duration)
    crouch = np.tile([g.crouch_hip, g.crouch_knee], N_LEGS)
    return JointTargets(crouch + p * (stance_angles(config) - crouch), config)


def pose_targets(spec: TaskSpec, t: float, config: PhysicsConfig,
                 time_scale: float = 1.0) -> JointTargets:
    """Ease from stance into the configured held pose along a sigmoid."""
    g = spec.gait
    gain = ramp_gain(time_scale * t, g)
    target = np.tile(spec.pose_target, N_LEGS)
    return JointTargets(stance_angles(config) + gain * (target - stance_angles(config)),
                        config)


def open_loop_signal(spec: TaskSpec, t: float,
                     config: PhysicsConfig | None = None,
                     stop_time: float | None = None) -> JointTargets:
    """The pure user policy a(t): joint targets as a function of time only."""
    if t < 0:
        raise ValueError("t must be >= 0")
    config = config or PhysicsConfig()
    if spec.task in ("walk", "gallop"):
        amp = spec.gait.stride_amplitude * ramp_gain(t, spec.gait, stop_time)
        return gait_targets(spec, spec.gait.frequency * t, amp, config)
    if spec.task == "standup":
        return standup_targets(spec, t, config)
    return pose_targets(spec, t, config)


def hybrid_action(a_t: np.ndarray, feedback: np.ndarray,
                  bounds: tuple[float, float]) -> np.ndarray:
    """a(t) + clamp(feedback, lo, hi), componentwise.

    With bounds (0, 0) the result equals a_t exactly (fully user-specified).
    """
    a_t = np.asarray(a_t, dtype=float)
    feedback = np.asarray(feedback, dtype=float)
    if a_t.shape != feedback.shape:
        raise DimensionMismatch(
            f"feedback shape {feedback.shape} != action shape {a_t.shape}")
    lo, hi = bounds
    return a_t + np.clip(feedback, lo, hi)
