"""Runtime configuration: every tunable constant in one place, loadable
from a JSON file with sections {physics, gait, ppo, mfcc, array,
arbitration, feedback_map}."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class PhysicsConfig:
    dt: float = 0.001                 # s, physics step
    control_dt: float = 0.025         # s, one policy action per control step
    gravity: float = 9.81
    trunk_mass: float = 5.0           # kg
    body_length: float = 0.4          # m, hip-to-hip longitudinal
    body_width: float = 0.2           # m, hip-to-hip lateral
    link_length: float = 0.15         # m, thigh and shank each
    joint_inertia: float = 0.01       # kg m^2, effective servo inertia
    kp: float = 40.0                  # N m / rad
    kd: float = 1.0                   # N m s / rad
    torque_limit: float = 8.0         # N m
    joint_limit_hip: float = 1.4      # rad, symmetric about stance
    joint_limit_knee: float = 2.0     # rad
    contact_stiffness: float = 5.0e5  # N/m; softer springs (~4e3) cannot hold
    contact_damping: float = 500.0    # the 5 mm penetration bound at 5 kg
    friction: float = 0.8
    penetration_tolerance: float = 0.001  # m
    fall_height_fraction: float = 0.4
    roll_limit: float = 0.8           # rad
    pitch_limit: float = 0.8          # rad
    stance_hip: float = 0.4           # rad, nominal stance joint angles
    stance_knee: float = -0.8         # rad


@dataclass
class GaitConfig:
    frequency: float = 0.9            # Hz
    stride_amplitude: float = 0.28    # rad, hip sweep
    knee_lift: float = 0.20           # rad, swing flexion
    duty_factor: float = 0.80         # stance fraction for walk
    gallop_duty_factor: float = 0.45
    ramp_k: float = 8.0               # sigmoid steepness
    ramp_t0: float = 0.5              # s, sigmoid midpoint
    standup_duration: float = 2.0     # s
    crouch_hip: float = 0.9
    crouch_knee: float = -1.9


@dataclass
class PpoConfig:
    horizon: int = 2048               # control steps per rollout
    epochs: int = 10
    minibatch_size: int = 64
    clip_eps: float = 0.2
    lr: float = 3e-4
    gamma: float = 0.99
    lam: float = 0.95
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    hidden: int = 64
    init_log_std: float = -0.7
    episode_length: int = 400         # control steps (10 s at 40 Hz)
    n_envs: int = 1


@dataclass
class MfccSettings:
    sample_rate: int = 16000
    frame_len: int = 400
    hop: int = 160
    n_fft: int = 512
    n_filters: int = 64
    n_coeffs: int = 40
    preemphasis: float = 0.97
    log_floor: float = 1e-10


@dataclass
class ArraySettings:
    spacing: float = 0.1
    speed_of_sound: float = 343.0
    onset_threshold: float = 0.05
    sim_sample_rate: int = 48000


@dataclass
class ArbitrationConfig:
    window_s: float = 0.5
    urgency_cutoff_rank: int = 4


@dataclass
class EinuConfig:
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    gait: GaitConfig = field(default_factory=GaitConfig)
    ppo: PpoConfig = field(default_factory=PpoConfig)
    mfcc: MfccSettings = field(default_factory=MfccSettings)
    array: ArraySettings = field(default_factory=ArraySettings)
    arbitration: ArbitrationConfig = field(default_factory=ArbitrationConfig)
    feedback_map: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            out[f.name] = dataclasses.asdict(v) if dataclasses.is_dataclass(v) else v
        return out

    @classmethod
    def from_json_dict(cls, doc: dict) -> "EinuConfig":
        kwargs = {}
        sections = {
            "physics": PhysicsConfig, "gait": GaitConfig, "ppo": PpoConfig,
            "mfcc": MfccSettings, "array": ArraySettings,
            "arbitration": ArbitrationConfig,
        }
        for name, klass in sections.items():
            if name in doc:
                kwargs[name] = klass(**doc[name])
        if "feedback_map" in doc:
            kwargs["feedback_map"] = doc["feedback_map"]
        return cls(**kwargs)


def load_config(path: str | Path | None) -> EinuConfig:
    if path is None:
        return EinuConfig()
    doc = json.loads(Path(path).read_text())
    return EinuConfig.from_json_dict(doc)


def save_config(config: EinuConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_json_dict(), indent=2))
