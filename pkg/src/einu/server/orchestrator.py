"""The live control loop: stimuli in, localization + emotion inference +
arbitration, behavior execution through the gait controller, telemetry out.

One Orchestrator owns all mutable simulation state; network layers talk to
it exclusively through `post()` and the messages returned by `tick()`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..audio.mfcc import mfcc_sequence
from ..audio.wav import read_wav
from ..config import EinuConfig
from ..emotion.labels import (
    BehaviorCommand,
    EmotionLabel,
    FeedbackAction,
    arbitrate,
    behavior_for,
)
from ..errors import EinuError
from ..gait.envs import observe
from ..gait.policy import PolicyParams
from ..gait.tasks import (
    TaskSpec,
    gait_targets,
    hybrid_action,
    make_task_spec,
    ramp_gain,
)
from ..localize.tdoa import MicArray, azimuth_from_cross, detect_onsets
from ..sim.physics import (
    JointTargets,
    Pose,
    check_fall,
    reset as sim_reset,
    step as sim_step,
    stance_angles,
    wrap_angle,
)
from ..sim.terrain import Terrain

DEFAULT_MAX_TURN = 0.3  # differential-stride modulation limit


def turn_to_heading(current_yaw: float, target_azimuth: float,
                    max_turn_rate: float = DEFAULT_MAX_TURN,
                    dt: float = 0.025) -> float:
    """Proportional steering command along the shortest angular path."""
    error = wrap_angle(target_azimuth - current_yaw)
    k = 2.0
    return float(np.clip(k * error, -max_turn_rate, max_turn_rate))


@dataclass
class SoundEvent:
    """A sound placed in the world, either operator-labeled or as a
    waveform file to run through the MFCC + audio-net path."""

    position: tuple[float, float]
    emotion: str | None = None
    waveform: str | None = None
    timestamp: float = 0.0

    def to_json_dict(self) -> dict:
        return {"type": "place_sound", "x": self.position[0],
                "y": self.position[1], "emotion": self.emotion,
                "waveform": self.waveform}


@dataclass
class VideoFeatureEvent:
    features: np.ndarray
    timestamp: float = 0.0

    def to_json_dict(self) -> dict:
        return {"type": "video_features",
                "features": [float(v) for v in np.asarray(self.features)]}


@dataclass
class Telemetry:
    """Per-tick state snapshot in the wire format."""

    tick: int
    time: float
    base_pos: list[float]
    base_rpy: list[float]
    joints: list[float]
    behavior: str
    emotion: str | None
    heading_target: float | None

    def to_json_dict(self) -> dict:
        return {"type": "state", "tick": self.tick, "time": self.time,
                "base": {"pos": self.base_pos, "rpy": self.base_rpy},
                "joints": self.joints, "behavior": self.behavior,
                "emotion": self.emotion,
                "heading_target": self.heading_target}


class Orchestrator:
    """Advances the world one control step per tick, reacting to queued
    stimuli; every tick emits exactly one state message plus zero or more
    event messages."""

    def __init__(self, terrain: Terrain, policy: PolicyParams | None = None,
                 config: EinuConfig | None = None, seed: int = 0,
                 audio_net=None, video_net=None,
                 feedback_map: dict[EmotionLabel, FeedbackAction] | None = None,
                 playground: bool = False,
                 spec: TaskSpec | None = None):
        self.config = config or EinuConfig()
        self.terrain = terrain
        self.policy = policy
        self.audio_net = audio_net
        self.video_net = video_net
        self.feedback_map = feedback_map
        self.playground = playground
        self.seed = seed
        self.spec = spec or make_task_spec(
            "walk", gait=self.config.gait,
            episode_length=10 ** 9)  # the live loop has no episode end
        self.array = MicArray(spacing=self.config.array.spacing,
                              speed_of_sound=self.config.array.speed_of_sound)
        if self.policy is not None:
            self.policy.normalizer.frozen = True
        self.inbox: list = []
        self.event_log: list[tuple[int, dict]] = []
        self.paused = False
        self.reset()

    # ------------------------------------------------------------------
    # state management

    def reset(self, pose: Pose | None = None) -> None:
        self.world = sim_reset(self.terrain, pose,
                               config=self.config.physics, seed=self.seed)
        self.phase = 0.0
        self.behavior: BehaviorCommand | None = None
        self.emotion: EmotionLabel | None = None
        self.heading_target: float | None = None
        self.last_audio: tuple[EmotionLabel, float] | None = None
        self.last_video: tuple[EmotionLabel, float] | None = None
        self.last_azimuth: tuple[float, float] | None = None  # (world az, t)
        self._squat_t = 0.0
        self.control_tick = 0

    def set_terrain(self, terrain: Terrain) -> None:
        self.terrain = terrain
        self.reset()

    def set_pose(self, position, rpy) -> None:
        if not self.playground:
            raise EinuError("pose commands require playground mode")
        robot = self.world.robot
        robot.base_position = np.asarray(position, dtype=float).copy()
        robot.base_rpy = np.array([wrap_angle(a) for a in rpy])
        robot.base_linear_velocity = np.zeros(3)
        robot.base_angular_velocity = np.zeros(3)

    def post(self, event) -> None:
        self.inbox.append(event)

    # ------------------------------------------------------------------
    # stimulus processing

    def _localize(self, event: SoundEvent) -> float:
        """World-frame azimuth of a sound via the body-mounted mic array."""
        robot = self.world.robot
        yaw = robot.base_rpy[2]
        rel = np.asarray(event.position, dtype=float) - robot.base_position[:2]
        # rotate into the body frame the array is mounted in
        c, s = math.cos(-yaw), math.sin(-yaw)
        body = np.array([c * rel[0] - s * rel[1], s * rel[0] + c * rel[1]])

        from ..localize.tdoa import simulate_arrivals
        arrivals = simulate_arrivals(body, 0.0, self.array)
        fs = self.config.array.sim_sample_rate
        # render each arrival as a click stream and detect onsets, so the
        # reported bearing carries the real sampling quantization
        n = int(math.ceil((max(arrivals.times) + 0.01) * fs))
        streams = np.zeros((4, n))
        for ch, t in enumerate(arrivals.times):
            streams[ch, int(math.ceil(t * fs)):] = 1.0
        quantized = detect_onsets(streams, self.config.array.onset_threshold, fs)
        bearing = azimuth_from_cross(quantized.dt_x, quantized.dt_y, self.array)
        return wrap_angle(yaw + bearing.azimuth)

    def _audio_label(self, event: SoundEvent) -> EmotionLabel:
        if event.emotion is not None:
            return EmotionLabel.from_name(event.emotion)
        if event.waveform is None:
            raise EinuError("sound event needs an emotion hint or a waveform")
        if self.audio_net is None:
            raise EinuError("no audio emotion model loaded")
        buf = read_wav(Path(event.waveform).read_bytes())
        feats = mfcc_sequence(buf)
        probs = self.audio_net.forward(feats.frames)
        return list(EmotionLabel)[int(np.argmax(probs))]

    def _video_label(self, event: VideoFeatureEvent) -> EmotionLabel:
        if self.video_net is None:
            raise EinuError("no video emotion model loaded")
        feats = np.asarray(event.features, dtype=float)
        probs = self.video_net.forward(feats)
        return list(EmotionLabel)[int(np.argmax(probs))]

    def _process_events(self, now: float) -> tuple[list[dict], bool]:
        messages: list[dict] = []
        inferred = False
        events, self.inbox = self.inbox, []
        for event in events:
            self.event_log.append((self.control_tick, event.to_json_dict()))
            try:
                if isinstance(event, SoundEvent):
                    azimuth = self._localize(event)
                    label = self._audio_label(event)
                    self.last_audio = (label, now)
                    self.last_azimuth = (azimuth, now)
                    inferred = True
                    messages.append({"type": "event", "kind": "localized",
                                     "azimuth": azimuth,
                                     "position": [float(event.position[0]),
                                                  float(event.position[1])],
                                     "emotion": label.name.lower()})
                elif isinstance(event, VideoFeatureEvent):
                    label = self._video_label(event)
                    self.last_video = (label, now)
                    inferred = True
                else:
                    raise EinuError(f"unknown event type {type(event).__name__}")
            except EinuError as exc:
                messages.append({"type": "event", "kind": "error",
                                 "message": str(exc)})
            except (OSError, ValueError) as exc:
                messages.append({"type": "event", "kind": "error",
                                 "message": str(exc)})
        return messages, inferred

    def _arbitrate(self, now: float) -> dict | None:
        window = self.config.arbitration.window_s
        audio = self.last_audio[0] if (
            self.last_audio and now - self.last_audio[1] <= window) else None
        video = self.last_video[0] if (
            self.last_video and now - self.last_video[1] <= window) else None
        if audio is None and video is None:
            return None
        label = arbitrate(audio, video)
        azimuth = self.last_azimuth[0] if (
            self.last_azimuth and now - self.last_azimuth[1] <= window) else None
        command = behavior_for(label, azimuth, mapping=self.feedback_map)
        self.emotion = label
        self.behavior = command
        self._squat_t = 0.0
        if command.kind == "locomote_toward_sound":
            self.heading_target = command.azimuth
        else:
            self.heading_target = None
        return {"type": "event", "kind": "arbitrated",
                "emotion": label.name.lower(), "behavior": command.kind,
                "feedback": {"clip": command.feedback.sound_clip_id,
                             "face": command.feedback.face_expression_id}}

    # ------------------------------------------------------------------
    # physics

    def _advance(self) -> None:
        phys = self.config.physics
        spec = self.spec
        substeps = int(round(phys.control_dt / phys.dt))
        kind = self.behavior.kind if self.behavior else "walk"

        if kind == "squat":
            gait = self.config.gait
            crouch = np.tile([gait.crouch_hip, gait.crouch_knee], 4)
            stance = stance_angles(phys)
            for _ in range(substeps):
                gain = ramp_gain(self._squat_t, gait)
                targets = JointTargets(stance + gain * (crouch - stance), phys)
                self.world = sim_step(self.world, targets, phys.dt, phys)
                self._squat_t += phys.dt
            return

        base = np.array([spec.gait.stride_amplitude, spec.gait.frequency])
        feedback = np.zeros(2)
        if self.policy is not None:
            obs = observe(self.world)
            nobs = self.policy.normalizer.normalize(obs)
            feedback = self.policy.action_mean(nobs)[0]
        applied = hybrid_action(base, feedback, spec.feedback_bounds)
        amp = max(0.0, applied[0]) * ramp_gain(self.world.time, spec.gait)
        freq = max(0.0, applied[1])

        turn_bias = 0.0
        if kind == "locomote_toward_sound" and self.heading_target is not None:
            turn_bias = turn_to_heading(self.world.robot.base_rpy[2],
                                        self.heading_target)
        elif kind == "hold":
            amp = 0.0

        for _ in range(substeps):
            targets = gait_targets(spec, self.phase, amp, phys, turn_bias)
            self.world = sim_step(self.world, targets, phys.dt, phys)
            self.phase += freq * phys.dt

    # ------------------------------------------------------------------

    def tick(self) -> list[dict]:
        """One control step; returns the messages to broadcast (exactly one
        state message, after any event messages)."""
        now = self.world.time
        messages, inferred = self._process_events(now)
        if inferred:
            arb = self._arbitrate(now)
            if arb is not None:
                messages.append(arb)
        if not self.paused:
            self._advance()
        self.control_tick += 1
        robot = self.world.robot
        messages.append(Telemetry(
            tick=self.control_tick,
            time=self.world.time,
            base_pos=[float(v) for v in robot.base_position],
            base_rpy=[float(v) for v in robot.base_rpy],
            joints=[float(v) for v in robot.joint_angles],
            behavior=self.behavior.kind if self.behavior else "walk",
            emotion=self.emotion.name.lower() if self.emotion else None,
            heading_target=(float(self.heading_target)
                            if self.heading_target is not None else None),
        ).to_json_dict())
        return messages

    def fell(self) -> bool:
        return check_fall(self.world.robot, self.terrain, self.config.physics)


def run_script(orchestrator: Orchestrator,
               script: list[tuple[int, object]], ticks: int) -> list[dict]:
    """Headless replay: post each scripted (tick, event) pair at its tick
    and advance; returns the concatenated message stream."""
    pending = sorted(script, key=lambda item: item[0])
    messages: list[dict] = []
    idx = 0
    for t in range(ticks):
        while idx < len(pending) and pending[idx][0] <= t:
            orchestrator.post(pending[idx][1])
            idx += 1
        messages.extend(orchestrator.tick())
    return messages
