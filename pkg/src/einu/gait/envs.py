"""Training environments: the quadruped gait environment wrapping the
physics core, and a 1-D point-mass validation environment with an
analytically known optimal return."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import EinuConfig, PhysicsConfig
from ..sim.physics import (
    WorldState, check_fall, reset as sim_reset, step as sim_step, Pose,
    stance_angles, N_JOINTS,
)
from ..sim.terrain import Terrain
from .tasks import (
    TaskSpec, gait_targets, hybrid_action, ramp_gain, standup_targets,
    pose_targets,
)
from .rewards import reward as task_reward, forward_velocity

OBS_DIM = 21

# observation layout, recorded in checkpoints:
# [roll, pitch, yaw_rate, height_above_ground, forward_velocity,
#  joint_angles x8, joint_velocities x8]
OBS_LAYOUT = ("roll", "pitch", "yaw_rate", "height", "forward_velocity",
              *[f"q{i}" for i in range(N_JOINTS)],
              *[f"dq{i}" for i in range(N_JOINTS)])


def observe(world: WorldState) -> np.ndarray:
    r = world.robot
    ground = world.terrain.height_at(r.base_position[0], r.base_position[1])
    return np.concatenate([
        [r.base_rpy[0], r.base_rpy[1], r.base_angular_velocity[2],
         r.base_position[2] - ground, forward_velocity(r)],
        r.joint_angles,
        r.joint_velocities,
    ])


class QuadrupedGaitEnv:
    """One control step = one bounded feedback action applied to the
    open-loop generator, then `control_dt / dt` physics steps."""

    def __init__(self, spec: TaskSpec, terrain: Terrain,
                 config: EinuConfig | None = None, seed: int = 0):
        self.spec = spec
        self.terrain = terrain
        self.config = config or EinuConfig()
        self.seed = seed
        self.substeps = int(round(self.config.physics.control_dt
                                  / self.config.physics.dt))
        self.turn_bias = 0.0  # steering hook for the orchestrator
        self.world: WorldState | None = None
        self.reset()

    @property
    def obs_dim(self) -> int:
        return OBS_DIM

    @property
    def action_dim(self) -> int:
        return self.spec.action_dim

    def reset(self, pose: Pose | None = None) -> np.ndarray:
        phys = self.config.physics
        if pose is None and self.spec.task == "standup":
            g = self.spec.gait
            crouch = np.tile([g.crouch_hip, g.crouch_knee], 4)
            world = sim_reset(self.terrain, config=phys, seed=self.seed)
            world.robot.joint_angles = crouch
            self.world = world
        else:
            self.world = sim_reset(self.terrain, pose, config=phys, seed=self.seed)
        self.phase = 0.0
        self.t = 0.0
        self.step_count = 0
        return observe(self.world)

    def step(self, feedback: np.ndarray) -> tuple[np.ndarray, float, bool, dict]:
        phys = self.config.physics
        spec = self.spec
        prev = self.world.robot

        if spec.task in ("walk", "gallop"):
            base = np.array([spec.gait.stride_amplitude, spec.gait.frequency])
            applied = hybrid_action(base, feedback, spec.feedback_bounds)
            amp = max(0.0, applied[0]) * ramp_gain(self.t, spec.gait)
            freq = max(0.0, applied[1])
            for _ in range(self.substeps):
                targets = gait_targets(spec, self.phase, amp, phys, self.turn_bias)
                self.world = sim_step(self.world, targets, phys.dt, phys)
                self.phase += freq * phys.dt
                self.t += phys.dt
        else:
            applied = hybrid_action(np.zeros(1), feedback, spec.feedback_bounds)
            scale = 1.0 + applied[0]
            maker = standup_targets if spec.task == "standup" else pose_targets
            for _ in range(self.substeps):
                targets = maker(spec, self.t, phys, time_scale=scale)
                self.world = sim_step(self.world, targets, phys.dt, phys)
                self.t += phys.dt

        state = self.world.robot
        fell = check_fall(state, self.terrain, phys)
        ground = self.terrain.height_at(state.base_position[0], state.base_position[1])
        r = task_reward(spec.task, prev, state, feedback, phys.control_dt,
                        fell=fell, ground_height=ground, config=phys)
        self.step_count += 1
        done = fell or self.step_count >= spec.episode_length
        info = {"applied": applied, "fell": fell,
                "position": state.base_position.copy()}
        return observe(self.world), r, done, info


POINT_MASS_TARGET = 1.0
POINT_MASS_SPEED = 0.1
POINT_MASS_STEPS = 50


class PointMassEnv:
    """1-D reach-target validation environment.

    x' = x + 0.1 * clip(a, -1, 1); reward max(0, 1 - |x' - target|).
    The optimal policy saturates toward the target and then holds, so the
    optimal return is computable in closed form.
    """

    def __init__(self, seed: int = 0):
        self.obs_dim = 2
        self.action_dim = 1
        self.reset()

    def reset(self) -> np.ndarray:
        self.x = 0.0
        self.step_count = 0
        return self._obs()

    def _obs(self) -> np.ndarray:
        return np.array([self.x, POINT_MASS_TARGET - self.x])

    def step(self, action: np.ndarray) -> tuple[np.ndarray, float, bool, dict]:
        a = float(np.clip(action[0], -1.0, 1.0))
        self.x += POINT_MASS_SPEED * a
        r = max(0.0, 1.0 - abs(self.x - POINT_MASS_TARGET))
        self.step_count += 1
        done = self.step_count >= POINT_MASS_STEPS
        return self._obs(), r, done, {}

    @staticmethod
    def optimal_return() -> float:
        """Best achievable episode return: full-speed approach, then hold."""
        x, total = 0.0, 0.0
        for _ in range(POINT_MASS_STEPS):
            move = min(POINT_MASS_SPEED, abs(POINT_MASS_TARGET - x))
            x += math.copysign(move, POINT_MASS_TARGET - x)
            total += max(0.0, 1.0 - abs(x - POINT_MASS_TARGET))
        return total
