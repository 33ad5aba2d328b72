"""Per-step reward shaping for the four gait tasks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import PhysicsConfig
from ..sim.physics import RobotState, nominal_height


@dataclass(frozen=True)
class RewardWeights:
    forward: float = 1.0
    action_cost: float = 0.005
    tilt: float = 0.5
    alive: float = 0.05
    fall_penalty: float = 10.0


def forward_velocity(state: RobotState) -> float:
    """Velocity projected on the trunk heading."""
    yaw = state.base_rpy[2]
    vx, vy = state.base_linear_velocity[0], state.base_linear_velocity[1]
    return vx * math.cos(yaw) + vy * math.sin(yaw)


def reward(task: str, prev_state: RobotState, state: RobotState,
           action: np.ndarray, dt: float, fell: bool = False,
           ground_height: float = 0.0,
           config: PhysicsConfig | None = None,
           weights: RewardWeights = RewardWeights()) -> float:
    config = config or PhysicsConfig()
    roll, pitch = state.base_rpy[0], state.base_rpy[1]
    tilt = roll * roll + pitch * pitch
    if task in ("walk", "gallop"):
        r = (weights.forward * forward_velocity(state)
             - weights.action_cost * float(np.sum(np.square(action)))
             - weights.tilt * tilt
             + weights.alive)
    else:
        height = state.base_position[2] - ground_height
        r = -abs(height - nominal_height(config)) - 0.5 * tilt
    if fell:
        r -= weights.fall_penalty
    return float(r)
