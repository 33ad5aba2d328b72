from .terrain import (Terrain, TERRAIN_KINDS, generate_terrain, maze_path,
                      maze_waypoints)
from .physics import (
    JointTargets,
    Pose,
    RobotState,
    WorldState,
    check_fall,
    foot_positions_world,
    joint_limits,
    mechanical_energy,
    nominal_height,
    reset,
    rotation_matrix,
    stance_angles,
    step,
    wrap_angle,
)

__all__ = [
    "Terrain",
    "TERRAIN_KINDS",
    "generate_terrain",
    "maze_path",
    "maze_waypoints",
    "JointTargets",
    "Pose",
    "RobotState",
    "WorldState",
    "check_fall",
    "foot_positions_world",
    "joint_limits",
    "mechanical_energy",
    "nominal_height",
    "reset",
    "rotation_matrix",
    "stance_angles",
    "step",
    "wrap_angle",
]
