"""Rigid-trunk quadruped dynamics: a single 6-DoF trunk, four massless
two-link legs with point feet, PD-servoed joints, and spring-damper ground
contact with Coulomb-capped tangential friction.

Integration is semi-implicit Euler for velocities with a midpoint position
update (exact for constant acceleration, which keeps free-fall trajectories
within closed-form tolerance at 1 ms steps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..config import PhysicsConfig
from ..errors import InvalidParams, NonFiniteState, PoseUnderTerrain
from .terrain import Terrain

N_LEGS = 4
N_JOINTS = 8  # hip + knee per leg, order [FL, FR, HL, HR]


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def rotation_matrix(rpy: np.ndarray) -> np.ndarray:
    """World-from-body rotation, R = Rz(yaw) Ry(pitch) Rx(roll)."""
    r, p, y = rpy
    cr, sr = math.cos(r), math.sin(r)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])


def _euler_rate_matrix(rpy: np.ndarray) -> np.ndarray:
    """Maps body angular velocity to roll/pitch/yaw rates."""
    r, p, _ = rpy
    cr, sr = math.cos(r), math.sin(r)
    cp = math.cos(p)
    tp = math.tan(p)
    if abs(cp) < 1e-6:
        raise NonFiniteState("orientation singular (pitch at +/- pi/2)")
    return np.array([
        [1.0, sr * tp, cr * tp],
        [0.0, cr, -sr],
        [0.0, sr / cp, cr / cp],
    ])


class JointTargets:
    """Eight joint target angles, clamped to mechanical limits on
    construction."""

    __slots__ = ("angles",)

    def __init__(self, angles, config: PhysicsConfig | None = None):
        config = config or PhysicsConfig()
        a = np.asarray(angles, dtype=float)
        if a.shape != (N_JOINTS,):
            raise InvalidParams(f"expected {N_JOINTS} target angles, got {a.shape}")
        lo, hi = joint_limits(config)
        self.angles = np.clip(a, lo, hi)


def joint_limits(config: PhysicsConfig) -> tuple[np.ndarray, np.ndarray]:
    hip_lo = config.stance_hip - config.joint_limit_hip
    hip_hi = config.stance_hip + config.joint_limit_hip
    knee_lo = config.stance_knee - config.joint_limit_knee
    knee_hi = 0.0
    lo = np.tile([hip_lo, knee_lo], N_LEGS)
    hi = np.tile([hip_hi, knee_hi], N_LEGS)
    return lo, hi


@dataclass
class RobotState:
    base_position: np.ndarray          # world, m
    base_rpy: np.ndarray               # rad, each wrapped to (-pi, pi]
    base_linear_velocity: np.ndarray   # world, m/s
    base_angular_velocity: np.ndarray  # body frame, rad/s
    joint_angles: np.ndarray           # 8, rad
    joint_velocities: np.ndarray       # 8, rad/s
    foot_contact: np.ndarray           # 4 bools

    def copy(self) -> "RobotState":
        return RobotState(*(v.copy() for v in (
            self.base_position, self.base_rpy, self.base_linear_velocity,
            self.base_angular_velocity, self.joint_angles,
            self.joint_velocities, self.foot_contact)))


@dataclass
class WorldState:
    robot: RobotState
    terrain: Terrain
    time: float = 0.0
    tick: int = 0
    seed: int = 0

    def copy(self) -> "WorldState":
        return WorldState(robot=self.robot.copy(), terrain=self.terrain,
                          time=self.time, tick=self.tick, seed=self.seed)


def hip_offsets(config: PhysicsConfig) -> np.ndarray:
    hx, hy = config.body_length / 2.0, config.body_width / 2.0
    return np.array([[hx, hy, 0.0], [hx, -hy, 0.0], [-hx, hy, 0.0], [-hx, -hy, 0.0]])


def leg_foot_offset(hip: float, knee: float, config: PhysicsConfig) -> np.ndarray:
    """Foot position relative to the hip, body frame (sagittal x-z plane)."""
    l1 = l2 = config.link_length
    fx = l1 * math.sin(hip) + l2 * math.sin(hip + knee)
    fz = -(l1 * math.cos(hip) + l2 * math.cos(hip + knee))
    return np.array([fx, 0.0, fz])


def leg_jacobian(hip: float, knee: float, config: PhysicsConfig) -> np.ndarray:
    """3x2 Jacobian of the foot offset w.r.t. (hip, knee), body frame."""
    l1 = l2 = config.link_length
    s1, c1 = math.sin(hip), math.cos(hip)
    s12, c12 = math.sin(hip + knee), math.cos(hip + knee)
    return np.array([
        [l1 * c1 + l2 * c12, l2 * c12],
        [0.0, 0.0],
        [l1 * s1 + l2 * s12, l2 * s12],
    ])


def nominal_height(config: PhysicsConfig) -> float:
    off = leg_foot_offset(config.stance_hip, config.stance_knee, config)
    return -off[2]


def stance_angles(config: PhysicsConfig) -> np.ndarray:
    return np.tile([config.stance_hip, config.stance_knee], N_LEGS)


def foot_positions_world(robot: RobotState, config: PhysicsConfig) -> np.ndarray:
    rot = rotation_matrix(robot.base_rpy)
    hips = hip_offsets(config)
    feet = np.empty((N_LEGS, 3))
    for leg in range(N_LEGS):
        hip, knee = robot.joint_angles[2 * leg], robot.joint_angles[2 * leg + 1]
        body = hips[leg] + leg_foot_offset(hip, knee, config)
        feet[leg] = robot.base_position + rot @ body
    return feet


def trunk_inertia(config: PhysicsConfig) -> np.ndarray:
    # rectangular box 2*hx x 2*hy x 0.1 m
    lx, ly, lz = config.body_length, config.body_width, 0.1
    m = config.trunk_mass
    return np.array([
        m * (ly ** 2 + lz ** 2) / 12.0,
        m * (lx ** 2 + lz ** 2) / 12.0,
        m * (lx ** 2 + ly ** 2) / 12.0,
    ])


def _contact_forces(robot: RobotState, terrain: Terrain,
                    config: PhysicsConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-foot world contact force, plus force/torque totals on the trunk
    and the contact flags."""
    rot = rotation_matrix(robot.base_rpy)
    hips = hip_offsets(config)
    total_f = np.zeros(3)
    total_tau = np.zeros(3)
    contacts = np.zeros(N_LEGS, dtype=bool)
    penetrations = np.zeros(N_LEGS)
    omega_w = rot @ robot.base_angular_velocity
    for leg in range(N_LEGS):
        hip, knee = robot.joint_angles[2 * leg], robot.joint_angles[2 * leg + 1]
        body = hips[leg] + leg_foot_offset(hip, knee, config)
        r_w = rot @ body
        foot = robot.base_position + r_w
        ground = terrain.height_at(foot[0], foot[1])
        pen = ground - foot[2]
        if pen < -config.penetration_tolerance:
            continue
        contacts[leg] = True
        penetrations[leg] = max(pen, 0.0)
        if pen <= 0.0:
            continue
        jac = leg_jacobian(hip, knee, config)
        v_joint = rot @ (jac @ robot.joint_velocities[2 * leg: 2 * leg + 2])
        v_foot = robot.base_linear_velocity + np.cross(omega_w, r_w) + v_joint
        fn = config.contact_stiffness * pen - config.contact_damping * v_foot[2]
        fn = max(fn, 0.0)
        vt = v_foot[:2]
        speed = float(np.hypot(vt[0], vt[1]))
        if speed > 1e-9 and config.friction > 0.0:
            ft_mag = min(config.friction * fn, config.contact_damping * speed)
            ft = -ft_mag * vt / speed
        else:
            ft = np.zeros(2)
        force = np.array([ft[0], ft[1], fn])
        total_f += force
        total_tau += np.cross(r_w, force)
    return penetrations, total_f, total_tau, contacts


def step(world: WorldState, targets: JointTargets, dt: float,
         config: PhysicsConfig | None = None) -> WorldState:
    """Advance the world by one physics step.

    PD servo torques drive the joints; contact and gravity drive the trunk.
    Raises NonFiniteState if the update blows up.
    """
    config = config or PhysicsConfig()
    if not (0.0 < dt <= 0.005):
        raise InvalidParams(f"dt must be in (0, 5 ms], got {dt}")
    r = world.robot.copy()

    # joints: servo dynamics with effective inertia, torque-clamped
    tau = config.kp * (targets.angles - r.joint_angles) - config.kd * r.joint_velocities
    tau = np.clip(tau, -config.torque_limit, config.torque_limit)
    r.joint_velocities = r.joint_velocities + (tau / config.joint_inertia) * dt
    r.joint_angles = r.joint_angles + r.joint_velocities * dt
    lo, hi = joint_limits(config)
    below, above = r.joint_angles < lo, r.joint_angles > hi
    r.joint_angles = np.clip(r.joint_angles, lo, hi)
    r.joint_velocities[below] = np.maximum(r.joint_velocities[below], 0.0)
    r.joint_velocities[above] = np.minimum(r.joint_velocities[above], 0.0)

    # trunk forces
    _, f_contact, tau_contact, contacts = _contact_forces(r, world.terrain, config)
    force = f_contact + np.array([0.0, 0.0, -config.trunk_mass * config.gravity])
    accel = force / config.trunk_mass

    v_old = r.base_linear_velocity
    v_new = v_old + accel * dt
    if np.any(contacts):
        # semi-implicit update: stable against the stiff contact springs
        r.base_position = r.base_position + v_new * dt
    else:
        # ballistic flight: midpoint is exact for constant acceleration
        r.base_position = r.base_position + 0.5 * (v_old + v_new) * dt
    r.base_linear_velocity = v_new

    rot = rotation_matrix(r.base_rpy)
    tau_body = rot.T @ tau_contact
    inertia = trunk_inertia(config)
    omega = r.base_angular_velocity + (tau_body / inertia) * dt
    rpy_rates = _euler_rate_matrix(r.base_rpy) @ omega
    rpy = r.base_rpy + rpy_rates * dt
    r.base_rpy = np.array([wrap_angle(a) for a in rpy])
    r.base_angular_velocity = omega
    r.foot_contact = contacts

    for arr in (r.base_position, r.base_rpy, r.base_linear_velocity,
                r.base_angular_velocity, r.joint_angles, r.joint_velocities):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteState("integration produced NaN/Inf; reset required")

    return WorldState(robot=r, terrain=world.terrain,
                      time=world.time + dt, tick=world.tick + 1,
                      seed=world.seed)


def check_fall(state: RobotState, terrain: Terrain,
               config: PhysicsConfig | None = None) -> bool:
    """True when the trunk has dropped or tipped past the limits."""
    config = config or PhysicsConfig()
    ground = terrain.height_at(state.base_position[0], state.base_position[1])
    height = state.base_position[2] - ground
    if height < config.fall_height_fraction * nominal_height(config):
        return True
    return (abs(state.base_rpy[0]) > config.roll_limit
            or abs(state.base_rpy[1]) > config.pitch_limit)


@dataclass
class Pose:
    position: np.ndarray
    rpy: np.ndarray
    joint_angles: np.ndarray | None = None


def reset(terrain: Terrain, pose: Pose | None = None,
          config: PhysicsConfig | None = None, seed: int = 0) -> WorldState:
    """World at tick 0; default pose is nominal stance over the terrain
    origin.  Raises PoseUnderTerrain when any body point starts below the
    heightfield."""
    config = config or PhysicsConfig()
    if pose is None:
        # clear the tallest ground point under the footprint
        footprint = np.vstack([hip_offsets(config)[:, :2],
                               hip_offsets(config)[:, :2]
                               + np.array([leg_foot_offset(config.stance_hip,
                                                           config.stance_knee,
                                                           config)[:2]])])
        ground = max(terrain.height_at(0.0, 0.0),
                     max(terrain.height_at(px, py) for px, py in footprint))
        position = np.array([0.0, 0.0, ground + nominal_height(config)])
        rpy = np.zeros(3)
        joints = stance_angles(config)
    else:
        position = np.asarray(pose.position, dtype=float).copy()
        rpy = np.array([wrap_angle(a) for a in np.asarray(pose.rpy, dtype=float)])
        joints = (stance_angles(config) if pose.joint_angles is None
                  else np.asarray(pose.joint_angles, dtype=float).copy())

    robot = RobotState(
        base_position=position,
        base_rpy=rpy,
        base_linear_velocity=np.zeros(3),
        base_angular_velocity=np.zeros(3),
        joint_angles=joints,
        joint_velocities=np.zeros(8),
        foot_contact=np.zeros(4, dtype=bool),
    )

    # body points: four feet plus the trunk corners
    rot = rotation_matrix(rpy)
    points = list(foot_positions_world(robot, config))
    for corner in hip_offsets(config):
        points.append(position + rot @ corner)
    for p in points:
        if p[2] < terrain.height_at(p[0], p[1]) - config.penetration_tolerance:
            raise PoseUnderTerrain(
                f"body point at {p.tolist()} is below the terrain")

    world = WorldState(robot=robot, terrain=terrain, time=0.0, tick=0, seed=seed)
    _, _, _, contacts = _contact_forces(robot, terrain, config)
    robot.foot_contact = contacts
    return world


def mechanical_energy(world: WorldState, config: PhysicsConfig | None = None) -> float:
    """Kinetic + gravitational + contact-spring energy (testing aid)."""
    config = config or PhysicsConfig()
    r = world.robot
    ke = 0.5 * config.trunk_mass * float(r.base_linear_velocity @ r.base_linear_velocity)
    ke += 0.5 * float(r.base_angular_velocity @ (trunk_inertia(config) * r.base_angular_velocity))
    pe = config.trunk_mass * config.gravity * float(r.base_position[2])
    pen, _, _, _ = _contact_forces(r, world.terrain, config)
    spring = 0.5 * config.contact_stiffness * float(np.sum(pen ** 2))
    return ke + pe + spring
