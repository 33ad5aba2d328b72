from .tasks import (
    TASKS,
    TASK_BOUNDS,
    WALK_OFFSETS,
    GALLOP_OFFSETS,
    TaskSpec,
    make_task_spec,
    ramp_gain,
    gait_targets,
    standup_targets,
    pose_targets,
    open_loop_signal,
    hybrid_action,
)
from .policy import Mlp, ObsNormalizer, PolicyParams
from .gae import compute_gae
from .ppo import RolloutBatch, PpoAdam, ppo_loss_and_grads, ppo_update
from .rewards import RewardWeights, forward_velocity, reward
from .envs import OBS_DIM, OBS_LAYOUT, observe, QuadrupedGaitEnv, PointMassEnv
from .train import (IterationMetrics, TrainOutput, collect_rollout, train,
                    evaluate, train_gait_policy, gait_train_config,
                    evaluate_steered, GAIT_TRAIN_OVERRIDES, EVAL_TERRAINS)

__all__ = [
    "TASKS",
    "TASK_BOUNDS",
    "WALK_OFFSETS",
    "GALLOP_OFFSETS",
    "TaskSpec",
    "make_task_spec",
    "ramp_gain",
    "gait_targets",
    "standup_targets",
    "pose_targets",
    "open_loop_signal",
    "hybrid_action",
    "Mlp",
    "ObsNormalizer",
    "PolicyParams",
    "compute_gae",
    "RolloutBatch",
    "PpoAdam",
    "ppo_loss_and_grads",
    "ppo_update",
    "RewardWeights",
    "forward_velocity",
    "reward",
    "OBS_DIM",
    "OBS_LAYOUT",
    "observe",
    "QuadrupedGaitEnv",
    "PointMassEnv",
    "IterationMetrics",
    "TrainOutput",
    "collect_rollout",
    "train",
    "evaluate",
    "train_gait_policy",
    "gait_train_config",
    "evaluate_steered",
    "GAIT_TRAIN_OVERRIDES",
    "EVAL_TERRAINS",
]
