"""The PPO training loop: rollout collection (optionally over several
deterministically seeded environments), advantage estimation, and the
clipped-surrogate update.  Emits one metrics record per iteration."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..config import GaitConfig, PpoConfig
from ..errors import NonFiniteGradient, NonFiniteState
from .gae import compute_gae
from .policy import PolicyParams
from .ppo import PpoAdam, RolloutBatch, ppo_update


@dataclass
class IterationMetrics:
    iteration: int
    mean_return: float
    mean_episode_len: float
    entropy: float

    def to_json_dict(self) -> dict:
        return {"iteration": self.iteration, "mean_return": self.mean_return,
                "mean_episode_len": self.mean_episode_len, "entropy": self.entropy}


@dataclass
class TrainOutput:
    """`params` is the best iterate by mean rollout return; `final_params`
    is the state after the last update."""

    params: PolicyParams
    final_params: PolicyParams | None = None
    metrics: list[IterationMetrics] = field(default_factory=list)


def collect_rollout(env, params: PolicyParams, horizon: int,
                    rng: np.random.Generator,
                    obs: np.ndarray) -> tuple[RolloutBatch, np.ndarray, float,
                                              np.ndarray, list[float], list[int]]:
    """Gather `horizon` on-policy steps, resetting on episode end."""
    raw_buf = np.empty((horizon, params.obs_dim))
    obs_buf = np.empty((horizon, params.obs_dim))
    act_buf = np.empty((horizon, params.action_dim))
    logp_buf = np.empty(horizon)
    rew_buf = np.empty(horizon)
    val_buf = np.empty(horizon)
    done_buf = np.zeros(horizon, dtype=bool)
    ep_returns: list[float] = []
    ep_lengths: list[int] = []
    ep_ret, ep_len = 0.0, 0

    for t in range(horizon):
        nobs = params.normalizer.normalize(obs)
        action, logp = params.sample(nobs, rng)
        value = float(params.value(nobs[None])[0])
        nxt, r, done, _ = env.step(action)
        raw_buf[t] = obs
        obs_buf[t] = nobs
        act_buf[t] = action
        logp_buf[t] = logp
        rew_buf[t] = r
        val_buf[t] = value
        done_buf[t] = done
        ep_ret += r
        ep_len += 1
        if done:
            ep_returns.append(ep_ret)
            ep_lengths.append(ep_len)
            ep_ret, ep_len = 0.0, 0
            obs = env.reset()
        else:
            obs = nxt

    bootstrap = float(params.value(params.normalizer.normalize(obs)[None])[0])
    batch = RolloutBatch(observations=obs_buf, actions=act_buf,
                         log_probs=logp_buf, rewards=rew_buf,
                         values=val_buf, dones=done_buf)
    return batch, raw_buf, bootstrap, obs, ep_returns, ep_lengths


def train(env_factory, config: PpoConfig, seed: int = 0, iterations: int = 100,
          params: PolicyParams | None = None,
          on_iteration=None, eval_envs: list | None = None) -> TrainOutput:
    """Full PPO training.

    `env_factory(worker_seed)` builds one environment; with n_envs > 1
    rollouts are merged in fixed worker order so the batch is reproducible.
    `on_iteration(metrics)` is called once per iteration when given.
    `eval_envs` is the validation set for checkpoint selection: each iterate
    is scored by its mean deterministic return over these environments and
    the best one is returned (default: one environment from the factory).
    """
    rng = np.random.default_rng(seed)
    envs = [env_factory(seed + 1000 * i) for i in range(config.n_envs)]
    if params is None:
        params = PolicyParams.create(envs[0].obs_dim, envs[0].action_dim,
                                     hidden=config.hidden,
                                     init_log_std=config.init_log_std, seed=seed)
    optimizer = PpoAdam(params, config.lr)
    out = TrainOutput(params=params)
    cur_obs = [env.reset() for env in envs]
    per_env = max(1, config.horizon // config.n_envs)
    best_return, best_params = -np.inf, params
    if eval_envs is None:
        eval_envs = [env_factory(seed + 10 ** 6)]

    def eval_score() -> float:
        return float(np.mean([
            evaluate(env, params.copy(), config.episode_length)["return"]
            for env in eval_envs]))

    for it in range(iterations):
        batches, raws, boots, returns, lengths = [], [], [], [], []
        for i, env in enumerate(envs):
            try:
                batch, raw, bootstrap, cur_obs[i], rets, lens = collect_rollout(
                    env, params, per_env, rng, cur_obs[i])
            except NonFiniteState as exc:
                raise NonFiniteState(f"iteration {it}: {exc}") from exc
            batches.append(batch)
            raws.append(raw)
            boots.append(bootstrap)
            returns += rets
            lengths += lens
        # merged in fixed environment order for reproducibility
        adv_all, ret_all = [], []
        for batch, bootstrap in zip(batches, boots):
            adv, ret = compute_gae(batch.rewards, batch.values, bootstrap,
                                   config.gamma, config.lam, batch.dones)
            adv_all.append(adv)
            ret_all.append(ret)
        merged = RolloutBatch(
            observations=np.concatenate([b.observations for b in batches]),
            actions=np.concatenate([b.actions for b in batches]),
            log_probs=np.concatenate([b.log_probs for b in batches]),
            rewards=np.concatenate([b.rewards for b in batches]),
            values=np.concatenate([b.values for b in batches]),
            dones=np.concatenate([b.dones for b in batches]),
        )
        adv = np.concatenate(adv_all)
        merged.returns = np.concatenate(ret_all)
        merged.advantages = (adv - adv.mean()) / (adv.std() + 1e-8)
        mean_return = float(np.mean(returns)) if returns else float(np.sum(merged.rewards))
        # checkpoint selection: deterministic evaluation of the pre-update
        # policy (the sampled rollout return is too noisy to select on)
        score = eval_score()
        if score >= best_return:
            best_return = score
            best_params = params.copy()
        params.normalizer.update(np.concatenate(raws))

        try:
            ppo_update(params, merged, config, optimizer, rng)
        except NonFiniteGradient as exc:
            raise NonFiniteGradient(f"iteration {it}: {exc}") from exc

        metrics = IterationMetrics(
            iteration=it,
            mean_return=mean_return,
            mean_episode_len=float(np.mean(lengths)) if lengths else float(len(merged)),
            entropy=params.entropy(),
        )
        out.metrics.append(metrics)
        if on_iteration is not None:
            on_iteration(metrics)
    if iterations > 0:
        # the last update produced params that were never scored
        if eval_score() >= best_return:
            best_params = params
    out.params = best_params
    out.final_params = params
    return out


def evaluate(env, params: PolicyParams, n_steps: int,
             deterministic: bool = True,
             rng: np.random.Generator | None = None) -> dict:
    """Roll the policy with frozen normalizer statistics; returns summary
    info including the trajectory of base positions when available."""
    params.normalizer.frozen = True
    rng = rng or np.random.default_rng(0)
    obs = env.reset()
    total, positions, applied = 0.0, [], []
    fell = False
    for _ in range(n_steps):
        nobs = params.normalizer.normalize(obs)
        if deterministic:
            action = params.action_mean(nobs)[0]
        else:
            action, _ = params.sample(nobs, rng)
        obs, r, done, info = env.step(action)
        total += r
        if "position" in info:
            positions.append(info["position"])
        if "applied" in info:
            applied.append(info["applied"])
        fell = fell or info.get("fell", False)
        if done:
            break
    return {"return": total, "positions": positions, "applied": applied,
            "fell": fell, "steps": len(positions) or n_steps}


def evaluate_steered(env, params: PolicyParams, waypoints: list,
                     n_steps: int, steering_gain: float = 2.0,
                     max_turn_bias: float = 0.3,
                     waypoint_radius: float = 0.4, pose=None) -> dict:
    """Deterministic rollout with proportional waypoint steering layered on
    the open-loop gait through the environment's turn bias.

    `waypoints` are (x, y) targets visited in order; steering aims at the
    first one farther than `waypoint_radius`.  Returns the summary of
    `evaluate` plus the index of the last waypoint reached."""
    import math

    params = params.copy()
    params.normalizer.frozen = True
    obs = env.reset(pose=pose)
    positions, reached, fell = [], 0, False
    for _ in range(n_steps):
        r = env.world.robot
        x, y = r.base_position[0], r.base_position[1]
        while (reached < len(waypoints)
               and math.hypot(waypoints[reached][0] - x,
                              waypoints[reached][1] - y) < waypoint_radius):
            reached += 1
        if reached < len(waypoints):
            wx, wy = waypoints[reached]
            bearing = math.atan2(wy - y, wx - x)
            err = (bearing - r.base_rpy[2] + math.pi) % (2 * math.pi) - math.pi
            env.turn_bias = float(np.clip(steering_gain * err,
                                          -max_turn_bias, max_turn_bias))
        else:
            env.turn_bias = 0.0
        nobs = params.normalizer.normalize(obs)
        action = params.action_mean(nobs)[0]
        obs, _, done, info = env.step(action)
        positions.append(info["position"])
        fell = fell or info.get("fell", False)
        if done:
            break
    env.turn_bias = 0.0
    return {"positions": positions, "fell": fell, "reached": reached,
            "steps": len(positions)}


# Shipped per-task training recipes.  Learned feedback rides on a working
# open-loop gait, so updates are kept gentle: small exploration noise (the
# gait does not survive large joint-target perturbations), a low learning
# rate, and few passes per batch.
GAIT_TRAIN_OVERRIDES: dict[str, dict] = {
    "walk": {"lr": 1e-4, "epochs": 4, "init_log_std": -3.5},
    "gallop": {"lr": 1e-4, "epochs": 4, "init_log_std": -3.5},
    "standup": {"lr": 1e-4, "epochs": 4, "init_log_std": -3.0},
    "pose": {"lr": 1e-4, "epochs": 4, "init_log_std": -3.0},
}

# Validation terrains for checkpoint selection of locomotion tasks.
EVAL_TERRAINS: tuple[tuple[str, int], ...] = (
    ("flat", 0), ("uneven", 1), ("hilly", 3))


def gait_train_config(task: str, base: PpoConfig | None = None) -> PpoConfig:
    """The shipped training configuration for a gait task."""
    return replace(base or PpoConfig(), **GAIT_TRAIN_OVERRIDES[task])


def train_gait_policy(task: str, config: PpoConfig | None = None,
                      seed: int = 0, iterations: int = 10,
                      gait: GaitConfig | None = None,
                      on_iteration=None) -> TrainOutput:
    """Train one gait task with the shipped recipe: rollouts on flat ground,
    checkpoint selection across flat, uneven, and hilly validation terrains
    (flat only for the stationary tasks)."""
    from ..sim.terrain import generate_terrain
    from .envs import QuadrupedGaitEnv

    from .tasks import make_task_spec

    config = config or gait_train_config(task)
    spec = make_task_spec(task, gait=gait,
                          episode_length=config.episode_length)
    flat = generate_terrain("flat", seed=0)

    def factory(worker_seed: int):
        return QuadrupedGaitEnv(spec, flat, seed=worker_seed)

    kinds = EVAL_TERRAINS if task in ("walk", "gallop") else (("flat", 0),)
    eval_envs = [QuadrupedGaitEnv(spec, generate_terrain(k, seed=s), seed=0)
                 for k, s in kinds]
    return train(factory, config, seed=seed, iterations=iterations,
                 on_iteration=on_iteration, eval_envs=eval_envs)
