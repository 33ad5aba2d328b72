"""Clipped-surrogate policy optimization with analytic gradients.

The loss per update is
    L = -E[min(r A, clip(r, 1-eps, 1+eps) A)] + c_v E[(V - R)^2] - c_e H
with r the Gaussian probability ratio; gradients flow through the actor
MLP, the per-dimension log-std, and the critic MLP in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import PpoConfig
from ..errors import NonFiniteGradient
from .policy import Mlp, PolicyParams, LOG_STD_MIN, LOG_STD_MAX


@dataclass
class RolloutBatch:
    """Column-aligned arrays of one on-policy training batch."""

    observations: np.ndarray
    actions: np.ndarray
    log_probs: np.ndarray
    rewards: np.ndarray
    values: np.ndarray
    dones: np.ndarray
    advantages: np.ndarray | None = None
    returns: np.ndarray | None = None
    consumed: bool = False

    def __post_init__(self):
        n = len(self.observations)
        for name in ("actions", "log_probs", "rewards", "values", "dones"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"misaligned column {name}")

    def __len__(self) -> int:
        return len(self.observations)

    def mark_consumed(self) -> None:
        if self.consumed:
            raise RuntimeError("on-policy batch already consumed")
        self.consumed = True


def ppo_loss_and_grads(params: PolicyParams, obs: np.ndarray, actions: np.ndarray,
                       old_log_probs: np.ndarray, advantages: np.ndarray,
                       returns: np.ndarray, clip_eps: float,
                       value_coef: float = 0.5, entropy_coef: float = 0.01,
                       ) -> tuple[float, dict[str, object]]:
    """Full PPO loss and its analytic gradients.

    Returns (loss, grads) with grads holding 'actor_w', 'actor_b',
    'critic_w', 'critic_b' (lists aligned with the MLP layers) and
    'log_std'.
    """
    n = len(obs)
    mean = params.actor.forward(obs)
    log_std = params.clamped_log_std()
    std = np.exp(log_std)
    z = (actions - mean) / std
    log_probs = (-0.5 * z ** 2 - log_std).sum(axis=1) - 0.5 * params.action_dim * np.log(2 * np.pi)

    ratio = np.exp(log_probs - old_log_probs)
    clipped = np.clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps)
    s1 = ratio * advantages
    s2 = clipped * advantages
    surrogate = np.minimum(s1, s2)
    policy_loss = -surrogate.mean()

    values = params.critic.forward(obs)[:, 0]
    value_err = values - returns
    value_loss = float((value_err ** 2).mean())

    entropy = params.entropy()
    loss = float(policy_loss + value_coef * value_loss - entropy_coef * entropy)

    # d loss / d log_prob: only where the unclipped branch is active
    use_s1 = s1 <= s2
    dlogp = np.where(use_s1, -ratio * advantages / n, 0.0)
    # inactive-clip branch still differentiates through ratio
    inactive_clip = (~use_s1) & (ratio > 1.0 - clip_eps) & (ratio < 1.0 + clip_eps)
    dlogp = np.where(inactive_clip, -ratio * advantages / n, dlogp)

    # Gaussian log-prob derivatives
    dmean = dlogp[:, None] * (z / std)
    dlogstd_per = dlogp[:, None] * (z ** 2 - 1.0)
    dlog_std = dlogstd_per.sum(axis=0)
    # entropy bonus: dH/dlog_std = 1 per dimension
    dlog_std = dlog_std - entropy_coef
    # clamped log_std passes no gradient outside the clamp
    at_clamp = (params.log_std <= LOG_STD_MIN) | (params.log_std >= LOG_STD_MAX)
    dlog_std[at_clamp] = 0.0

    actor_dw, actor_db = params.actor.backward(dmean)
    dvalue = (2.0 * value_coef / n) * value_err
    critic_dw, critic_db = params.critic.backward(dvalue[:, None])

    grads = {"actor_w": actor_dw, "actor_b": actor_db,
             "critic_w": critic_dw, "critic_b": critic_db,
             "log_std": dlog_std}
    return loss, grads


def _grad_arrays(grads: dict) -> list[np.ndarray]:
    out = []
    for i in range(len(grads["actor_w"])):
        out += [grads["actor_w"][i], grads["actor_b"][i]]
    for i in range(len(grads["critic_w"])):
        out += [grads["critic_w"][i], grads["critic_b"][i]]
    out.append(grads["log_std"])
    return out


class PpoAdam:
    """Adam over the trainable arrays of a PolicyParams instance."""

    def __init__(self, params: PolicyParams, lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self._targets = (params.actor.param_arrays()
                         + params.critic.param_arrays() + [params.log_std])
        self.m = [np.zeros_like(a) for a in self._targets]
        self.v = [np.zeros_like(a) for a in self._targets]

    def step(self, grads: dict) -> None:
        arrays = _grad_arrays(grads)
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for i, (p, g) in enumerate(zip(self._targets, arrays)):
            self.m[i] = b1 * self.m[i] + (1 - b1) * g
            self.v[i] = b2 * self.v[i] + (1 - b2) * g * g
            mhat = self.m[i] / (1 - b1 ** self.t)
            vhat = self.v[i] / (1 - b2 ** self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


def ppo_update(params: PolicyParams, batch: RolloutBatch, config: PpoConfig,
               optimizer: PpoAdam | None = None,
               rng: np.random.Generator | None = None) -> PolicyParams:
    """Run the clipped-surrogate update over one on-policy batch.

    Mutates and returns `params`; the batch is marked consumed afterward
    and may never feed a second update.  A non-finite gradient aborts the
    whole update, restoring the incoming parameters.
    """
    if batch.advantages is None or batch.returns is None:
        raise ValueError("batch advantages must be computed before the update")
    rng = rng or np.random.default_rng(0)
    optimizer = optimizer or PpoAdam(params, config.lr)
    backup = params.copy()
    n = len(batch)
    try:
        for _ in range(config.epochs):
            order = rng.permutation(n)
            for start in range(0, n, config.minibatch_size):
                idx = order[start:start + config.minibatch_size]
                _, grads = ppo_loss_and_grads(
                    params, batch.observations[idx], batch.actions[idx],
                    batch.log_probs[idx], batch.advantages[idx],
                    batch.returns[idx], config.clip_eps,
                    config.value_coef, config.entropy_coef)
                for g in _grad_arrays(grads):
                    if not np.all(np.isfinite(g)):
                        raise NonFiniteGradient("non-finite gradient in update")
                optimizer.step(grads)
    except NonFiniteGradient:
        _restore(params, backup)
        raise
    finally:
        batch.mark_consumed()
    params.log_std[...] = np.clip(params.log_std, LOG_STD_MIN, LOG_STD_MAX)
    return params


def _restore(params: PolicyParams, backup: PolicyParams) -> None:
    for (_, dst), (_, src) in zip(params.named_arrays(), backup.named_arrays()):
        dst[...] = src
