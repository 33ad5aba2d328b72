"""Diagonal-Gaussian actor-critic with hand-written backpropagation.

Actor and critic are two-hidden-layer tanh MLPs; the action log-std is a
free per-dimension parameter clamped to [-5, 2].  Observations are
whitened by running statistics carried with the policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LOG_STD_MIN, LOG_STD_MAX = -5.0, 2.0
LOG_2PI = math.log(2.0 * math.pi)


class Mlp:
    """Tanh MLP; forward caches activations for the manual backward pass."""

    def __init__(self, sizes: list[int], rng: np.random.Generator | None = None):
        self.sizes = list(sizes)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for d_in, d_out in zip(sizes[:-1], sizes[1:]):
            if rng is None:
                w = np.zeros((d_in, d_out))
            else:
                w = rng.normal(0.0, math.sqrt(1.0 / d_in), (d_in, d_out))
            self.weights.append(w)
            self.biases.append(np.zeros(d_out))
        self._acts: list[np.ndarray] = []

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._acts = [x]
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = np.tanh(h)
            self._acts.append(h)
        return h

    def backward(self, dout: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Gradients w.r.t. weights/biases for the cached forward pass."""
        dws = [np.zeros_like(w) for w in self.weights]
        dbs = [np.zeros_like(b) for b in self.biases]
        d = dout
        for i in reversed(range(len(self.weights))):
            a_in = self._acts[i]
            dws[i] = a_in.T @ d
            dbs[i] = d.sum(axis=0)
            if i > 0:
                d = d @ self.weights[i].T
                d = d * (1.0 - self._acts[i] ** 2)  # tanh' on the cached act
        return dws, dbs

    def param_arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out


@dataclass
class ObsNormalizer:
    """Running mean/variance whitening; freeze for evaluation."""

    mean: np.ndarray
    var: np.ndarray
    count: float = 1e-4
    frozen: bool = False

    @classmethod
    def for_dim(cls, dim: int) -> "ObsNormalizer":
        return cls(mean=np.zeros(dim), var=np.ones(dim))

    def update(self, batch: np.ndarray) -> None:
        if self.frozen:
            return
        bmean = batch.mean(axis=0)
        bvar = batch.var(axis=0)
        bcount = batch.shape[0]
        delta = bmean - self.mean
        tot = self.count + bcount
        self.mean = self.mean + delta * bcount / tot
        m_a = self.var * self.count
        m_b = bvar * bcount
        self.var = (m_a + m_b + delta ** 2 * self.count * bcount / tot) / tot
        self.count = tot

    def normalize(self, obs: np.ndarray) -> np.ndarray:
        return (obs - self.mean) / np.sqrt(self.var + 1e-8)


@dataclass
class PolicyParams:
    """Actor/critic weights plus normalizer statistics; the unit persisted
    in checkpoints."""

    actor: Mlp
    critic: Mlp
    log_std: np.ndarray
    normalizer: ObsNormalizer
    obs_dim: int
    action_dim: int
    meta: dict = field(default_factory=dict)

    @classmethod
    def create(cls, obs_dim: int, action_dim: int, hidden: int = 64,
               init_log_std: float = -0.7, seed: int = 0) -> "PolicyParams":
        rng = np.random.default_rng(seed)
        actor = Mlp([obs_dim, hidden, hidden, action_dim], rng)
        # zero final layer: the initial policy mean is exactly the open-loop
        # signal, and training only adds feedback it can justify
        actor.weights[-1] *= 0.0
        critic = Mlp([obs_dim, hidden, hidden, 1], rng)
        return cls(actor=actor, critic=critic,
                   log_std=np.full(action_dim, init_log_std),
                   normalizer=ObsNormalizer.for_dim(obs_dim),
                   obs_dim=obs_dim, action_dim=action_dim)

    def clamped_log_std(self) -> np.ndarray:
        return np.clip(self.log_std, LOG_STD_MIN, LOG_STD_MAX)

    def named_arrays(self) -> list[tuple[str, np.ndarray]]:
        out = []
        for i, (w, b) in enumerate(zip(self.actor.weights, self.actor.biases)):
            out += [(f"actor.w{i}", w), (f"actor.b{i}", b)]
        for i, (w, b) in enumerate(zip(self.critic.weights, self.critic.biases)):
            out += [(f"critic.w{i}", w), (f"critic.b{i}", b)]
        out.append(("log_std", self.log_std))
        out += [("norm.mean", self.normalizer.mean), ("norm.var", self.normalizer.var)]
        return out

    def copy(self) -> "PolicyParams":
        import copy
        return copy.deepcopy(self)

    # --- distribution ---

    def action_mean(self, obs: np.ndarray) -> np.ndarray:
        return self.actor.forward(np.atleast_2d(obs))

    def value(self, obs: np.ndarray) -> np.ndarray:
        return self.critic.forward(np.atleast_2d(obs))[:, 0]

    def sample(self, obs: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, float]:
        """Sample an action and its log-prob for a single observation."""
        mean = self.action_mean(obs)[0]
        std = np.exp(self.clamped_log_std())
        action = mean + std * rng.standard_normal(self.action_dim)
        return action, float(self.log_prob(mean[None], action[None])[0])

    def log_prob(self, mean: np.ndarray, actions: np.ndarray) -> np.ndarray:
        log_std = self.clamped_log_std()
        std = np.exp(log_std)
        z = (actions - mean) / std
        return (-0.5 * (z ** 2) - log_std).sum(axis=1) - 0.5 * self.action_dim * LOG_2PI

    def entropy(self) -> float:
        return float(np.sum(self.clamped_log_std() + 0.5 * (LOG_2PI + 1.0)))
