"""Toy-scale training of the emotion nets: Adam minibatch descent on
categorical cross-entropy, plus class-conditioned Gaussian synthetic data
so the nets are trainable without external corpora."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFiniteLoss
from .nets import N_CLASSES, MFCC_DIM


@dataclass
class TrainConfig:
    epochs: int = 200
    batch_size: int = 32
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    target_accuracy: float | None = None  # stop early once reached


@dataclass
class TrainResult:
    losses: list[float] = field(default_factory=list)
    accuracies: list[float] = field(default_factory=list)
    epochs_run: int = 0


class Adam:
    """Adam over a list of (name, param, grad) triples sharing storage."""

    def __init__(self, named_params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.named = named_params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {n: np.zeros_like(p) for n, p, _ in named_params}
        self.v = {n: np.zeros_like(p) for n, p, _ in named_params}
        self.t = 0

    def step(self):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for name, p, g in self.named:
            m = self.m[name] = b1 * self.m[name] + (1 - b1) * g
            v = self.v[name] = b2 * self.v[name] + (1 - b2) * g * g
            mhat = m / (1 - b1 ** self.t)
            vhat = v / (1 - b2 ** self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


def train_toy(net, x: np.ndarray, y: np.ndarray,
              config: TrainConfig = TrainConfig()) -> TrainResult:
    """Minibatch Adam training with dropout active; returns loss/accuracy
    per epoch.  Raises NonFiniteLoss with the epoch index on blow-up."""
    rng = np.random.default_rng(config.seed)
    opt = Adam(net.named_params(), config.lr, config.beta1, config.beta2, config.eps)
    n = len(x)
    result = TrainResult()
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        if config.lr != 0.0:
            for start in range(0, n, config.batch_size):
                idx = order[start:start + config.batch_size]
                loss = net.loss_and_grads(x[idx], y[idx], training=True, rng=rng)
                if not np.isfinite(loss):
                    raise NonFiniteLoss(f"non-finite loss at epoch {epoch}")
                epoch_loss += loss * len(idx)
                opt.step()
        probs = net.forward(x, training=False)
        acc = float((probs.argmax(axis=1) == y).mean())
        result.losses.append(epoch_loss / n)
        result.accuracies.append(acc)
        result.epochs_run = epoch + 1
        if config.target_accuracy is not None and acc >= config.target_accuracy:
            break
    return result


def make_audio_clusters(n_per_class: int = 20, seq_len: int = 10,
                        separation: float = 3.0, noise: float = 0.3,
                        seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Sequences of frames drawn around one well-separated Gaussian center
    per class in MFCC frame space."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, separation, (N_CLASSES, MFCC_DIM))
    xs, ys = [], []
    for c in range(N_CLASSES):
        base = np.tile(centers[c], (n_per_class, seq_len, 1))
        xs.append(base + rng.normal(0.0, noise, base.shape))
        ys.append(np.full(n_per_class, c, dtype=int))
    return np.concatenate(xs), np.concatenate(ys)


def make_video_clusters(feature_dim: int = 32, n_per_class: int = 20,
                        separation: float = 3.0, noise: float = 0.3,
                        seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Class-conditioned Gaussian feature vectors standing in for the
    out-of-scope pretrained video backbone."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, separation, (N_CLASSES, feature_dim))
    xs, ys = [], []
    for c in range(N_CLASSES):
        xs.append(centers[c] + rng.normal(0.0, noise, (n_per_class, feature_dim)))
        ys.append(np.full(n_per_class, c, dtype=int))
    return np.concatenate(xs), np.concatenate(ys)


def class_center_features(feature_dim: int = 32, separation: float = 3.0,
                          seed: int = 0) -> np.ndarray:
    """Cluster centers matching make_video_clusters, one row per class."""
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, separation, (N_CLASSES, feature_dim))
