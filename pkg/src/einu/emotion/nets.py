"""Emotion classifiers: the audio net (dense front end, two stacked
recurrent layers, dense head) and the video head over abstract feature
vectors.  Both end in a 7-way softmax."""

from __future__ import annotations

import numpy as np

from ..errors import BadFeatureDim, BadFrameDim
from .layers import Dense, Dropout, Lstm, Relu, softmax, cross_entropy, softmax_ce_backward

N_CLASSES = 7
MFCC_DIM = 40
DROPOUT_RATE = 0.2


class AudioEmotionNet:
    """40 -> 64 -> 128 dense front end, two stacked 128-unit recurrent
    layers, then a 128 -> 64 -> 7 head read from the final time step."""

    def __init__(self, rng: np.random.Generator | None = None,
                 hidden: int = 128, front: tuple[int, int] = (64, 128),
                 head: tuple[int, int] = (128, 64)):
        self.d1 = Dense(MFCC_DIM, front[0], rng)
        self.d2 = Dense(front[0], front[1], rng)
        self.lstm1 = Lstm(front[1], hidden, rng)
        self.lstm2 = Lstm(hidden, hidden, rng)
        self.d3 = Dense(hidden, head[0], rng)
        self.d4 = Dense(head[0], head[1], rng)
        self.out = Dense(head[1], N_CLASSES, rng)
        self.relus = [Relu() for _ in range(4)]
        self.drops = [Dropout(DROPOUT_RATE) for _ in range(4)]

    @property
    def layers(self):
        return [self.d1, self.d2, self.lstm1, self.lstm2, self.d3, self.d4, self.out]

    def named_params(self):
        names = ["d1", "d2", "lstm1", "lstm2", "d3", "d4", "out"]
        return [(f"{n}.{k}", layer.params[k], layer.grads[k])
                for n, layer in zip(names, self.layers)
                for k in sorted(layer.params)]

    def zero_grads(self):
        for layer in self.layers:
            for g in layer.grads.values():
                g[...] = 0.0

    def forward(self, x: np.ndarray, training: bool = False,
                rng: np.random.Generator | None = None) -> np.ndarray:
        """x: (B, T, 40) or (T, 40); returns class probabilities."""
        single = x.ndim == 2
        if single:
            x = x[None]
        if x.ndim != 3 or x.shape[1] < 1 or x.shape[2] != MFCC_DIM:
            raise BadFrameDim(f"expected (B, T, {MFCC_DIM}), got {x.shape}")
        h = self.drops[0].forward(self.relus[0].forward(self.d1.forward(x)), training, rng)
        h = self.drops[1].forward(self.relus[1].forward(self.d2.forward(h)), training, rng)
        h = self.lstm1.forward(h)
        h = self.lstm2.forward(h)
        last = h[:, -1]
        self._last_t = h.shape[1]
        k = self.drops[2].forward(self.relus[2].forward(self.d3.forward(last)), training, rng)
        k = self.drops[3].forward(self.relus[3].forward(self.d4.forward(k)), training, rng)
        probs = softmax(self.out.forward(k))
        return probs[0] if single else probs

    def loss_and_grads(self, x: np.ndarray, labels: np.ndarray,
                       training: bool = False,
                       rng: np.random.Generator | None = None) -> float:
        """Mean cross-entropy and accumulated parameter gradients."""
        self.zero_grads()
        probs = self.forward(x, training, rng)
        loss = cross_entropy(probs, labels)
        d = softmax_ce_backward(probs, labels)
        d = self.out.backward(d)
        d = self.relus[3].backward(self.drops[3].backward(d))
        d = self.d4.backward(d)
        d = self.relus[2].backward(self.drops[2].backward(d))
        d = self.d3.backward(d)
        dh = np.zeros((x.shape[0], self._last_t, self.lstm2.d_hidden))
        dh[:, -1] = d
        d = self.lstm2.backward(dh)
        d = self.lstm1.backward(d)
        d = self.relus[1].backward(self.drops[1].backward(d))
        d = self.d2.backward(d)
        d = self.relus[0].backward(self.drops[0].backward(d))
        self.d1.backward(d)
        return loss


class VideoEmotionNet:
    """F -> 512 -> 256 -> 7 dense head over abstract video feature vectors."""

    def __init__(self, feature_dim: int, rng: np.random.Generator | None = None,
                 hidden: tuple[int, int] = (512, 256)):
        self.feature_dim = feature_dim
        self.d1 = Dense(feature_dim, hidden[0], rng)
        self.d2 = Dense(hidden[0], hidden[1], rng)
        self.out = Dense(hidden[1], N_CLASSES, rng)
        self.relus = [Relu(), Relu()]
        self.drop = Dropout(DROPOUT_RATE)

    @property
    def layers(self):
        return [self.d1, self.d2, self.out]

    def named_params(self):
        names = ["d1", "d2", "out"]
        return [(f"{n}.{k}", layer.params[k], layer.grads[k])
                for n, layer in zip(names, self.layers)
                for k in sorted(layer.params)]

    def zero_grads(self):
        for layer in self.layers:
            for g in layer.grads.values():
                g[...] = 0.0

    def forward(self, x: np.ndarray, training: bool = False,
                rng: np.random.Generator | None = None) -> np.ndarray:
        single = x.ndim == 1
        if single:
            x = x[None]
        if x.shape[-1] != self.feature_dim:
            raise BadFeatureDim(f"expected feature dim {self.feature_dim}, got {x.shape[-1]}")
        h = self.drop.forward(self.relus[0].forward(self.d1.forward(x)), training, rng)
        h = self.relus[1].forward(self.d2.forward(h))
        probs = softmax(self.out.forward(h))
        return probs[0] if single else probs

    def loss_and_grads(self, x: np.ndarray, labels: np.ndarray,
                       training: bool = False,
                       rng: np.random.Generator | None = None) -> float:
        self.zero_grads()
        probs = self.forward(x, training, rng)
        loss = cross_entropy(probs, labels)
        d = softmax_ce_backward(probs, labels)
        d = self.out.backward(d)
        d = self.relus[1].backward(d)
        d = self.d2.backward(d)
        d = self.relus[0].backward(self.drop.backward(d))
        self.d1.backward(d)
        return loss
