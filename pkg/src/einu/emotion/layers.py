"""Neural network layers with hand-written forward and backward passes.

Everything here is plain numpy; gradients are exact analytic expressions
checked against finite differences in the test suite.  Parameters live in
per-layer dicts so optimizers and checkpoints can treat them uniformly.
"""

from __future__ import annotations

import numpy as np


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class Dense:
    """Affine layer y = x W + b over the last axis."""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator | None = None):
        self.d_in, self.d_out = d_in, d_out
        if rng is None:
            self.params = {"W": np.zeros((d_in, d_out)), "b": np.zeros(d_out)}
        else:
            scale = np.sqrt(2.0 / d_in)
            self.params = {"W": rng.normal(0.0, scale, (d_in, d_out)),
                           "b": np.zeros(d_out)}
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._x = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, dout: np.ndarray) -> np.ndarray:
        x = self._x
        x2 = x.reshape(-1, self.d_in)
        d2 = dout.reshape(-1, self.d_out)
        self.grads["W"] += x2.T @ d2
        self.grads["b"] += d2.sum(axis=0)
        return dout @ self.params["W"].T


class Relu:
    def __init__(self):
        self._mask = None

    def forward(self, x):
        self._mask = x > 0
        return x * self._mask

    def backward(self, dout):
        return dout * self._mask


class Dropout:
    """Inverted dropout; identity when not training."""

    def __init__(self, rate: float):
        self.rate = rate
        self._mask = None

    def forward(self, x, training: bool, rng: np.random.Generator | None = None):
        if not training or self.rate == 0.0:
            self._mask = None
            return x
        if rng is None:
            raise ValueError("training-mode dropout needs an rng")
        self._mask = (rng.random(x.shape) >= self.rate) / (1.0 - self.rate)
        return x * self._mask

    def backward(self, dout):
        return dout if self._mask is None else dout * self._mask


class Lstm:
    """Single recurrent layer over (B, T, D) inputs, returning (B, T, H).

    Gate layout in the fused weight matrices is [input, forget, cell, output].
    Forget-gate bias initialized to 1 to ease early training.
    """

    def __init__(self, d_in: int, d_hidden: int, rng: np.random.Generator | None = None):
        self.d_in, self.d_hidden = d_in, d_hidden
        h = d_hidden
        if rng is None:
            wx = np.zeros((d_in, 4 * h))
            wh = np.zeros((h, 4 * h))
        else:
            wx = rng.normal(0.0, 1.0 / np.sqrt(d_in), (d_in, 4 * h))
            wh = rng.normal(0.0, 1.0 / np.sqrt(h), (h, 4 * h))
        b = np.zeros(4 * h)
        if rng is not None:
            b[h:2 * h] = 1.0
        self.params = {"Wx": wx, "Wh": wh, "b": b}
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        bsz, tlen, _ = x.shape
        h = self.d_hidden
        hs = np.zeros((bsz, tlen, h))
        caches = []
        h_prev = np.zeros((bsz, h))
        c_prev = np.zeros((bsz, h))
        wx, wh, b = self.params["Wx"], self.params["Wh"], self.params["b"]
        for t in range(tlen):
            a = x[:, t] @ wx + h_prev @ wh + b
            i = _sigmoid(a[:, :h])
            f = _sigmoid(a[:, h:2 * h])
            g = np.tanh(a[:, 2 * h:3 * h])
            o = _sigmoid(a[:, 3 * h:])
            c = f * c_prev + i * g
            tc = np.tanh(c)
            h_t = o * tc
            caches.append((x[:, t], h_prev, c_prev, i, f, g, o, c, tc))
            hs[:, t] = h_t
            h_prev, c_prev = h_t, c
        self._cache = caches
        return hs

    def backward(self, dh_seq: np.ndarray) -> np.ndarray:
        caches = self._cache
        bsz, tlen, h = dh_seq.shape
        dx_seq = np.zeros((bsz, tlen, self.d_in))
        dh_next = np.zeros((bsz, h))
        dc_next = np.zeros((bsz, h))
        wx, wh = self.params["Wx"], self.params["Wh"]
        for t in reversed(range(tlen)):
            x_t, h_prev, c_prev, i, f, g, o, c, tc = caches[t]
            dh = dh_seq[:, t] + dh_next
            do = dh * tc
            dc = dh * o * (1 - tc * tc) + dc_next
            di = dc * g
            df = dc * c_prev
            dg = dc * i
            dc_next = dc * f
            da = np.concatenate([
                di * i * (1 - i),
                df * f * (1 - f),
                dg * (1 - g * g),
                do * o * (1 - o),
            ], axis=1)
            self.grads["Wx"] += x_t.T @ da
            self.grads["Wh"] += h_prev.T @ da
            self.grads["b"] += da.sum(axis=0)
            dx_seq[:, t] = da @ wx.T
            dh_next = da @ wh.T
        return dx_seq


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean categorical cross-entropy; labels are integer class indices."""
    n = probs.shape[0]
    picked = probs[np.arange(n), labels]
    return float(-np.log(np.maximum(picked, 1e-300)).mean())


def softmax_ce_backward(probs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Gradient of mean CE w.r.t. the logits feeding the softmax."""
    n = probs.shape[0]
    d = probs.copy()
    d[np.arange(n), labels] -= 1.0
    return d / n
