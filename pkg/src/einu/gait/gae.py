"""Generalized advantage estimation over a rollout, truncated at episode
boundaries."""

from __future__ import annotations

import numpy as np


def compute_gae(rewards: np.ndarray, values: np.ndarray, bootstrap_value: float,
                gamma: float, lam: float,
                dones: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """A_t = sum_l (gamma*lam)^l delta_{t+l}, delta_t = r_t + gamma V_{t+1} - V_t.

    `dones[t]` true means the episode ended after step t, which truncates
    both the TD target and the advantage recursion.  Returns (advantages,
    returns) with returns = advantages + values.
    """
    rewards = np.asarray(rewards, dtype=float)
    values = np.asarray(values, dtype=float)
    n = len(rewards)
    if len(values) != n:
        raise ValueError("rewards and values must be aligned")
    if not (0.0 <= gamma <= 1.0 and 0.0 <= lam <= 1.0):
        raise ValueError("gamma and lambda must be in [0, 1]")
    if dones is None:
        dones = np.zeros(n, dtype=bool)
    adv = np.zeros(n)
    last = 0.0
    for t in reversed(range(n)):
        next_value = bootstrap_value if t == n - 1 else values[t + 1]
        non_terminal = 0.0 if dones[t] else 1.0
        delta = rewards[t] + gamma * next_value * non_terminal - values[t]
        last = delta + gamma * lam * non_terminal * last
        adv[t] = last
    return adv, adv + values
