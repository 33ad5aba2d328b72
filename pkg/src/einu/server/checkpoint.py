"""Policy checkpoint file format.

Layout: 8-byte magic, 4-byte little-endian header length, JSON header,
then the weight payload as 32-bit little-endian floats in the order the
header's layer list declares.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import BadMagic, LengthMismatch, VersionMismatch
from ..gait.policy import Mlp, ObsNormalizer, PolicyParams

CHECKPOINT_MAGIC = b"EINUPOL1"
FORMAT_VERSION = 1


def _layer_entries(params: PolicyParams) -> list[tuple[str, list[int]]]:
    return [(name, list(arr.shape)) for name, arr in params.named_arrays()]


def save_policy(params: PolicyParams, path: str | Path,
                meta: dict | None = None) -> None:
    """Write params to path; load_policy(path) round-trips bit-exactly.

    Weights are stored as float32, so params intended for persistence are
    cast once here and the in-memory copy keeps full precision.
    """
    entries = _layer_entries(params)
    header = {
        "version": FORMAT_VERSION,
        "obs_dim": params.obs_dim,
        "action_dim": params.action_dim,
        "normalizer_count": params.normalizer.count,
        "layers": [{"name": n, "shape": s} for n, s in entries],
        "meta": {**params.meta, **(meta or {})},
    }
    blob = json.dumps(header).encode("utf-8")
    payload = b"".join(
        np.ascontiguousarray(arr, dtype="<f4").tobytes()
        for _, arr in params.named_arrays())
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(payload)


def load_policy(path: str | Path) -> PolicyParams:
    raw = Path(path).read_bytes()
    if raw[:8] != CHECKPOINT_MAGIC:
        raise BadMagic(f"expected magic {CHECKPOINT_MAGIC!r}, "
                       f"got {raw[:8]!r}")
    if len(raw) < 12:
        raise LengthMismatch("file too short for header length field")
    (hlen,) = struct.unpack("<I", raw[8:12])
    if len(raw) < 12 + hlen:
        raise LengthMismatch("file too short for declared header")
    header = json.loads(raw[12:12 + hlen].decode("utf-8"))
    if header.get("version") != FORMAT_VERSION:
        raise VersionMismatch(
            f"checkpoint version {header.get('version')} != {FORMAT_VERSION}")

    shapes = [(e["name"], tuple(e["shape"])) for e in header["layers"]]
    expected = 4 * sum(int(np.prod(s)) if s else 1 for _, s in shapes)
    payload = raw[12 + hlen:]
    if len(payload) != expected:
        raise LengthMismatch(
            f"payload is {len(payload)} bytes, header declares {expected}")

    arrays: dict[str, np.ndarray] = {}
    offset = 0
    for name, shape in shapes:
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(payload, dtype="<f4", count=count,
                            offset=offset).astype(np.float64).reshape(shape)
        arrays[name] = arr
        offset += 4 * count

    obs_dim, action_dim = header["obs_dim"], header["action_dim"]
    n_actor = sum(1 for n, _ in shapes if n.startswith("actor.w"))
    actor_sizes = [obs_dim] + [arrays[f"actor.w{i}"].shape[1]
                               for i in range(n_actor)]
    n_critic = sum(1 for n, _ in shapes if n.startswith("critic.w"))
    critic_sizes = [obs_dim] + [arrays[f"critic.w{i}"].shape[1]
                                for i in range(n_critic)]
    actor, critic = Mlp(actor_sizes), Mlp(critic_sizes)
    for i in range(n_actor):
        actor.weights[i] = arrays[f"actor.w{i}"]
        actor.biases[i] = arrays[f"actor.b{i}"]
    for i in range(n_critic):
        critic.weights[i] = arrays[f"critic.w{i}"]
        critic.biases[i] = arrays[f"critic.b{i}"]
    normalizer = ObsNormalizer(mean=arrays["norm.mean"],
                               var=arrays["norm.var"],
                               count=float(header["normalizer_count"]),
                               frozen=True)
    return PolicyParams(actor=actor, critic=critic,
                        log_std=arrays["log_std"], normalizer=normalizer,
                        obs_dim=obs_dim, action_dim=action_dim,
                        meta=dict(header.get("meta", {})))
