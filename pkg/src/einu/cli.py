"""Command-line interface: train, run, mfcc, localize.

Reports are machine-readable (NDJSON / JSON on stdout or next to the
output artifact) with matplotlib figures rendered alongside them.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .audio.mfcc import MfccConfig, mfcc_sequence
from .audio.wav import read_wav
from .config import EinuConfig, load_config
from .gait import TASKS, TASK_BOUNDS, gait_train_config, train_gait_policy
from .gait.envs import OBS_LAYOUT
from .localize.tdoa import MicArray, azimuth_from_cross, multilaterate, simulate_arrivals
from .server.checkpoint import load_policy, save_policy
from .sim.terrain import TERRAIN_KINDS, generate_terrain

log = logging.getLogger("einu.cli")


def _figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


# ----------------------------------------------------------------------
# train


def cmd_train(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    ppo = config.ppo if args.config else gait_train_config(args.task)
    out_path = Path(args.out)
    metrics_path = out_path.with_name(out_path.stem + ".metrics.ndjson")
    curve_path = out_path.with_name(out_path.stem + ".learning_curve.png")

    with open(metrics_path, "w") as fh:
        def on_iteration(m):
            fh.write(json.dumps(m.to_json_dict()) + "\n")
            fh.flush()
            print(f"iteration {m.iteration}: return {m.mean_return:.2f} "
                  f"episode_len {m.mean_episode_len:.0f} "
                  f"entropy {m.entropy:.2f}")

        result = train_gait_policy(args.task, config=ppo, seed=args.seed,
                                   iterations=args.iterations,
                                   gait=config.gait,
                                   on_iteration=on_iteration)

    meta = {
        "task": args.task,
        "bounds": [-TASK_BOUNDS[args.task], TASK_BOUNDS[args.task]],
        "obs_layout": list(OBS_LAYOUT),
        "hyperparams": dataclasses.asdict(ppo),
        "seed": args.seed,
    }
    save_policy(result.params, out_path, meta=meta)

    plt = _figure()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([m.iteration for m in result.metrics],
            [m.mean_return for m in result.metrics], marker="o")
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean episode return")
    ax.set_title(f"{args.task} training")
    fig.tight_layout()
    fig.savefig(curve_path, dpi=120)
    plt.close(fig)

    print(f"checkpoint: {out_path}")
    print(f"metrics: {metrics_path}")
    print(f"learning curve: {curve_path}")
    return 0


# ----------------------------------------------------------------------
# run


def cmd_run(args: argparse.Namespace) -> int:
    import uvicorn

    from .server.orchestrator import Orchestrator
    from .server.ws import create_app

    config = load_config(args.config)
    terrain = generate_terrain(args.terrain, seed=args.seed)
    policy = load_policy(args.policy) if args.policy else None
    orchestrator = Orchestrator(terrain, policy=policy, config=config,
                                seed=args.seed, playground=args.playground)
    app = create_app(orchestrator)

    host, _, port = args.serve.rpartition(":")
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port),
                    log_level="warning")
    finally:
        if args.record:
            with open(args.record, "w") as fh:
                for tick, doc in orchestrator.event_log:
                    fh.write(json.dumps({"tick": tick, **doc}) + "\n")
            print(f"event log: {args.record}")
    return 0


# ----------------------------------------------------------------------
# mfcc


def cmd_mfcc(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    buffer = read_wav(Path(args.wav).read_bytes())
    mfcc_cfg = MfccConfig(**dataclasses.asdict(config.mfcc))
    seq = mfcc_sequence(buffer, mfcc_cfg)
    doc = {
        "file": args.wav,
        "sample_rate": buffer.sample_rate,
        "n_samples": int(buffer.samples.shape[0]),
        "n_frames": int(seq.frames.shape[0]),
        "n_coeffs": int(seq.frames.shape[1]),
        "frames": seq.frames.tolist(),
    }
    json.dump(doc, sys.stdout)
    sys.stdout.write("\n")

    if args.plot:
        plt = _figure()
        fig, ax = plt.subplots(figsize=(8, 4))
        im = ax.imshow(seq.frames.T, aspect="auto", origin="lower",
                       interpolation="nearest")
        ax.set_xlabel("frame")
        ax.set_ylabel("cepstral coefficient")
        fig.colorbar(im, ax=ax)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)
        plt.close(fig)
        print(f"figure: {args.plot}", file=sys.stderr)
    return 0


# ----------------------------------------------------------------------
# localize


def cmd_localize(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    try:
        sx, sy = (float(v) for v in args.source.split(","))
    except ValueError:
        print("--source expects x,y", file=sys.stderr)
        return 2
    array = MicArray(spacing=config.array.spacing,
                     speed_of_sound=config.array.speed_of_sound)
    arrivals = simulate_arrivals((sx, sy), 0.0, array)
    bearing = azimuth_from_cross(arrivals.dt_x, arrivals.dt_y, array)
    result = multilaterate(arrivals, array)
    doc = {
        "source": [sx, sy],
        "arrivals": list(arrivals.times),
        "dt_x": arrivals.dt_x,
        "dt_y": arrivals.dt_y,
        "azimuth_rad": bearing.azimuth,
        "azimuth_deg": math.degrees(bearing.azimuth),
        "confidence": bearing.confidence,
        "position_estimate": [float(result.position[0]),
                              float(result.position[1])],
        "iterations": result.iterations,
    }
    json.dump(doc, sys.stdout)
    sys.stdout.write("\n")

    if args.plot:
        plt = _figure()
        fig, ax = plt.subplots(figsize=(5, 5))
        mics = array.positions()
        ax.scatter(mics[:, 0], mics[:, 1], marker="^", label="microphones")
        ax.scatter([sx], [sy], marker="*", s=120, label="source")
        ax.scatter([result.position[0]], [result.position[1]], marker="x",
                   label="estimate")
        r = max(1.0, math.hypot(sx, sy))
        ax.plot([0, r * math.cos(bearing.azimuth)],
                [0, r * math.sin(bearing.azimuth)], "--", label="bearing")
        ax.set_aspect("equal")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)
        plt.close(fig)
        print(f"figure: {args.plot}", file=sys.stderr)
    return 0


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="einu")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a gait policy")
    t.add_argument("--task", required=True, choices=sorted(TASKS))
    t.add_argument("--config", default=None)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--iterations", type=int, default=10)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    r = sub.add_parser("run", help="serve the simulation over WebSocket")
    r.add_argument("--terrain", required=True, choices=sorted(TERRAIN_KINDS))
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--policy", default=None)
    r.add_argument("--serve", default="127.0.0.1:8000", metavar="HOST:PORT")
    r.add_argument("--playground", action="store_true")
    r.add_argument("--config", default=None)
    r.add_argument("--record", default=None, metavar="FILE",
                   help="write the event log as NDJSON on shutdown")
    r.set_defaults(func=cmd_run)

    m = sub.add_parser("mfcc", help="cepstral features of a WAV file")
    m.add_argument("wav")
    m.add_argument("--config", default=None)
    m.add_argument("--plot", default=None, metavar="PNG")
    m.set_defaults(func=cmd_mfcc)

    l = sub.add_parser("localize", help="bearing and position of a source")
    l.add_argument("--source", required=True, metavar="X,Y")
    l.add_argument("--config", default=None)
    l.add_argument("--plot", default=None, metavar="PNG")
    l.set_defaults(func=cmd_localize)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
