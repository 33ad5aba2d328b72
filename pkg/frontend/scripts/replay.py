#!/usr/bin/env python3
"""Headless replay of a console-recorded message log.

Reads NDJSON lines {"tick": int, "message": {...}} on stdin, applies each
message at its tick against a fresh orchestrator, and prints every
telemetry message as NDJSON. Same seed + same log => identical output.
"""

import argparse
import json
import sys

from einu.server import Orchestrator
from einu.server.ws import parse_client_message
from einu.sim import generate_terrain


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--terrain", default="flat")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ticks", type=int, default=None)
    args = parser.parse_args()

    entries = [json.loads(line) for line in sys.stdin if line.strip()]
    entries.sort(key=lambda e: e["tick"])
    ticks = args.ticks if args.ticks is not None else (
        (entries[-1]["tick"] if entries else 0) + 40)

    orch = Orchestrator(generate_terrain(args.terrain, seed=args.seed),
                        seed=args.seed)
    i = 0
    for t in range(ticks):
        while i < len(entries) and entries[i]["tick"] <= t:
            parse_client_message(entries[i]["message"], orch)
            i += 1
        for message in orch.tick():
            print(json.dumps(message))
    return 0


if __name__ == "__main__":
    sys.exit(main())
