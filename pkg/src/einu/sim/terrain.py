"""Procedural heightfield terrains: flat, uneven (per-cell uniform noise),
hilly (sum of smooth Gaussian bumps), and maze (recursive-backtracker walls
rendered as raised cells)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import InvalidParams

TERRAIN_KINDS = ("flat", "uneven", "hilly", "maze")
WALL_HEIGHT = 0.5  # m


@dataclass
class Terrain:
    kind: str
    heights: np.ndarray          # (ny, nx), row-major y then x
    cell_size: float             # m
    seed: int
    params: dict = field(default_factory=dict)
    start_cell: tuple[int, int] | None = None  # (ix, iy), maze only
    goal_cell: tuple[int, int] | None = None

    @property
    def extent(self) -> tuple[float, float]:
        ny, nx = self.heights.shape
        return nx * self.cell_size, ny * self.cell_size

    def _origin(self) -> tuple[float, float]:
        # grid centered on the world origin
        w, h = self.extent
        return -w / 2.0, -h / 2.0

    def height_at(self, x: float, y: float) -> float:
        """Bilinear heightfield lookup; clamped at the grid edge."""
        ox, oy = self._origin()
        ny, nx = self.heights.shape
        gx = min(max((x - ox) / self.cell_size - 0.5, 0.0), nx - 1.0)
        gy = min(max((y - oy) / self.cell_size - 0.5, 0.0), ny - 1.0)
        ix0, iy0 = int(gx), int(gy)
        ix1, iy1 = min(ix0 + 1, nx - 1), min(iy0 + 1, ny - 1)
        fx, fy = gx - ix0, gy - iy0
        h = self.heights
        return float((1 - fx) * (1 - fy) * h[iy0, ix0] + fx * (1 - fy) * h[iy0, ix1]
                     + (1 - fx) * fy * h[iy1, ix0] + fx * fy * h[iy1, ix1])

    def cell_center(self, cell: tuple[int, int]) -> tuple[float, float]:
        ox, oy = self._origin()
        ix, iy = cell
        return ox + (ix + 0.5) * self.cell_size, oy + (iy + 0.5) * self.cell_size

    def to_json_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "seed": self.seed,
            "cell_size": self.cell_size,
            "shape": list(self.heights.shape),
            "heights": self.heights.flatten().tolist(),
            "params": self.params,
        }
        if self.start_cell is not None:
            doc["start_cell"] = list(self.start_cell)
            doc["goal_cell"] = list(self.goal_cell)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Terrain":
        ny, nx = doc["shape"]
        return cls(
            kind=doc["kind"],
            heights=np.array(doc["heights"]).reshape(ny, nx),
            cell_size=doc["cell_size"],
            seed=doc["seed"],
            params=doc.get("params", {}),
            start_cell=tuple(doc["start_cell"]) if "start_cell" in doc else None,
            goal_cell=tuple(doc["goal_cell"]) if "goal_cell" in doc else None,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict()))

    @classmethod
    def load(cls, path: str | Path) -> "Terrain":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def _maze_grid(cells: int, rng: np.random.Generator) -> np.ndarray:
    """Recursive-backtracker maze on an odd-sized grid; True = wall."""
    wall = np.ones((cells, cells), dtype=bool)
    start = (1, 1)
    wall[start] = False
    stack = [start]
    while stack:
        cy, cx = stack[-1]
        neighbors = []
        for dy, dx in ((2, 0), (-2, 0), (0, 2), (0, -2)):
            ny_, nx_ = cy + dy, cx + dx
            if 1 <= ny_ < cells - 1 and 1 <= nx_ < cells - 1 and wall[ny_, nx_]:
                neighbors.append((ny_, nx_))
        if not neighbors:
            stack.pop()
            continue
        ny_, nx_ = neighbors[rng.integers(len(neighbors))]
        wall[(cy + ny_) // 2, (cx + nx_) // 2] = False
        wall[ny_, nx_] = False
        stack.append((ny_, nx_))
    return wall


DEFAULT_AMPLITUDE = {"uneven": 0.015, "hilly": 0.04}

# heightfield cells per maze cell: the bilinear wall ramps stay narrow and
# corridor floors are flat
MAZE_SUBCELLS = 5


def generate_terrain(kind: str, seed: int, *,
                     amplitude: float | None = None,
                     size_m: float = 10.0,
                     cell_size: float = 0.25,
                     maze_cells: int = 9,
                     maze_cell_width: float = 1.0,
                     wall_height: float = WALL_HEIGHT,
                     n_bumps: int = 30) -> Terrain:
    """Deterministic terrain synthesis; identical args give identical grids."""
    if kind not in TERRAIN_KINDS:
        raise InvalidParams(f"unknown terrain kind {kind!r}")
    if amplitude is None:
        amplitude = DEFAULT_AMPLITUDE.get(kind, 0.0)
    if amplitude < 0:
        raise InvalidParams("amplitude must be >= 0")
    rng = np.random.default_rng(seed)
    params = {"amplitude": amplitude}

    if kind == "maze":
        if maze_cells < 3:
            raise InvalidParams("maze needs at least 3x3 cells")
        if maze_cells % 2 == 0:
            maze_cells += 1  # backtracker needs odd dimensions
        wall = _maze_grid(maze_cells, rng)
        # render each maze cell as a 5x5 block of heightfield cells so the
        # bilinear wall ramps stay narrow and corridors have a flat floor
        sub = MAZE_SUBCELLS
        heights = np.kron(wall.astype(float), np.ones((sub, sub))) * wall_height
        t = Terrain(kind=kind, heights=heights,
                    cell_size=maze_cell_width / sub,
                    seed=seed, params={"wall_height": wall_height,
                                       "cells": maze_cells,
                                       "cell_width": maze_cell_width},
                    start_cell=(sub * 1 + sub // 2, sub * 1 + sub // 2),
                    goal_cell=(sub * (maze_cells - 2) + sub // 2,
                               sub * (maze_cells - 2) + sub // 2))
        return t

    n = int(round(size_m / cell_size))
    if kind == "flat":
        heights = np.zeros((n, n))
    elif kind == "uneven":
        heights = rng.uniform(-amplitude, amplitude, (n, n))
    else:  # hilly
        heights = np.zeros((n, n))
        xs = np.arange(n)[None, :] * cell_size
        ys = np.arange(n)[:, None] * cell_size
        for _ in range(n_bumps):
            cx = rng.uniform(0, size_m)
            cy = rng.uniform(0, size_m)
            sig = rng.uniform(0.5, 1.5)
            amp = rng.uniform(0.3, 1.0) * amplitude * 2
            heights += amp * np.exp(-((xs - cx) ** 2 + (ys - cy) ** 2) / (2 * sig ** 2))
        params = {"amplitude": amplitude, "n_bumps": n_bumps}
    return Terrain(kind=kind, heights=heights, cell_size=cell_size,
                   seed=seed, params=params)


def maze_path(terrain: Terrain) -> list[tuple[int, int]] | None:
    """Breadth-first path over floor cells from start to goal, as (ix, iy)
    cell indices; None when no path exists."""
    if terrain.kind != "maze":
        raise InvalidParams("maze_path applies to maze terrains only")
    wall = terrain.heights > 0
    ny, nx = wall.shape
    start = (terrain.start_cell[1], terrain.start_cell[0])
    goal = (terrain.goal_cell[1], terrain.goal_cell[0])
    prev: dict[tuple[int, int], tuple[int, int] | None] = {start: None}
    queue = [start]
    while queue:
        cur = queue.pop(0)
        if cur == goal:
            path = []
            node: tuple[int, int] | None = cur
            while node is not None:
                path.append((node[1], node[0]))
                node = prev[node]
            return list(reversed(path))
        cy, cx = cur
        for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nxt = (cy + dy, cx + dx)
            if (0 <= nxt[0] < ny and 0 <= nxt[1] < nx
                    and not wall[nxt] and nxt not in prev):
                prev[nxt] = cur
                queue.append(nxt)
    return None


def maze_waypoints(terrain: Terrain) -> list[tuple[float, float]] | None:
    """Corridor-midline waypoints from start to goal: the centers of the
    maze cells along the solution path, in world coordinates."""
    path = maze_path(terrain)
    if path is None:
        return None
    sub = MAZE_SUBCELLS
    cells: list[tuple[int, int]] = []
    for ix, iy in path:
        c = (ix // sub, iy // sub)
        if not cells or cells[-1] != c:
            cells.append(c)
    return [terrain.cell_center((cx * sub + sub // 2, cy * sub + sub // 2))
            for cx, cy in cells]
