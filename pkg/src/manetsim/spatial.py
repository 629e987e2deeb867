"""Uniform-grid neighbor index over the periodic square.

The square is tiled by G x G cells with G = floor(side / radius), so each
cell edge is side/G >= radius and a wrapped 3x3 cell scan is guaranteed to
cover every point within the communication radius.  The index is rebuilt
from scratch every step; queries answer "all agents strictly within radius
of agent i" against the snapshot of the rebuild epoch.
"""

from __future__ import annotations

import numpy as np

from .geometry import torus_distance


def grid_dim(side: float, radius: float) -> int:
    return max(1, int(side // radius))


def scan_offsets(dim: int) -> np.ndarray:
    """Cell offsets for the wrapped neighborhood scan, deduplicated for
    grids narrower than 3 cells."""
    if dim >= 3:
        return np.array([-1, 0, 1], dtype=np.int64)
    if dim == 2:
        return np.array([0, 1], dtype=np.int64)
    return np.array([0], dtype=np.int64)


class NeighborIndex:
    """Bucketed agent ids with CSR layout, one rebuild per step."""

    def __init__(self, side: float, radius: float, n_agents: int):
        self.side = float(side)
        self.radius = float(radius)
        self.n_agents = int(n_agents)
        self.dim = grid_dim(side, radius)
        self.cell_size = self.side / self.dim
        self.offsets = scan_offsets(self.dim)
        n_cells = self.dim * self.dim
        self.cell_start = np.zeros(n_cells + 1, dtype=np.int64)
        self.cell_agents = np.zeros(self.n_agents, dtype=np.int32)
        self.cell_of = np.zeros(self.n_agents, dtype=np.int64)
        self.epoch = -1
        self._positions: np.ndarray | None = None

    def rebuild(self, positions: np.ndarray, epoch: int) -> None:
        """Re-bucket all agents for the given step."""
        dim = self.dim
        ix = (positions[:, 0] / self.cell_size).astype(np.int64)
        iy = (positions[:, 1] / self.cell_size).astype(np.int64)
        # guard against x == side - ulp landing on the seam
        np.clip(ix, 0, dim - 1, out=ix)
        np.clip(iy, 0, dim - 1, out=iy)
        cells = ix * dim + iy
        order = np.argsort(cells, kind="stable")
        counts = np.bincount(cells, minlength=dim * dim)
        self.cell_start[0] = 0
        np.cumsum(counts, out=self.cell_start[1:])
        self.cell_agents = order.astype(np.int32)
        self.cell_of = cells
        self.epoch = epoch
        self._positions = positions

    def candidates_of(self, i: int) -> np.ndarray:
        """All agents bucketed in the wrapped 3x3 neighborhood of i's cell."""
        cell = self.cell_of[i]
        cx, cy = divmod(int(cell), self.dim)
        chunks = []
        for ox in self.offsets:
            gx = (cx + ox) % self.dim
            for oy in self.offsets:
                gy = (cy + oy) % self.dim
                c = gx * self.dim + gy
                chunks.append(self.cell_agents[self.cell_start[c] : self.cell_start[c + 1]])
        return np.concatenate(chunks)

    def neighbors_of(self, i: int, epoch: int) -> np.ndarray:
        """Sorted ids of agents strictly within radius of agent i.

        ``epoch`` must match the last rebuild; querying a stale index is a
        programming error.
        """
        assert epoch == self.epoch, "stale neighbor index"
        assert self._positions is not None
        cand = self.candidates_of(i)
        cand = cand[cand != i]
        dist = torus_distance(self._positions[cand], self._positions[i], self.side)
        found = cand[dist < self.radius]
        found.sort()
        return found
