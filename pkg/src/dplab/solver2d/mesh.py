"""Structured triangular meshes with a two-sided horizontal crack."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np

Box = Tuple[float, float, float, float]

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class CrackMesh:
    """Uniform grid on ``box`` split into triangles, cut along one grid segment.

    Nodes strictly inside the crack are stored twice: the original grid
    index is the ``plus`` copy (used by triangles above the crack) and an
    appended index is the ``minus`` copy (used by triangles below).  The two
    tip nodes stay single, so discrete functions are continuous there.
    """

    box: Box
    h: float
    nx: int
    ny: int
    segment: Tuple[float, float, float]
    crack_i: Tuple[int, int]
    crack_j: int
    nodes: np.ndarray        # (n_nodes, 2) coordinates
    triangles: np.ndarray    # (n_tri, 3) node indices, counter-clockwise
    crack_plus: np.ndarray   # node index of the plus copy per crack node (tips included)
    crack_minus: np.ndarray  # node index of the minus copy per crack node
    boundary: np.ndarray     # bool mask over nodes on the outer box

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_grid_nodes(self) -> int:
        return (self.nx + 1) * (self.ny + 1)

    @property
    def n_duplicated(self) -> int:
        return self.n_nodes - self.n_grid_nodes

    @property
    def crack_x(self) -> np.ndarray:
        return self.nodes[self.crack_plus, 0]

    @property
    def crack_length(self) -> float:
        return (self.crack_i[1] - self.crack_i[0]) * self.h

    @property
    def tip_nodes(self) -> Tuple[int, int]:
        return int(self.crack_plus[0]), int(self.crack_plus[-1])

    @property
    def interface(self) -> np.ndarray:
        """Crack edges as rows ``(plus_a, minus_a, plus_b, minus_b)``; each has length ``h``."""
        return np.column_stack([self.crack_plus[:-1], self.crack_minus[:-1],
                                self.crack_plus[1:], self.crack_minus[1:]])

    def grid_index(self, i, j):
        return np.asarray(j) * (self.nx + 1) + np.asarray(i)


def _grid_count(length: float, h: float, what: str) -> int:
    n = int(round(length / h))
    if n < 2 or abs(n * h - length) > _GRID_TOL * max(1.0, length):
        raise ValueError(f"{what} {length} is not a multiple of h={h}")
    return n


def _snap(value: float, origin: float, h: float, what: str) -> int:
    k = int(round((value - origin) / h))
    if abs(origin + k * h - value) > _GRID_TOL * max(1.0, abs(value)):
        warnings.warn(f"{what}={value} is not grid aligned; snapped to {origin + k * h}",
                      stacklevel=3)
    return k


def build_crack_mesh(box: Box, h: float, segment: Tuple[float, float, float]) -> CrackMesh:
    """Mesh ``box = (x_min, x_max, y_min, y_max)`` with spacing ``h`` and cut it
    along ``segment = (x_a, x_b, y0)``.

    Each grid square is split by its lower-left to upper-right diagonal.
    Segment endpoints off the grid are snapped with a warning; a segment
    reaching the outer boundary is rejected.
    """
    x_min, x_max, y_min, y_max = map(float, box)
    if not h > 0:
        raise ValueError("h must be positive")
    if not (x_max > x_min and y_max > y_min):
        raise ValueError("box must have positive width and height")
    nx = _grid_count(x_max - x_min, h, "box width")
    ny = _grid_count(y_max - y_min, h, "box height")
    x_a, x_b, y0 = map(float, segment)
    if x_b < x_a:
        x_a, x_b = x_b, x_a
    ia = _snap(x_a, x_min, h, "x_a")
    ib = _snap(x_b, x_min, h, "x_b")
    j0 = _snap(y0, y_min, h, "y0")
    if ib <= ia:
        raise ValueError("segment collapses to a point on this grid")
    if ia <= 0 or ib >= nx or j0 <= 0 or j0 >= ny:
        raise ValueError("segment touches the outer boundary of the box")

    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1))
    grid = np.column_stack([x_min + h * ii.ravel(), y_min + h * jj.ravel()])
    n_grid = grid.shape[0]

    interior_i = np.arange(ia + 1, ib)
    plus_interior = j0 * (nx + 1) + interior_i
    minus_interior = n_grid + np.arange(interior_i.size)
    nodes = np.vstack([grid, grid[plus_interior]])

    si, sj = np.meshgrid(np.arange(nx), np.arange(ny))
    si, sj = si.ravel(), sj.ravel()
    ll = sj * (nx + 1) + si
    lr = ll + 1
    ul = ll + (nx + 1)
    ur = ul + 1
    # squares just below the crack take the minus copies on their top edge
    remap = np.arange(nodes.shape[0])
    remap[plus_interior] = minus_interior
    below = sj == j0 - 1
    ul = np.where(below, remap[ul], ul)
    ur = np.where(below, remap[ur], ur)
    triangles = np.vstack([np.column_stack([ll, lr, ur]), np.column_stack([ll, ur, ul])])

    tip_a = j0 * (nx + 1) + ia
    tip_b = j0 * (nx + 1) + ib
    crack_plus = np.concatenate([[tip_a], plus_interior, [tip_b]])
    crack_minus = np.concatenate([[tip_a], minus_interior, [tip_b]])

    gb = (ii.ravel() == 0) | (ii.ravel() == nx) | (jj.ravel() == 0) | (jj.ravel() == ny)
    boundary = np.concatenate([gb, np.zeros(interior_i.size, dtype=bool)])

    for arr in (nodes, triangles, crack_plus, crack_minus, boundary):
        arr.setflags(write=False)
    return CrackMesh(
        box=(x_min, x_max, y_min, y_max), h=float(h), nx=nx, ny=ny,
        segment=(x_min + ia * h, x_min + ib * h, y_min + j0 * h),
        crack_i=(ia, ib), crack_j=j0, nodes=nodes, triangles=triangles,
        crack_plus=crack_plus, crack_minus=crack_minus, boundary=boundary)
