"""Graded time meshes, two-point collocation grids and the fine error grid.

Interval and node indices in the scalar helpers follow the usual
mathematical convention: nodes ``t_0..t_N``, intervals ``I_n = (t_{n-1}, t_n]``
for ``n = 1..N`` and collocation index ``j`` in ``{1, 2}``.  Arrays are stored
0-based (``points[n-1, j-1]`` holds ``t_{n,j}``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

GAUSS_XI = ((3.0 - math.sqrt(3.0)) / 6.0, (3.0 + math.sqrt(3.0)) / 6.0)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class GradedMesh:
    """Nodes ``t_n = (n/N)**delta * T``."""

    capital_n: int
    delta: float
    horizon: float
    nodes: np.ndarray

    @property
    def steps(self):
        return np.diff(self.nodes)

    @property
    def midpoints(self):
        return 0.5 * (self.nodes[1:] + self.nodes[:-1])

    @property
    def max_step(self):
        return float(self.steps.max())

    def interval_of(self, t):
        """1-based index n with t in (t_{n-1}, t_n]; t must lie in (0, T]."""
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0) or np.any(t > self.horizon):
            raise DomainError("t must lie in (0, T]")
        return np.searchsorted(self.nodes, t, side="left")


@dataclass(frozen=True, eq=False)
class CollocationGrid:
    """Collocation points ``t_{n,j} = t_{n-1} + xi_j * dt_n``."""

    mesh: GradedMesh
    xi: tuple
    points: np.ndarray  # shape (N, 2)
    zeta: np.ndarray  # t_{n,2} - t_{n,1}

    @property
    def capital_n(self):
        return self.mesh.capital_n

    @property
    def flat(self):
        """All collocation points in ascending order, t_{1,1}, t_{1,2}, t_{2,1}, ..."""
        return self.points.reshape(-1)

    @property
    def centres(self):
        """Midpoint between the two collocation points of each interval."""
        return 0.5 * (self.points[:, 0] + self.points[:, 1])


def build_graded(capital_n: int, delta: float, horizon: float = 1.0) -> GradedMesh:
    """Graded mesh on [0, horizon]; delta = 1 is the uniform mesh."""
    if isinstance(capital_n, bool) or int(capital_n) != capital_n or capital_n < 1:
        raise DomainError(f"N must be a positive integer, got {capital_n!r}")
    if not (delta >= 1.0) or not math.isfinite(delta):
        raise DomainError(f"grading exponent must be >= 1, got {delta!r}")
    if not (horizon > 0) or not math.isfinite(horizon):
        raise DomainError(f"horizon must be positive, got {horizon!r}")
    capital_n = int(capital_n)
    nodes = (np.arange(capital_n + 1) / capital_n) ** float(delta) * float(horizon)
    nodes[-1] = float(horizon)
    if np.any(np.diff(nodes) <= 0):
        raise DomainError("mesh is not strictly increasing in double precision")
    return GradedMesh(capital_n, float(delta), float(horizon), _frozen(nodes))


def collocation_points(mesh: GradedMesh, xi1: float = GAUSS_XI[0], xi2: float = GAUSS_XI[1]) -> CollocationGrid:
    """Two collocation points per interval at relative positions xi1 < xi2."""
    if not (0.0 < xi1 < xi2 < 1.0):
        raise DomainError(f"need 0 < xi1 < xi2 < 1, got ({xi1!r}, {xi2!r})")
    left = mesh.nodes[:-1]
    dt = mesh.steps
    pts = np.stack([left + xi1 * dt, left + xi2 * dt], axis=1)
    zeta = pts[:, 1] - pts[:, 0]
    if np.any(zeta <= 0) or np.any(pts[:, 0] <= left):
        raise DomainError("collocation points collapse in double precision; mesh too fine")
    return CollocationGrid(mesh, (float(xi1), float(xi2)), _frozen(pts), _frozen(zeta))


def _check_index(grid, n, j):
    if not (1 <= n <= grid.capital_n):
        raise IndexError(f"interval index {n} outside 1..{grid.capital_n}")
    if j not in (1, 2):
        raise IndexError(f"basis index must be 1 or 2, got {j}")


def lagrange(grid: CollocationGrid, n: int, j: int, t):
    """Local linear Lagrange basis L_{n,j}(t) on interval n (1-based)."""
    _check_index(grid, n, j)
    t1, t2 = grid.points[n - 1]
    z = grid.zeta[n - 1]
    if j == 1:
        return (t2 - t) / z
    return (t - t1) / z


def fine_grid(grid: CollocationGrid) -> np.ndarray:
    """Collocation points, interval midpoints and right nodes, sorted and deduplicated."""
    pts = np.concatenate([grid.flat, grid.mesh.midpoints, grid.mesh.nodes[1:]])
    pts = np.unique(pts)  # sorts; exact duplicates dropped
    return pts[pts > 0]
