"""Uniform square grids used for field evaluation and integration."""
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError, ResolutionError

DEFAULT_GRID_FACTOR = 16
MIN_GRID_FACTOR = 8
# beyond this the node arrays no longer fit in memory
MAX_GRID_NODES = 2 ** 26


@dataclass(frozen=True)
class Grid:
    """Nodes ``(x0 + i*spacing, y0 + j*spacing)`` for ``i < nx``, ``j < ny``.

    Arrays sampled on the grid are indexed ``[i, j]`` (x first).
    """

    x0: float
    y0: float
    spacing: float
    nx: int
    ny: int

    def __post_init__(self):
        if not self.spacing > 0:
            raise InvalidArgumentError("grid spacing must be positive")
        if self.nx < 1 or self.ny < 1:
            raise InvalidArgumentError("grid needs at least one node per axis")

    @property
    def xs(self):
        return self.x0 + self.spacing * np.arange(self.nx)

    @property
    def ys(self):
        return self.y0 + self.spacing * np.arange(self.ny)

    @property
    def shape(self):
        return (self.nx, self.ny)

    def nodes(self):
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def centers(self) -> "Grid":
        """Grid of cell centers, one fewer point per axis."""
        h = 0.5 * self.spacing
        return Grid(self.x0 + h, self.y0 + h, self.spacing, max(self.nx - 1, 1), max(self.ny - 1, 1))

    def extent(self):
        return (self.x0, self.y0, self.x0 + (self.nx - 1) * self.spacing,
                self.y0 + (self.ny - 1) * self.spacing)

    def check_resolution(self, E):
        """Raise when the spacing exceeds ``1/(8 sqrt(E))``."""
        limit = 1.0 / (MIN_GRID_FACTOR * np.sqrt(E))
        if self.spacing > limit * (1 + 1e-12):
            raise ResolutionError(
                f"grid spacing {self.spacing:.3g} exceeds {limit:.3g} required at E={E:g}")


def nodes_per_unit(E, grid_factor=DEFAULT_GRID_FACTOR):
    """Smallest multiple of 8 that is at least ``grid_factor * sqrt(E)``.

    Domain edges sitting on multiples of 1/8 then fall on grid lines.
    """
    if grid_factor < MIN_GRID_FACTOR:
        raise ResolutionError(f"grid_factor must be at least {MIN_GRID_FACTOR}")
    m = int(np.ceil(grid_factor * np.sqrt(E) - 1e-9))
    return 8 * int(np.ceil(m / 8))


def grid_covering(bbox, E, grid_factor=DEFAULT_GRID_FACTOR, max_nodes=MAX_GRID_NODES) -> Grid:
    """Grid aligned to multiples of its spacing that covers ``bbox``.

    Raises ResolutionError when the required spacing needs more than
    ``max_nodes`` nodes.
    """
    m = nodes_per_unit(E, grid_factor)
    x0, y0, x1, y1 = bbox
    i0, j0 = np.floor(x0 * m + 1e-9), np.floor(y0 * m + 1e-9)
    i1, j1 = np.ceil(x1 * m - 1e-9), np.ceil(y1 * m - 1e-9)
    nx, ny = int(i1 - i0) + 1, int(j1 - j0) + 1
    if nx * ny > max_nodes:
        raise ResolutionError(f"E={E:g} needs a {nx}x{ny} grid, above the {max_nodes} node limit")
    return Grid(i0 / m, j0 / m, 1.0 / m, nx, ny)
