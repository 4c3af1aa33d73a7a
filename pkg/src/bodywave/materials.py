"""Linear acoustic material data, one-sided grids, and cell-centered fields.

The 1D model problem couples two half-line fluids to a rigid body at the
origin.  Each side carries velocity v and stress sigma on a uniform
cell-centered grid with a single ghost cell at the body.  Characteristic
variables

    a = (sigma - z v) / (2 c z)     (right-moving)
    b = (sigma + z v) / (2 c z)     (left-moving)

diagonalize the system; z = rho*c is the impedance and kappa = rho*c^2 the
bulk modulus.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FluidMaterial:
    """Acoustic medium with density rho and sound speed c."""

    rho: float
    c: float
    z: float = field(init=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        if not (self.rho > 0.0 and np.isfinite(self.rho)):
            raise ValueError(f"rho must be positive and finite, got {self.rho}")
        if not (self.c > 0.0 and np.isfinite(self.c)):
            raise ValueError(f"c must be positive and finite, got {self.c}")
        object.__setattr__(self, "z", self.rho * self.c)
        object.__setattr__(self, "kappa", self.rho * self.c * self.c)


@dataclass(frozen=True)
class Grid1D:
    """Uniform cell-centered half-line grid on one side of the body.

    The body occupies [-body_half_width, +body_half_width].  Interior cells
    sit outside the body; one ghost cell sits just inside, so the body edge
    lies midway between the ghost center and the nearest interior center.
    Arrays are stored in physical x order, which puts the ghost cell at the
    *last* index on the left side and at index 0 on the right side.
    """

    side: str
    n_cells: int
    dx: float
    body_half_width: float = 0.0

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.n_cells < 3:
            raise ValueError(f"need n_cells >= 3, got {self.n_cells}")
        if not (self.dx > 0.0 and np.isfinite(self.dx)):
            raise ValueError(f"dx must be positive and finite, got {self.dx}")
        if self.body_half_width < 0.0:
            raise ValueError("body_half_width must be >= 0")

    @classmethod
    def uniform(cls, side: str, length: float, dx: float, body_half_width: float = 0.0) -> "Grid1D":
        """Grid covering `length` of fluid with cell size dx (n rounded)."""
        return cls(side, int(round(length / dx)), dx, body_half_width)

    @property
    def n_points(self) -> int:
        return self.n_cells + 1

    @property
    def ghost_index(self) -> int:
        return self.n_cells if self.side == "left" else 0

    @property
    def far_index(self) -> int:
        return 0 if self.side == "left" else self.n_cells

    @property
    def interior(self) -> slice:
        """Slice selecting interior (non-ghost) cells, in array order."""
        if self.side == "left":
            return slice(0, self.n_cells)
        return slice(1, self.n_cells + 1)

    def body_cell_index(self, k: int = 1) -> int:
        """Array index of the k-th interior cell counted from the body."""
        if not 1 <= k <= self.n_cells:
            raise ValueError(f"k must be in [1, n_cells], got {k}")
        return self.n_cells - k if self.side == "left" else k

    @property
    def interface_x(self) -> float:
        return -self.body_half_width if self.side == "left" else self.body_half_width

    def cell_centers(self) -> np.ndarray:
        """Centers of all cells (ghost included), in array order."""
        w2 = self.body_half_width
        if self.side == "left":
            i = np.arange(-self.n_cells, 1)  # i = 0 is the ghost
            return -w2 + (i + 0.5) * self.dx
        i = np.arange(0, self.n_cells + 1)
        return w2 + (i - 0.5) * self.dx


@dataclass
class FluidField1D:
    """Velocity/stress state on one grid, ghost cell included."""

    grid: Grid1D
    v: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        npts = self.grid.n_points
        if self.v.shape != (npts,) or self.sigma.shape != (npts,):
            raise ValueError(
                f"field arrays must have shape ({npts},), got v {self.v.shape} sigma {self.sigma.shape}"
            )

    @classmethod
    def quiescent(cls, grid: Grid1D) -> "FluidField1D":
        return cls(grid, np.zeros(grid.n_points), np.zeros(grid.n_points))

    @classmethod
    def from_functions(cls, grid: Grid1D, v_fn, sigma_fn) -> "FluidField1D":
        """Sample v(x), sigma(x) at every cell center (ghost included).

        The ghost value is a placeholder; couplers overwrite it with the
        interface conditions before any stepping.
        """
        x = grid.cell_centers()
        return cls(grid, v_fn(x), sigma_fn(x))

    def copy(self) -> "FluidField1D":
        return FluidField1D(self.grid, self.v.copy(), self.sigma.copy())

    def to_characteristics(self, mat: FluidMaterial) -> tuple[np.ndarray, np.ndarray]:
        """Return (a, b) with a = (sigma - z v)/(2cz), b = (sigma + z v)/(2cz)."""
        s = 1.0 / (2.0 * mat.c * mat.z)
        a = (self.sigma - mat.z * self.v) * s
        b = (self.sigma + mat.z * self.v) * s
        return a, b

    @classmethod
    def from_characteristics(
        cls, grid: Grid1D, mat: FluidMaterial, a: np.ndarray, b: np.ndarray
    ) -> "FluidField1D":
        """Inverse map: v = c(-a + b), sigma = c z (a + b).

        Evaluated as v = cb - ca, sigma = z(cb) + z(ca) so that a state with
        one characteristic exactly zero converts back to exactly zero: with
        a == 0 the stored pair is (cb, z*(cb)) and sigma - z v cancels
        bit-exactly (and symmetrically for b == 0).  Pure radiation then
        never leaks roundoff into the opposite characteristic family.
        """
        va = mat.c * np.asarray(a, dtype=float)
        vb = mat.c * np.asarray(b, dtype=float)
        return cls(grid, vb - va, mat.z * vb + mat.z * va)
