"""
Space-time grids, sampled fields and wave packet tubes.
"""
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from harmonic_core.errors import GridError, NyquistGuardError
from harmonic_core.profiles import next_power_of_two

LATTICE_TOLERANCE = 1e-9
DEFAULT_MAX_NX = 8192

ArrayLike = Union[float, np.ndarray]


def nyquist_samples(x_half: float, t_half: float) -> int:
    """Minimum profile sample count for evaluating Ef on |x| <= x_half, |t| <= t_half"""
    return int(np.ceil(4.0 * (abs(x_half) + 2.0 * abs(t_half)) / np.pi))


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform grid on [-x_half, x_half] x [-t_half, t_half] covering the ball B_R"""
    R: float
    nx: int
    nt: int
    x_half: float
    t_half: float

    def __post_init__(self):
        if not self.R > 0:
            raise GridError(f"ball radius must be positive, got {self.R}")
        if self.nx < 2 or self.nt < 2:
            raise GridError(f"grid needs nx, nt >= 2, got ({self.nx}, {self.nt})")
        slack = 1e-12 * self.R
        if self.x_half < self.R - slack or self.t_half < self.R - slack:
            raise GridError(
                f"grid half-widths ({self.x_half}, {self.t_half}) do not cover R={self.R}"
            )

    @classmethod
    def for_ball(
        cls,
        R: float,
        nx: Optional[int] = None,
        nt: Optional[int] = None,
        margin: float = 1.0,
        max_nx: int = DEFAULT_MAX_NX,
    ) -> "SpaceTimeGrid":
        """
        Default grid for B_R: at least 8 samples per packet width R^{1/2}.

        Args:
            R: Ball radius
            nx, nt: Explicit sample counts (defaults derived from R)
            margin: Half-widths are margin*R
            max_nx: Cap on the default nx
        """
        if nx is None:
            nx = min(max_nx, next_power_of_two(16.0 * np.sqrt(R) * margin))
            nx = max(nx, 16)
        if nt is None:
            nt = max(nx // 4, 2)
        return cls(R=R, nx=nx, nt=nt, x_half=margin * R, t_half=margin * R)

    @property
    def dx(self) -> float:
        return 2.0 * self.x_half / (self.nx - 1)

    @property
    def dt(self) -> float:
        return 2.0 * self.t_half / (self.nt - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.x_half, self.x_half, self.nx)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(-self.t_half, self.t_half, self.nt)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nx, self.nt

    @property
    def points(self) -> int:
        return self.nx * self.nt

    def required_samples(self) -> int:
        return nyquist_samples(self.x_half, self.t_half)

    def check_nyquist(self, samples: int) -> None:
        required = self.required_samples()
        if samples < required:
            raise NyquistGuardError(samples, required, f"grid |x|<={self.x_half}, |t|<={self.t_half}")

    def covers_ball(self, radius: float) -> bool:
        slack = 1e-12 * max(radius, 1.0)
        return self.x_half >= radius - slack and self.t_half >= radius - slack

    def covers_band(self, radius: float) -> bool:
        return self.t_half >= radius - 1e-12 * max(radius, 1.0)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.t, indexing="ij")

    def index_of(self, x: float, t: float) -> Tuple[int, int]:
        """Nearest grid indices to (x, t)"""
        i = int(round((x + self.x_half) / self.dx))
        j = int(round((t + self.t_half) / self.dt))
        if not (0 <= i < self.nx and 0 <= j < self.nt):
            raise GridError(f"point ({x}, {t}) lies outside the grid")
        return i, j

    def describe(self) -> dict:
        return {
            "R": self.R,
            "nx": self.nx,
            "nt": self.nt,
            "x_range": [-self.x_half, self.x_half],
            "t_range": [-self.t_half, self.t_half],
        }


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Complex samples on a SpaceTimeGrid, shape (nx, nt)"""
    grid: SpaceTimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise GridError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise GridError("field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def scaled(self, factor: complex) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.values * factor)

    def multiply(self, other: "SpaceTimeField") -> "SpaceTimeField":
        if other.grid != self.grid:
            raise GridError("cannot multiply fields on different grids")
        return SpaceTimeField(self.grid, self.values * other.values)

    def value_at(self, x: float, t: float) -> complex:
        i, j = self.grid.index_of(x, t)
        return complex(self.values[i, j])


@dataclass(frozen=True)
class Tube:
    """
    Space-time tube |x - v - theta*t| <= w * R^{1/2}.

    theta lives on the lattice R^{-1/2}Z and v on R^{1/2}Z.
    """
    theta: float
    v: float
    scale: float
    width_multiplier: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise GridError(f"tube scale must be positive, got {self.scale}")
        if self.width_multiplier < 1:
            raise GridError(f"width multiplier must be >= 1, got {self.width_multiplier}")
        if abs(self.theta) > 1 + LATTICE_TOLERANCE:
            raise GridError(f"tube direction {self.theta} outside [-1, 1]")
        root = np.sqrt(self.scale)
        for name, value, step in (("theta", self.theta, 1.0 / root), ("v", self.v, root)):
            k = value / step
            if abs(k - round(k)) > LATTICE_TOLERANCE * max(1.0, abs(k)):
                raise GridError(f"tube {name}={value} is not on the lattice with step {step}")

    @property
    def half_width(self) -> float:
        return self.width_multiplier * np.sqrt(self.scale)

    def core_distance(self, x: ArrayLike, t: ArrayLike) -> ArrayLike:
        return np.abs(np.asarray(x) - self.v - self.theta * np.asarray(t))

    def contains(self, x: ArrayLike, t: ArrayLike) -> ArrayLike:
        return self.core_distance(x, t) <= self.half_width * (1 + 1e-12)

    def enlarged(self, factor: float) -> "Tube":
        return Tube(self.theta, self.v, self.scale, self.width_multiplier * factor)


def tube_contains(tube: Tube, x: float, t: float) -> bool:
    """True iff |x - v - theta*t| <= w*R^{1/2}"""
    return bool(tube.contains(x, t))

