"""
L^p norms of sampled fields over B_R and L^2 norms of profiles.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from harmonic_core.errors import GridError
from harmonic_core.extension import DEFAULT_MAX_POINTS, evaluate_field
from harmonic_core.profiles import FrequencyProfile
from harmonic_core.spacetime import SpaceTimeField, SpaceTimeGrid

logger = logging.getLogger(__name__)


def _check_exponent(p: float) -> None:
    if not np.isfinite(p) or p < 1:
        raise ValueError(f"L^p exponent must lie in [1, inf), got {p}")


def _disk_mask(grid: SpaceTimeGrid, R: float, exclude_radius: float = 0.0) -> np.ndarray:
    xx, tt = grid.mesh()
    rr2 = xx * xx + tt * tt
    mask = rr2 <= R * R
    if exclude_radius > 0:
        mask &= rr2 > exclude_radius * exclude_radius
    return mask


def lp_power_ball(
    field: SpaceTimeField, p: float, R: float, exclude_radius: float = 0.0
) -> float:
    """Sum of |value|^p * dx*dt over grid points with exclude_radius < |q| <= R"""
    _check_exponent(p)
    grid = field.grid
    if not grid.covers_ball(R):
        raise GridError(f"grid {grid.describe()} does not cover B_{R}")
    mask = _disk_mask(grid, R, exclude_radius)
    return float(np.sum(np.abs(field.values[mask]) ** p) * grid.dx * grid.dt)


def lp_norm_ball(
    field: SpaceTimeField, p: float, R: float, exclude_radius: float = 0.0
) -> float:
    """
    Cell-centre L^p norm over the disk of radius R.

    Args:
        field: Sampled field
        p: Exponent, p >= 1
        R: Disk radius (the grid must cover it)
        exclude_radius: Optional inner radius left out (annulus integration)
    """
    return lp_power_ball(field, p, R, exclude_radius) ** (1.0 / p)


def weighted_l2_band(
    field: SpaceTimeField, R: float, weight: Optional[np.ndarray] = None
) -> float:
    """L^2 norm over the full x-range and |t| <= R, optionally weighted"""
    grid = field.grid
    if not grid.covers_band(R):
        raise GridError(f"grid t-range {grid.t_half} does not cover the band |t| <= {R}")
    band = np.abs(grid.t) <= R * (1 + 1e-12)
    density = np.abs(field.values[:, band]) ** 2
    if weight is not None:
        density = density * np.asarray(weight)[:, band]
    return float(np.sqrt(np.sum(density) * grid.dx * grid.dt))


def l2_norm_profile(f: FrequencyProfile) -> float:
    return f.l2_norm()


@dataclass
class BallNormResult:
    """Norms of Ef over B_R gathered shell by shell"""
    R: float
    norms: Dict[float, float]
    sup: float
    shells: List[Tuple[float, float]] = field(default_factory=list)


class BallNormIntegrator:
    """
    Integrates |Ef|^p over B_R on dyadic shells.

    The inner disk B_{r0} gets a fine grid; each annulus between r0*2^{k-1}
    and r0*2^k gets its own grid with the same sample count, so the
    spacing grows with the radius.
    """

    def __init__(
        self,
        points_per_axis: int = 256,
        inner_radius: float = 16.0,
        max_points: int = DEFAULT_MAX_POINTS,
        threads: int = 1,
    ):
        self.points_per_axis = points_per_axis
        self.inner_radius = inner_radius
        self.max_points = max_points
        self.threads = threads
        self.logger = logging.getLogger(__name__)

    def shells(self, R: float) -> List[Tuple[float, float]]:
        outer = min(self.inner_radius, R)
        layout = [(0.0, outer)]
        while outer < R:
            inner, outer = outer, min(2.0 * outer, R)
            layout.append((inner, outer))
        return layout

    def shell_grid(self, outer: float) -> SpaceTimeGrid:
        n = self.points_per_axis
        return SpaceTimeGrid(R=outer, nx=n, nt=n, x_half=outer, t_half=outer)

    def integrate(self, f: FrequencyProfile, R: float, ps: Sequence[float]) -> BallNormResult:
        """
        Compute ||Ef||_{L^p(B_R)} for every p in ps and max |Ef| on the sampled points.
        """
        for p in ps:
            _check_exponent(p)
        powers = {float(p): 0.0 for p in ps}
        sup = 0.0
        layout = self.shells(R)
        for inner, outer in layout:
            grid = self.shell_grid(outer)
            field = evaluate_field(f, grid, max_points=self.max_points, threads=self.threads)
            mask = _disk_mask(grid, outer, inner)
            magnitude = np.abs(field.values[mask])
            if magnitude.size:
                sup = max(sup, float(magnitude.max()))
            cell = grid.dx * grid.dt
            for p in powers:
                powers[p] += float(np.sum(magnitude ** p) * cell)
            self.logger.debug(f"Shell ({inner:.1f}, {outer:.1f}] of R={R}: {magnitude.size} points")
        norms = {p: value ** (1.0 / p) for p, value in powers.items()}
        self.logger.info(
            f"Ball norms of '{f.label}' at R={R} over {len(layout)} shells: "
            + ", ".join(f"p={p:g}: {v:.4e}" for p, v in norms.items())
        )
        return BallNormResult(R=R, norms=norms, sup=sup, shells=layout)
