"""
Monte Carlo area of the rho-neighbourhood of a zero set inside B_R.

Distance to Z(P) is measured by projecting each sample onto the curve with
Newton steps q <- q - P(q) grad P(q) / |grad P(q)|^2.
"""
from dataclasses import dataclass
from typing import Optional, Sequence
import logging

import numpy as np

from harmonic_core.errors import PartitionError
from partitioning.polynomials import BivariatePolynomial

MIN_SAMPLES = 10_000
NEWTON_STEPS = 40
MAX_REDRAWS = 10

logger = logging.getLogger(__name__)


@dataclass
class AreaEstimate:
    rho: float
    R: float
    area: float
    stderr: float
    samples: int
    redraws: int = 0
    stalled: int = 0

    def within(self, expected: float, sigmas: float = 3.0) -> bool:
        return abs(self.area - expected) <= sigmas * self.stderr


def _sample_disk(rng: np.random.Generator, R: float, n: int) -> np.ndarray:
    radius = R * np.sqrt(rng.random(n))
    angle = 2 * np.pi * rng.random(n)
    return np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)


def _gradient_ok(poly: BivariatePolynomial, q: np.ndarray) -> np.ndarray:
    gx, gt = poly.gradient(q[:, 0], q[:, 1])
    scale = max(poly.coefficient_scale / poly.scale, 1e-300)
    return np.hypot(gx, gt) > 1e-12 * scale


def distance_to_zero_set(
    poly: BivariatePolynomial, q: np.ndarray, steps: int = NEWTON_STEPS
) -> np.ndarray:
    """
    Distance from each row of q to the Newton foot point on Z(poly).

    Samples whose iteration stalls at a critical point get distance inf.
    """
    start = np.asarray(q, dtype=float)
    current = start.copy()
    active = np.ones(len(current), dtype=bool)
    for _ in range(steps):
        if not np.any(active):
            break
        x, t = current[active, 0], current[active, 1]
        value = poly(x, t)
        gx, gt = poly.gradient(x, t)
        norm2 = gx * gx + gt * gt
        moving = norm2 > 0
        step = np.where(moving, value / np.where(moving, norm2, 1.0), 0.0)
        current[active, 0] = x - step * gx
        current[active, 1] = t - step * gt
        converged = np.abs(step) * np.sqrt(norm2) <= 1e-12 * poly.scale
        idx = np.flatnonzero(active)
        active[idx[converged | ~moving]] = False
    x, t = current[:, 0], current[:, 1]
    gx, gt = poly.gradient(x, t)
    residual = np.abs(poly(x, t)) / np.maximum(np.hypot(gx, gt), 1e-300)
    distance = np.hypot(current[:, 0] - start[:, 0], current[:, 1] - start[:, 1])
    return np.where(residual <= 1e-8 * poly.scale, distance, np.inf)


def neighborhood_areas(
    poly: BivariatePolynomial,
    rhos: Sequence[float],
    R: float,
    n_samples: int = 200_000,
    seed: Optional[int] = None,
) -> list:
    """Area estimates for several rho from one shared sample"""
    rhos = [float(r) for r in rhos]
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n_samples}")
    if R <= 0 or any(r <= 0 or r > R for r in rhos):
        raise ValueError(f"need 0 < rho <= R, got rho={rhos}, R={R}")
    rng = np.random.default_rng(seed)
    q = _sample_disk(rng, R, n_samples)
    redraws = 0
    bad = ~_gradient_ok(poly, q)
    while np.any(bad):
        if redraws >= MAX_REDRAWS:
            raise PartitionError(f"gradient vanishes at {int(bad.sum())} samples after {redraws} redraws")
        q[bad] = _sample_disk(rng, R, int(bad.sum()))
        redraws += 1
        bad = ~_gradient_ok(poly, q)
    if redraws:
        logger.warning(f"Redrew samples {redraws} times at vanishing gradients")

    distance = distance_to_zero_set(poly, q)
    stalled = int(np.count_nonzero(~np.isfinite(distance)))
    if stalled:
        logger.warning(
            f"Newton projection stalled at {stalled} of {n_samples} samples; "
            f"they count as outside every neighbourhood"
        )
    disk_area = np.pi * R * R
    estimates = []
    for rho in rhos:
        hit = distance <= rho
        fraction = hit.mean()
        stderr = disk_area * np.sqrt(fraction * (1 - fraction) / n_samples)
        estimates.append(AreaEstimate(rho, R, disk_area * fraction, float(stderr), n_samples, redraws, stalled))
    return estimates


def neighborhood_area(
    poly: BivariatePolynomial,
    rho: float,
    R: float,
    n_samples: int = 200_000,
    seed: Optional[int] = None,
) -> AreaEstimate:
    """
    Area of {q in B_R : dist(q, Z(poly)) <= rho}.

    Args:
        poly: Polynomial whose zero set is measured
        rho: Neighbourhood radius, rho <= R
        R: Disk radius
        n_samples: Monte Carlo samples, at least 1e4
        seed: Sampling seed

    Returns:
        AreaEstimate with the standard error of the hit fraction
    """
    return neighborhood_areas(poly, [rho], R, n_samples, seed)[0]


def wongkew_ratio(estimate: AreaEstimate, degree: int) -> float:
    """area / (D rho R); bounded by an absolute constant"""
    return estimate.area / (degree * estimate.rho * estimate.R)
