"""
Extension operator Ef(x,t) = int e^{i(w^2 t + w x)} f(w) dw and the smooth
space-time cutoff eta_R.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Tuple
import logging

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from harmonic_core.chirp import chirp_sum
from harmonic_core.errors import GridBudgetError, GridError, NyquistGuardError
from harmonic_core.profiles import FrequencyProfile
from harmonic_core.spacetime import SpaceTimeField, SpaceTimeGrid, nyquist_samples

DEFAULT_MAX_POINTS = 2 ** 26
# complex values held per chirp batch
_BATCH_BUDGET = 2 ** 22

logger = logging.getLogger(__name__)


def evaluate_extension(f: FrequencyProfile, x: float, t: float) -> complex:
    """
    Trapezoid-rule value of Ef at a single point.

    Raises:
        NyquistGuardError: f has too few samples to resolve the phase at (x, t)
    """
    required = nyquist_samples(x, t)
    if f.M < required:
        raise NyquistGuardError(f.M, required, f"point ({x}, {t})")
    omega = f.omega
    phase = np.exp(1j * (omega * omega * t + omega * x))
    return complex(np.sum(f.weighted_samples() * phase))


def evaluate_points(f: FrequencyProfile, xs: Sequence[float], ts: Sequence[float]) -> np.ndarray:
    """Direct quadrature at many points; the oracle for evaluate_field"""
    xs = np.asarray(xs, dtype=float).ravel()
    ts = np.asarray(ts, dtype=float).ravel()
    if xs.shape != ts.shape:
        raise ValueError("xs and ts must have the same length")
    if xs.size == 0:
        return np.zeros(0, dtype=complex)
    required = nyquist_samples(np.max(np.abs(xs)), np.max(np.abs(ts)))
    if f.M < required:
        raise NyquistGuardError(f.M, required, "point set")
    omega = f.omega
    weighted = f.weighted_samples()
    out = np.empty(xs.size, dtype=complex)
    step = max(1, _BATCH_BUDGET // f.M)
    for start in range(0, xs.size, step):
        stop = start + step
        phase = np.exp(
            1j * (np.outer(ts[start:stop], omega * omega) + np.outer(xs[start:stop], omega))
        )
        out[start:stop] = phase @ weighted
    return out


def evaluate_field(
    f: FrequencyProfile,
    grid: SpaceTimeGrid,
    max_points: int = DEFAULT_MAX_POINTS,
    threads: int = 1,
) -> SpaceTimeField:
    """
    Evaluate Ef on every grid point.

    Each t-slice is the exponential sum of e^{i w^2 t} f(w) over the nonzero
    part of the profile, done by chirp-z convolution; slices are batched and
    batches run on a thread pool.

    Args:
        f: Frequency profile
        grid: Target grid (must pass the Nyquist guard for f.M)
        max_points: Cap on nx*nt
        threads: Worker threads

    Returns:
        SpaceTimeField of Ef samples
    """
    if grid.points > max_points:
        raise GridBudgetError(grid.points, max_points)
    grid.check_nyquist(f.M)

    values = np.zeros(grid.shape, dtype=complex)
    lo, hi = f.nonzero_range()
    if hi < lo:
        return SpaceTimeField(grid, values)

    omega = f.omega[lo:hi + 1]
    weighted = f.weighted_samples()[lo:hi + 1]
    t = grid.t
    seg = hi - lo + 1
    batch = int(max(1, min(grid.nt, _BATCH_BUDGET // (seg + grid.nx))))
    starts = list(range(0, grid.nt, batch))

    def run(start: int) -> Tuple[int, np.ndarray]:
        ts = t[start:start + batch]
        coeffs = weighted[None, :] * np.exp(1j * np.outer(ts, omega * omega))
        rows = chirp_sum(coeffs, omega[0], f.spacing, -grid.x_half, grid.dx, grid.nx, sign=1)
        return start, rows

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]
    for start, rows in results:
        values[:, start:start + rows.shape[0]] = rows.T

    logger.debug(
        f"Evaluated field for '{f.label}' on {grid.nx}x{grid.nt} grid "
        f"(segment {seg} samples, {len(starts)} batches)"
    )
    return SpaceTimeField(grid, values)


def _mollifier_weights(radius: float, nodes: int = 64) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on [0, radius] with radial bump weights normalized to mass 1"""
    x, w = leggauss(nodes)
    r = 0.5 * radius * (x + 1.0)
    u = r / radius
    bump = np.exp(-1.0 / (1.0 - u * u))
    mass = 2 * np.pi * r * bump * w * 0.5 * radius
    return r, mass / mass.sum()


def mollified_disk(rho: np.ndarray, radius: float, mollifier: float) -> np.ndarray:
    """
    Radial profile of (indicator of the disk of given radius) * (radial bump).

    A point at distance rho sees the fraction of each mollifier circle that
    falls inside the disk; averaging over circles gives the exact convolution.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    r, mass = _mollifier_weights(mollifier)
    out = np.zeros_like(rho)
    inner = rho <= radius - mollifier
    out[inner] = 1.0
    edge = (~inner) & (rho < radius + mollifier)
    if np.any(edge):
        rh = rho[edge][:, None]
        cos_limit = (rh * rh + r * r - radius * radius) / (2.0 * rh * r)
        fraction = np.arccos(np.clip(cos_limit, -1.0, 1.0)) / np.pi
        out[edge] = fraction @ mass
    return out


def _eta_profile(
    r: np.ndarray, radius: float, mollifier: float, nodes: int = 128
) -> np.ndarray:
    """eta(r) = (1/2pi) int eta_hat(rho) J0(r rho) rho drho for the radial eta_hat"""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    flat = radius - mollifier
    plateau = np.empty_like(r)
    small = r < 1e-12
    plateau[small] = 0.5 * flat * flat
    plateau[~small] = flat * special.j1(r[~small] * flat) / r[~small]

    x, w = leggauss(nodes)
    lo, hi = flat, radius + mollifier
    rho = 0.5 * (hi - lo) * (x + 1.0) + lo
    hat = mollified_disk(rho, radius, mollifier)
    edge = special.j0(np.outer(r, rho)) @ (hat * rho * w * 0.5 * (hi - lo))
    return (plateau + edge) / (2 * np.pi)


@dataclass(frozen=True, eq=False)
class EtaWindow:
    """Samples of eta_R on a grid plus the measured constants c0 and C_4"""
    R: float
    field: SpaceTimeField
    decay_exponent_checked: int
    c0: float
    decay_constant: float
    radius: float = 0.995
    mollifier: float = 0.005

    def eta_hat(self, xi: np.ndarray, tau: np.ndarray) -> np.ndarray:
        """Unscaled eta_hat at frequency (xi, tau)"""
        rho = np.hypot(np.asarray(xi, dtype=float), np.asarray(tau, dtype=float))
        return mollified_disk(rho.ravel(), self.radius, self.mollifier).reshape(rho.shape)

    def evaluate(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        r = np.hypot(np.asarray(x, dtype=float), np.asarray(t, dtype=float)) / self.R
        return _eta_profile(r.ravel(), self.radius, self.mollifier).reshape(r.shape)

    def weight(self, power: float) -> np.ndarray:
        """|eta_R|^power on the window grid"""
        return np.abs(self.field.values) ** power


def make_eta(
    R: float,
    grid: SpaceTimeGrid,
    radius: float = 0.995,
    mollifier: float = 0.005,
    decay_exponent: int = 4,
    table_step: float = 2e-3,
) -> EtaWindow:
    """
    Build eta_R on `grid` from a mollified indicator of B_radius.

    Args:
        R: Scale; eta_R(x,t) = eta(x/R, t/R)
        grid: Must cover B_{2R}
        radius: Indicator radius (plateau is radius - mollifier)
        mollifier: Radial mollifier radius
        decay_exponent: N in the measured bound |eta_R| <= C_N (1+(|x|+|t|)/R)^{-N}

    Returns:
        EtaWindow with recorded c0 and C_N
    """
    if not grid.covers_ball(2 * R):
        raise GridError(f"eta window needs a grid covering B_{2 * R}, got {grid.describe()}")

    reach = np.hypot(grid.x_half, grid.t_half) / R
    r_max = max(12.0, reach + 1.0)
    table_r = np.arange(0.0, r_max + table_step, table_step)
    table = _eta_profile(table_r, radius, mollifier)

    xx, tt = grid.mesh()
    rr = np.hypot(xx, tt) / R
    values = np.interp(rr, table_r, table)
    field = SpaceTimeField(grid, values.astype(complex))

    inside = rr <= 1.0
    c0 = float(np.min(values[inside]))
    if c0 <= 0:
        raise GridError(f"eta construction failed: min over B_R is {c0:.3e}")
    decay = float(np.max(np.abs(table) * (1 + np.sqrt(2.0) * table_r) ** decay_exponent))

    logger.info(f"eta_R for R={R}: eta(0)={table[0]:.5f}, c0={c0:.5f}, C_{decay_exponent}={decay:.3e}")
    return EtaWindow(
        R=R,
        field=field,
        decay_exponent_checked=decay_exponent,
        c0=c0,
        decay_constant=decay,
        radius=radius,
        mollifier=mollifier,
    )
