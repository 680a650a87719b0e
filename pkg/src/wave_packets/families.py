"""
Example frequency profiles: the unit bump f0, the single-packet bump f1,
the many-packet bump, the bundle of narrow bumps and the star.

Every ramp is cos^2(pi/2 * nu(u)) with the Meyer polynomial nu, which is C^3
and satisfies nu(u) + nu(1-u) = 1, so mirrored ramps sum to exactly one.
"""
from dataclasses import dataclass
from typing import Callable, Dict, Optional
import logging

import numpy as np

from harmonic_core.errors import ProfileError
from harmonic_core.profiles import FrequencyProfile, frequency_grid, make_profile, next_power_of_two
from harmonic_core.spacetime import nyquist_samples

F0_SAMPLES = 2 ** 14
MIN_SAMPLES = 1024
# ramp widths resolved with this many samples per radian of 1/width
RAMP_RESOLUTION = 48.0

logger = logging.getLogger(__name__)


def meyer_step(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return u ** 4 * (35 - 84 * u + 70 * u ** 2 - 20 * u ** 3)


def ramp_down(u: np.ndarray) -> np.ndarray:
    """1 for u <= 0, 0 for u >= 1, smooth complementary ramp in between"""
    u = np.asarray(u, dtype=float)
    out = np.cos(0.5 * np.pi * meyer_step(u)) ** 2
    out = np.where(u <= 0, 1.0, out)
    return np.where(u >= 1, 0.0, out)


@dataclass(frozen=True)
class BumpSpec:
    """Plateau bump centred at `center`; reflection marks the star's complementary bump"""
    center: float
    plateau_halfwidth: float
    support_halfwidth: float
    reflection: bool = False

    def __post_init__(self):
        if not 0 < self.plateau_halfwidth < self.support_halfwidth:
            raise ProfileError(
                f"bump needs 0 < plateau ({self.plateau_halfwidth}) < support ({self.support_halfwidth})"
            )
        lo, hi = self.support
        if lo < -1 - 1e-12 or hi > 1 + 1e-12:
            raise ProfileError(f"bump support [{lo}, {hi}] leaves [-1, 1]")

    @property
    def support(self):
        return self.center - self.support_halfwidth, self.center + self.support_halfwidth

    @property
    def ramp_width(self) -> float:
        return self.support_halfwidth - self.plateau_halfwidth

    @property
    def period(self) -> float:
        """Translation step under which reflected bumps sum to one"""
        return self.plateau_halfwidth + self.support_halfwidth

    def evaluate(self, omega: np.ndarray) -> np.ndarray:
        distance = np.abs(np.asarray(omega, dtype=float) - self.center)
        return ramp_down((distance - self.plateau_halfwidth) / self.ramp_width)


def sample_count(ramp_width: float, R: Optional[float] = None, minimum: int = MIN_SAMPLES) -> int:
    """Power-of-two M resolving the ramp and the Nyquist bound of B_R"""
    needed = max(minimum, RAMP_RESOLUTION / ramp_width)
    if R is not None:
        needed = max(needed, nyquist_samples(R, R))
    return next_power_of_two(needed)


def _sum_of_bumps(omega: np.ndarray, bumps) -> np.ndarray:
    values = np.zeros_like(omega)
    spacing = omega[1] - omega[0]
    for bump in bumps:
        lo, hi = bump.support
        i0 = max(0, int(np.floor((lo + 1) / spacing)))
        i1 = min(omega.size, int(np.ceil((hi + 1) / spacing)) + 1)
        values[i0:i1] += bump.evaluate(omega[i0:i1])
    return values


def make_f0(M: int = F0_SAMPLES) -> FrequencyProfile:
    """Unit-scale bump: 1 on [-1/2, 1/2], supported in [-1, 1]"""
    bump = BumpSpec(0.0, 0.5, 1.0)
    omega = frequency_grid(M)
    return make_profile(bump.evaluate(omega), label="f0", support=bump.support)


def make_f1(R: float, M: Optional[int] = None) -> FrequencyProfile:
    """1 on [-R^{-1/2}, R^{-1/2}], supported in [-2R^{-1/2}, 2R^{-1/2}]"""
    h = R ** -0.5
    bump = BumpSpec(0.0, h, 2 * h)
    M = M or sample_count(bump.ramp_width, R)
    return make_profile(bump.evaluate(frequency_grid(M)), label=f"f1(R={R:g})", support=bump.support)


def make_many(U: float, R: Optional[float] = None, M: Optional[int] = None) -> FrequencyProfile:
    """1 for |w| < U/2, supported in [-U, U]"""
    if not 0 < U <= 1:
        raise ProfileError(f"many-packet width U must lie in (0, 1], got {U}")
    if R is not None and U >= R ** -0.5:
        logger.warning(f"many-packet width U={U} is not below R^(-1/2) for R={R}")
    bump = BumpSpec(0.0, U / 2, U)
    M = M or sample_count(bump.ramp_width, R)
    return make_profile(bump.evaluate(frequency_grid(M)), label=f"many(U={U:.4g})", support=bump.support)


def make_bundle(R: float, N: int, M: Optional[int] = None) -> FrequencyProfile:
    """
    Sum of 2N+1 bumps Theta(w - n R^{-1/2}), each 1 on a plateau of width
    R^{-1/2}/N and supported on twice that.
    """
    h = R ** -0.5
    if int(N) != N or N < 1:
        raise ProfileError(f"bundle needs an integer N >= 1, got {N}")
    N = int(N)
    if N * h + h / N > 1 + 1e-12:
        raise ProfileError(f"bundle with N={N} does not fit in [-1, 1] at R={R}")
    bumps = [BumpSpec(n * h, h / (2 * N), h / N) for n in range(-N, N + 1)]
    M = M or sample_count(bumps[0].ramp_width, R)
    values = _sum_of_bumps(frequency_grid(M), bumps)
    edge = N * h + h / N
    return make_profile(values, label=f"bundle(R={R:g},N={N})", support=(-edge, edge))


def make_star(R: float, N: int, M: Optional[int] = None) -> FrequencyProfile:
    """
    Sum of 2N+1 reflected bumps Phi(w - n R^{-1/2}); the overlaps telescope so
    the profile is exactly 1 on |w| <= (N + 1/4) R^{-1/2}.
    """
    h = R ** -0.5
    if int(N) != N or N < 1:
        raise ProfileError(f"star needs an integer N >= 1, got {N}")
    N = int(N)
    if N * h + 0.75 * h > 1 + 1e-12:
        raise ProfileError(f"star with N={N} does not fit in [-1, 1] at R={R}")
    bumps = [BumpSpec(n * h, 0.25 * h, 0.75 * h, reflection=True) for n in range(-N, N + 1)]
    M = M or sample_count(bumps[0].ramp_width, R)
    values = _sum_of_bumps(frequency_grid(M), bumps)
    edge = N * h + 0.75 * h
    return make_profile(values, label=f"star(R={R:g},N={N})", support=(-edge, edge))


def star_plateau(R: float, N: int) -> float:
    """Half-width of the interval on which the star profile equals one"""
    return (N + 0.25) * R ** -0.5


def largest_admissible_n(R: float) -> int:
    """The N used for the N = R^{1/2} rule: the largest bump count fitting in [-1, 1]"""
    return max(1, int(np.floor(np.sqrt(R) + 1e-9)) - 1)


def build_family(
    family: str,
    R: float,
    N: Optional[int] = None,
    U: Optional[float] = None,
    M: Optional[int] = None,
) -> FrequencyProfile:
    """Construct a named family member for scale R"""
    family = family.lower()
    if family == "f0":
        return make_f0(M or max(F0_SAMPLES, next_power_of_two(nyquist_samples(R, R))))
    if family == "f1":
        return make_f1(R, M)
    if family == "many":
        return make_many(U if U is not None else 0.5 * R ** -0.5, R=R, M=M)
    if family in ("bundle", "star"):
        builder: Callable[..., FrequencyProfile] = make_bundle if family == "bundle" else make_star
        return builder(R, N if N is not None else largest_admissible_n(R), M)
    raise ProfileError(f"unknown family '{family}' (expected one of {sorted(FAMILIES)})")


FAMILIES: Dict[str, str] = {
    "f0": "unit bump, S ~ R^{-1/4}",
    "f1": "single packet at scale R, S ~ 1",
    "many": "bump of width U < R^{-1/2}",
    "bundle": "2N+1 narrow bumps spaced R^{-1/2}, S ~ 1/N",
    "star": "2N+1 overlapping bumps summing to one, S ~ N^{-1/2}",
}
