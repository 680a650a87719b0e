"""
Sampled frequency profiles f on [-1, 1].
All downstream transforms work on the uniform grid stored here.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple
import logging

import numpy as np

from harmonic_core.errors import ProfileError

OMEGA_MIN = -1.0
OMEGA_MAX = 1.0
MIN_SAMPLES = 16

logger = logging.getLogger(__name__)


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n: float) -> int:
    """Smallest power of two that is >= n (at least 1)"""
    n = int(np.ceil(n))
    if n <= 1:
        return 1
    return 1 << (n - 1).bit_length()


def frequency_grid(samples: int) -> np.ndarray:
    return np.linspace(OMEGA_MIN, OMEGA_MAX, samples)


def trapezoid_weights(samples: int) -> np.ndarray:
    weights = np.ones(samples)
    weights[0] = weights[-1] = 0.5
    return weights


@dataclass(frozen=True, eq=False)
class FrequencyProfile:
    """
    Uniformly sampled complex function on [-1, 1].

    Samples are stored read-only; `support` (when given) is the interval
    outside of which every sample is exactly zero.
    """
    samples: np.ndarray
    label: str = ""
    support: Optional[Tuple[float, float]] = None
    omega_min: float = field(default=OMEGA_MIN, init=False)
    omega_max: float = field(default=OMEGA_MAX, init=False)

    def __post_init__(self):
        values = np.array(self.samples, dtype=complex).ravel()
        if not is_power_of_two(values.size) or values.size < MIN_SAMPLES:
            raise ProfileError(
                f"profile length must be a power of two >= {MIN_SAMPLES}, got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise ProfileError("profile contains non-finite samples")
        if self.support is not None:
            lo, hi = self.support
            if lo > hi:
                raise ProfileError(f"support interval [{lo}, {hi}] is reversed")
            omega = frequency_grid(values.size)
            spacing = (OMEGA_MAX - OMEGA_MIN) / (values.size - 1)
            outside = (omega < lo - 1e-9 * spacing) | (omega > hi + 1e-9 * spacing)
            if np.any(values[outside] != 0):
                raise ProfileError(
                    f"profile '{self.label}' has nonzero samples outside its support [{lo}, {hi}]"
                )
        values.setflags(write=False)
        object.__setattr__(self, "samples", values)

    @property
    def M(self) -> int:
        return self.samples.size

    @property
    def spacing(self) -> float:
        return (self.omega_max - self.omega_min) / (self.M - 1)

    @property
    def omega(self) -> np.ndarray:
        return frequency_grid(self.M)

    @property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.M)

    def weighted_samples(self) -> np.ndarray:
        """Samples times trapezoid weights times the grid spacing"""
        return self.samples * self.weights * self.spacing

    def l2_norm(self) -> float:
        return float(np.sqrt(self.spacing * np.sum(self.weights * np.abs(self.samples) ** 2)))

    def l1_norm(self) -> float:
        return float(self.spacing * np.sum(self.weights * np.abs(self.samples)))

    def is_zero(self) -> bool:
        return not np.any(self.samples)

    def nonzero_range(self) -> Tuple[int, int]:
        """Inclusive index range covering every nonzero sample"""
        idx = np.flatnonzero(self.samples)
        if idx.size == 0:
            return 0, -1
        return int(idx[0]), int(idx[-1])

    def value_at(self, omega: float) -> complex:
        """Linear interpolation of the samples at a frequency in [-1, 1]"""
        if omega < self.omega_min or omega > self.omega_max:
            return 0j
        pos = (omega - self.omega_min) / self.spacing
        i = min(int(np.floor(pos)), self.M - 2)
        frac = pos - i
        return complex((1 - frac) * self.samples[i] + frac * self.samples[i + 1])

    def scaled(self, factor: complex, label: Optional[str] = None) -> "FrequencyProfile":
        return FrequencyProfile(
            self.samples * factor, label=label or self.label, support=self.support
        )

    def combine(self, a: complex, other: "FrequencyProfile", b: complex) -> "FrequencyProfile":
        """Linear combination a*self + b*other on a shared grid"""
        if other.M != self.M:
            raise ProfileError(f"cannot combine profiles with M={self.M} and M={other.M}")
        return FrequencyProfile(a * self.samples + b * other.samples, label="combination")


def make_profile(
    values: Sequence[complex],
    label: str = "",
    support: Optional[Tuple[float, float]] = None,
) -> FrequencyProfile:
    """
    Build a profile from samples on the uniform grid of [-1, 1].

    Args:
        values: Complex samples, power-of-two length >= 16
        label: Free-form name carried into reports
        support: Optional declared support interval

    Returns:
        Validated FrequencyProfile
    """
    profile = FrequencyProfile(np.asarray(values), label=label, support=support)
    logger.debug(f"Built profile '{label}' with M={profile.M}, |f|_2={profile.l2_norm():.4e}")
    return profile


def zero_profile(samples: int = 1024, label: str = "zero") -> FrequencyProfile:
    return FrequencyProfile(np.zeros(samples, dtype=complex), label=label)
