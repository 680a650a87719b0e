"""
Spatial window gamma whose integer translates sum to one.

gamma_hat is a mollified indicator of [-a, a] with mollifier radius eps,
a + eps <= 1, so gamma_hat(0) = 1 and gamma_hat vanishes at every other
integer multiple of 2*pi in the Poisson sum.
"""
from dataclasses import dataclass, field
from typing import Dict, Tuple
import logging

import numpy as np
from numpy.polynomial.legendre import leggauss

logger = logging.getLogger(__name__)

_BUMP_NODES = 1024
_CDF_NODES = 64


def _bump(y: np.ndarray, eps: float) -> np.ndarray:
    u = np.asarray(y, dtype=float) / eps
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


@dataclass(frozen=True, eq=False)
class GammaWindow:
    """Window with gamma_hat supported in [-(plateau+mollifier), plateau+mollifier]"""
    plateau: float = 0.9
    mollifier: float = 0.1
    _tables: Dict[Tuple[int, int], np.ndarray] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self):
        if not (0 < self.mollifier and 0 < self.plateau):
            raise ValueError("gamma window needs positive plateau and mollifier radius")
        if self.plateau + self.mollifier > 1 + 1e-12:
            raise ValueError(
                f"gamma_hat support {self.plateau + self.mollifier} exceeds 1; "
                "the translates would no longer sum to one"
            )
        x, w = leggauss(_BUMP_NODES)
        y = self.mollifier * x
        weights = _bump(y, self.mollifier) * w * self.mollifier
        object.__setattr__(self, "_nodes", y)
        object.__setattr__(self, "_weights", weights / weights.sum())

    @property
    def support_radius(self) -> float:
        return self.plateau + self.mollifier

    def _mollifier_cdf(self, z: np.ndarray) -> np.ndarray:
        eps = self.mollifier
        z = np.clip(np.asarray(z, dtype=float), -eps, eps)
        x, w = leggauss(_CDF_NODES)
        half = 0.5 * (z + eps)
        nodes = half[..., None] * (x + 1.0) - eps
        mass = np.sum(_bump(nodes, eps) * w, axis=-1) * half
        total = np.sum(_bump(eps * x, eps) * w) * eps
        return mass / total

    def hat(self, xi: np.ndarray) -> np.ndarray:
        """gamma_hat(xi) = CDF(xi + a) - CDF(xi - a)"""
        xi = np.asarray(xi, dtype=float)
        return self._mollifier_cdf(xi + self.plateau) - self._mollifier_cdf(xi - self.plateau)

    def mollifier_transform(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.cos(np.multiply.outer(u, self._nodes)) @ self._weights

    def value(self, u: np.ndarray) -> np.ndarray:
        """gamma(u) = (1/2pi) int gamma_hat(xi) e^{i u xi} dxi"""
        u = np.asarray(u, dtype=float)
        a = self.plateau
        safe = np.where(np.abs(u) < 1e-12, 1.0, u)
        sinc = np.where(np.abs(u) < 1e-12, a, np.sin(a * safe) / safe)
        return sinc * self.mollifier_transform(u) / np.pi

    def table(self, per_unit: int, half_width: int) -> np.ndarray:
        """gamma(m / per_unit) for |m| <= half_width * per_unit, cached"""
        key = (per_unit, half_width)
        if key not in self._tables:
            m = np.arange(-half_width * per_unit, half_width * per_unit + 1)
            self._tables[key] = self.value(m / per_unit)
            logger.debug(f"Tabulated gamma on {m.size} offsets ({per_unit} per unit)")
        return self._tables[key]

    def poisson_sum(self, x: float, terms: int) -> float:
        """sum_{|k|<=terms} gamma(x - k); tends to one as terms grows"""
        k = np.arange(-terms, terms + 1)
        return float(np.sum(self.value(x - k)))


def make_gamma(plateau: float = 0.9, mollifier: float = 0.1) -> GammaWindow:
    return GammaWindow(plateau=plateau, mollifier=mollifier)
