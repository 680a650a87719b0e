"""
Bivariate polynomials in (x, t) with dense coefficient arrays.

Coefficients act on normalized coordinates u = (x - cx)/scale,
w = (t - ct)/scale so point clouds of any size stay well conditioned.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import convolve2d

logger = logging.getLogger(__name__)


def monomial_exponents(degree: int) -> List[Tuple[int, int]]:
    """(i, j) with i + j <= degree, ordered by total degree"""
    return [(i, total - i) for total in range(degree + 1) for i in range(total, -1, -1)]


def monomial_count(degree: int) -> int:
    return (degree + 1) * (degree + 2) // 2


@dataclass(frozen=True, eq=False)
class BivariatePolynomial:
    """
    P(x, t) = sum_{i+j<=d} C[i, j] u^i w^j.

    Args:
        degree: Total degree d
        coefficients: (d+1, d+1) array, zero where i + j > d
        center: Normalization centre (cx, ct)
        scale: Normalization length
    """
    degree: int
    coefficients: np.ndarray
    center: Tuple[float, float] = (0.0, 0.0)
    scale: float = 1.0

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"degree must be nonnegative, got {self.degree}")
        if self.scale <= 0:
            raise ValueError(f"normalization scale must be positive, got {self.scale}")
        c = np.array(self.coefficients, dtype=float)
        if c.shape != (self.degree + 1, self.degree + 1):
            raise ValueError(f"coefficient array {c.shape} does not match degree {self.degree}")
        i, j = np.indices(c.shape)
        if np.any(c[i + j > self.degree]):
            raise ValueError("coefficients above the total degree must vanish")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @classmethod
    def from_vector(
        cls,
        degree: int,
        vector: Sequence[float],
        center: Tuple[float, float] = (0.0, 0.0),
        scale: float = 1.0,
    ) -> "BivariatePolynomial":
        """Build from coefficients listed in monomial_exponents order"""
        exponents = monomial_exponents(degree)
        if len(vector) != len(exponents):
            raise ValueError(f"degree {degree} needs {len(exponents)} coefficients, got {len(vector)}")
        c = np.zeros((degree + 1, degree + 1))
        for (i, j), value in zip(exponents, vector):
            c[i, j] = value
        return cls(degree, c, center, scale)

    @classmethod
    def line(cls, a: float, b: float, c: float) -> "BivariatePolynomial":
        """a x + b t + c"""
        return cls.from_vector(1, [c, a, b])

    @classmethod
    def circle(cls, cx: float, ct: float, radius: float) -> "BivariatePolynomial":
        """(x - cx)^2 + (t - ct)^2 - radius^2"""
        return cls.from_vector(2, [-radius ** 2, 0.0, 0.0, 1.0, 0.0, 1.0], (cx, ct), 1.0)

    def to_vector(self) -> np.ndarray:
        return np.array([self.coefficients[i, j] for i, j in monomial_exponents(self.degree)])

    @property
    def coefficient_scale(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    def _normalize(self, x, t):
        u = (np.asarray(x, dtype=float) - self.center[0]) / self.scale
        w = (np.asarray(t, dtype=float) - self.center[1]) / self.scale
        return u, w

    def __call__(self, x, t) -> np.ndarray:
        u, w = self._normalize(x, t)
        return npoly.polyval2d(u, w, self.coefficients)

    def gradient(self, x, t) -> Tuple[np.ndarray, np.ndarray]:
        """(dP/dx, dP/dt) in original coordinates"""
        u, w = self._normalize(x, t)
        if self.degree == 0:
            zero = np.zeros(np.broadcast(u, w).shape)
            return zero, zero
        du = npoly.polyder(self.coefficients, axis=0)
        dw = npoly.polyder(self.coefficients, axis=1)
        return (
            npoly.polyval2d(u, w, du) / self.scale,
            npoly.polyval2d(u, w, dw) / self.scale,
        )

    def shifted(self, constant: float) -> "BivariatePolynomial":
        c = self.coefficients.copy()
        c[0, 0] += constant
        return BivariatePolynomial(self.degree, c, self.center, self.scale)

    def _same_frame(self, other: "BivariatePolynomial") -> None:
        if self.center != other.center or self.scale != other.scale:
            raise ValueError("polynomials use different normalizations")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            return self.shifted(float(other))
        self._same_frame(other)
        degree = max(self.degree, other.degree)
        c = np.zeros((degree + 1, degree + 1))
        c[: self.degree + 1, : self.degree + 1] += self.coefficients
        c[: other.degree + 1, : other.degree + 1] += other.coefficients
        return BivariatePolynomial(degree, c, self.center, self.scale)

    def __neg__(self):
        return BivariatePolynomial(self.degree, -self.coefficients, self.center, self.scale)

    def __sub__(self, other):
        return self + (-other if not isinstance(other, (int, float)) else -float(other))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return BivariatePolynomial(self.degree, self.coefficients * other, self.center, self.scale)
        self._same_frame(other)
        return BivariatePolynomial(
            self.degree + other.degree,
            convolve2d(self.coefficients, other.coefficients),
            self.center,
            self.scale,
        )

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coefficients": self.to_vector().tolist(),
            "center": list(self.center),
            "scale": self.scale,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "BivariatePolynomial":
        return cls.from_vector(
            int(document["degree"]),
            document["coefficients"],
            tuple(document.get("center", (0.0, 0.0))),
            float(document.get("scale", 1.0)),
        )


def product(polys: Sequence[BivariatePolynomial]) -> BivariatePolynomial:
    """Partition polynomial: the product of the bisectors"""
    if not polys:
        raise ValueError("product of an empty polynomial list")
    result = polys[0]
    for p in polys[1:]:
        result = result * p
    return result


def random_polynomial(
    degree: int,
    rng: np.random.Generator,
    scale: float = 1.0,
    through: Optional[Tuple[float, float]] = None,
) -> BivariatePolynomial:
    """Gaussian coefficients; shifted to vanish at `through` when given"""
    vector = rng.standard_normal(monomial_count(degree))
    poly = BivariatePolynomial.from_vector(degree, vector, (0.0, 0.0), scale)
    if through is not None:
        poly = poly.shifted(-float(poly(*through)))
    return poly
