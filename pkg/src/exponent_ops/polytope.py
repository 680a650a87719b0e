"""
Exponent polytope for ||Ef||_{L^p(B_R)} <= C R^{alpha+eps} S^{beta-eps} ||f||_2.

Every constraint is linear in (p, p*alpha, p*beta), which makes both
constraint systems convex in those coordinates. Rational inputs are
checked with exact Fraction arithmetic, floats with a 1e-12 slack.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Dict, List, Optional, Tuple, Union
import logging

import numpy as np

from harmonic_core.errors import ExponentError

Number = Union[int, float, Fraction]

FLOAT_SLACK = 1e-12
P_RANGE = (2, 6)

logger = logging.getLogger(__name__)


class Verdict(Enum):
    """Status of a point with respect to the two constraint systems"""
    PROVED = "proved"
    OPEN = "open"
    IMPOSSIBLE = "impossible"


def parse_exponent(text: Union[str, Number]) -> Number:
    """'14/3' -> Fraction(14, 3); '0.25' -> 0.25; numbers pass through"""
    if not isinstance(text, str):
        return text
    text = text.strip()
    try:
        if "/" in text or text.lstrip("-").isdigit():
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ExponentError(f"cannot parse exponent '{text}': {e}")


def _is_exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


@dataclass(frozen=True)
class ExponentPoint:
    p: Number
    alpha: Number
    beta: Number

    def __post_init__(self):
        for name in ("p", "alpha", "beta"):
            value = getattr(self, name)
            if not isinstance(value, Rational) and not np.isfinite(float(value)):
                raise ExponentError(f"{name}={value} is not finite")
        if not P_RANGE[0] <= self.p <= P_RANGE[1]:
            raise ExponentError(f"p={self.p} outside [{P_RANGE[0]}, {P_RANGE[1]}]")
        if self.alpha < 0 or self.beta < 0:
            raise ExponentError(f"alpha={self.alpha}, beta={self.beta} must be nonnegative")

    @property
    def exact(self) -> bool:
        return _is_exact(self.p, self.alpha, self.beta)

    def weighted(self) -> Tuple[Number, Number, Number]:
        """(p, p*alpha, p*beta): the coordinates in which Holder interpolation is affine"""
        return self.p, self.p * self.alpha, self.p * self.beta

    def as_floats(self) -> Tuple[float, float, float]:
        return float(self.p), float(self.alpha), float(self.beta)

    def to_dict(self) -> Dict[str, float]:
        p, a, b = self.as_floats()
        return {"p": p, "alpha": a, "beta": b}

    def __str__(self) -> str:
        return f"(p={self.p}, alpha={self.alpha}, beta={self.beta})"


@dataclass(frozen=True)
class Constraint:
    """coef_p * p + coef_a * (p alpha) + coef_b * (p beta) >= rhs"""
    name: str
    text: str
    coef_p: int
    coef_a: int
    coef_b: int
    rhs: int

    def slack(self, point: ExponentPoint) -> Number:
        p, a, b = point.weighted()
        return self.coef_p * p + self.coef_a * a + self.coef_b * b - self.rhs

    def holds(self, point: ExponentPoint) -> bool:
        value = self.slack(point)
        if point.exact:
            return value >= 0
        return float(value) >= -FLOAT_SLACK * max(1.0, abs(self.rhs))

    def is_tight(self, point: ExponentPoint) -> bool:
        value = self.slack(point)
        if point.exact:
            return value == 0
        return abs(float(value)) <= FLOAT_SLACK * max(1.0, abs(self.rhs))

    def slack_array(self, p: np.ndarray, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
        return self.coef_p * p + self.coef_a * p * alpha + self.coef_b * p * beta - self.rhs


CONSTRAINTS: Dict[str, Constraint] = {
    "c1": Constraint("c1", "beta <= 1", 1, 0, -1, 0),
    "c2": Constraint("c2", "4 p alpha + p >= 6", 1, 4, 0, 6),
    "c3": Constraint("c3", "2 p alpha - p beta + p >= 4", 1, 2, -1, 4),
    "c4": Constraint("c4", "4 alpha - beta >= 0", 0, 4, -1, 0),
    "c5": Constraint("c5", "12 p alpha - 4 p beta + 3 p >= 14", 3, 12, -4, 14),
}
SUFFICIENT = ("c1", "c2", "c3", "c4", "c5")
NECESSARY = ("c1", "c2", "c3", "c4")

_VERTICES: Dict[str, Tuple[Fraction, Fraction, Fraction]] = {
    "X": (Fraction(2), Fraction(1, 2), Fraction(0)),
    "U": (Fraction(4), Fraction(1, 8), Fraction(1, 4)),
    "V": (Fraction(5), Fraction(1, 20), Fraction(1, 5)),
    "Y": (Fraction(6), Fraction(0), Fraction(0)),
    "W": (Fraction(6), Fraction(1, 6), Fraction(2, 3)),
    "F": (Fraction(14, 3), Fraction(1, 14), Fraction(2, 7)),
}


@dataclass(frozen=True)
class Witness:
    """Example family whose lower bound rules out points violating a constraint"""
    constraint: str
    family: str
    n_rule: str
    description: str


_WITNESSES: Dict[str, Witness] = {
    "c1": Witness("c1", "many", "none", "many packets of width U < R^{-1/2}: S can be tiny while ||Ef|| is not"),
    "c2": Witness("c2", "bundle", "const:1", "a single packet (bundle or star with N = 1)"),
    "c3": Witness("c3", "bundle", "sqrt", "bundle of R^{1/2} narrow bumps, S ~ 1/N"),
    "c4": Witness("c4", "star", "sqrt", "star of R^{1/2} overlapping bumps, S ~ N^{-1/2}"),
}


def make_point(p: Number, alpha: Number, beta: Number) -> ExponentPoint:
    return ExponentPoint(parse_exponent(p), parse_exponent(alpha), parse_exponent(beta))


def satisfies_sufficient(point: ExponentPoint) -> bool:
    return all(CONSTRAINTS[name].holds(point) for name in SUFFICIENT)


def satisfies_necessary(point: ExponentPoint) -> bool:
    return all(CONSTRAINTS[name].holds(point) for name in NECESSARY)


def tight_constraints(point: ExponentPoint) -> List[str]:
    return [name for name in SUFFICIENT if CONSTRAINTS[name].is_tight(point)]


def failing_constraints(point: ExponentPoint) -> List[str]:
    return [name for name in SUFFICIENT if not CONSTRAINTS[name].holds(point)]


def classify(point: ExponentPoint) -> Verdict:
    if satisfies_sufficient(point):
        return Verdict.PROVED
    if satisfies_necessary(point):
        return Verdict.OPEN
    return Verdict.IMPOSSIBLE


def constraint_report(point: ExponentPoint) -> dict:
    """Summary used by the CLI and the HTTP layer"""
    report = point.to_dict()
    report.update(
        {
            "sufficient": satisfies_sufficient(point),
            "necessary": satisfies_necessary(point),
            "tight_constraints": tight_constraints(point),
            "failing_constraints": failing_constraints(point),
            "classification": classify(point).value,
            "exact": point.exact,
        }
    )
    return report


def sufficient_mask(p: np.ndarray, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Vectorized float version of satisfies_sufficient"""
    return _mask(SUFFICIENT, p, alpha, beta)


def necessary_mask(p: np.ndarray, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return _mask(NECESSARY, p, alpha, beta)


def _mask(names, p, alpha, beta) -> np.ndarray:
    p, alpha, beta = (np.asarray(a, dtype=float) for a in (p, alpha, beta))
    mask = np.ones(np.broadcast(p, alpha, beta).shape, dtype=bool)
    for name in names:
        c = CONSTRAINTS[name]
        mask &= c.slack_array(p, alpha, beta) >= -FLOAT_SLACK * max(1.0, abs(c.rhs))
    return mask


def interpolate(pt1: ExponentPoint, pt2: ExponentPoint, lam: Number) -> ExponentPoint:
    """
    Holder interpolation, affine in (p, p alpha, p beta).

    Args:
        pt1: Point weighted by lam
        pt2: Point weighted by 1 - lam
        lam: Weight in [0, 1]

    Returns:
        Interpolated point
    """
    lam = parse_exponent(lam)
    if not 0 <= lam <= 1:
        raise ExponentError(f"interpolation weight {lam} outside [0, 1]")
    if lam == 1:
        return pt1
    if lam == 0:
        return pt2
    p1, a1, b1 = pt1.weighted()
    p2, a2, b2 = pt2.weighted()
    p = lam * p1 + (1 - lam) * p2
    result = ExponentPoint(p, (lam * a1 + (1 - lam) * a2) / p, (lam * b1 + (1 - lam) * b2) / p)
    for check in (satisfies_sufficient, satisfies_necessary):
        if check(pt1) and check(pt2) and not check(result):
            raise ExponentError(f"{check.__name__} not preserved by interpolation at {result}")
    return result


def extend_point(point: ExponentPoint, lam: Number) -> ExponentPoint:
    """(p, alpha, beta) -> (p, alpha + lam, beta + 2 lam), valid while beta + 2 lam <= 1"""
    lam = parse_exponent(lam)
    if lam <= 0:
        raise ExponentError(f"extension step must be positive, got {lam}")
    beta = point.beta + 2 * lam
    limit = 1 if _is_exact(beta) else 1 + FLOAT_SLACK
    if beta > limit:
        raise ExponentError(f"extension leaves beta <= 1: beta + 2 lam = {beta}")
    return ExponentPoint(point.p, point.alpha + lam, beta)


def named_vertices() -> Dict[str, ExponentPoint]:
    return {name: ExponentPoint(*coords) for name, coords in _VERTICES.items()}


def vertex(name: str) -> ExponentPoint:
    try:
        return ExponentPoint(*_VERTICES[name.upper()])
    except KeyError:
        raise ExponentError(f"unknown vertex '{name}' (known: {', '.join(_VERTICES)})")


def trivial_alpha(p: Number) -> Number:
    """alpha of the S-free bound R^{3/(2p) - 1/4}"""
    p = parse_exponent(p)
    if _is_exact(p):
        return Fraction(3, 2) / p - Fraction(1, 4)
    return 1.5 / p - 0.25


def witness_family(constraint: str) -> Witness:
    """Example family showing a necessary constraint cannot be dropped"""
    if constraint not in CONSTRAINTS:
        raise ExponentError(f"unknown constraint '{constraint}'")
    witness: Optional[Witness] = _WITNESSES.get(constraint)
    if witness is None:
        raise ExponentError(f"constraint {constraint} has no known example family; it is not known to be necessary")
    return witness
