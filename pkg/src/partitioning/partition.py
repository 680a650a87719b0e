"""
Polynomial partitioning of weighted planar point sets.

A partition is a list of bisecting polynomials built one at a time; the
sign vector of the bisectors at a point names its cell, and the product of
the bisectors is the partitioning polynomial. Each bisector is found by
differential evolution over its coefficient shape, with the constant term
chosen by an exhaustive threshold sweep.
"""
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import logging

import numpy as np
import pandas as pd
from scipy.optimize import differential_evolution

from harmonic_core.errors import PartitionError
from partitioning.polynomials import BivariatePolynomial, monomial_exponents, product

ON_BOUNDARY = -1
BOUNDARY_TOLERANCE = 1e-12
MAX_DEGREE = 8
LINE_SAMPLES = 4096

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WeightedPoints:
    """Point masses (x_i, t_i, w_i) standing in for a nonnegative weight function"""
    x: np.ndarray
    t: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        x, t, w = (np.asarray(a, dtype=float).ravel() for a in (self.x, self.t, self.w))
        if not x.size == t.size == w.size:
            raise ValueError(f"coordinate/weight lengths differ: {x.size}, {t.size}, {w.size}")
        if x.size == 0:
            raise ValueError("empty point set")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(t)) and np.all(np.isfinite(w))):
            raise ValueError("point set contains non-finite values")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if w.sum() <= 0:
            raise ValueError("total weight must be positive")
        for name, value in (("x", x), ("t", t), ("w", w)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @classmethod
    def uniform(cls, x, t) -> "WeightedPoints":
        x = np.asarray(x, dtype=float)
        return cls(x, t, np.ones_like(x))

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "WeightedPoints":
        """CSV with columns x,t,w"""
        frame = pd.read_csv(path)
        missing = {"x", "t", "w"} - set(frame.columns)
        if missing:
            raise ValueError(f"{path} lacks columns {sorted(missing)}")
        return cls(frame["x"].to_numpy(), frame["t"].to_numpy(), frame["w"].to_numpy())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.x, "t": self.t, "w": self.w})

    @property
    def total_weight(self) -> float:
        return float(self.w.sum())

    @property
    def positive_count(self) -> int:
        return int(np.count_nonzero(self.w > 0))

    def frame(self) -> Tuple[Tuple[float, float], float]:
        """Weighted centroid and enclosing radius used to normalize bisectors"""
        cx = float(np.average(self.x, weights=self.w))
        ct = float(np.average(self.t, weights=self.w))
        radius = float(np.max(np.hypot(self.x - cx, self.t - ct)))
        return (cx, ct), max(radius, 1e-12)


def bisector_count(D: int) -> int:
    return max(1, int(np.ceil(np.log2(D * D) - 1e-12)))


def degree_schedule(D: int) -> List[int]:
    """Smallest d_k with d_k(d_k+3)/2 >= 2^(k-1), for each bisector k"""
    if not 1 <= D <= MAX_DEGREE:
        raise ValueError(f"partition degree D={D} outside [1, {MAX_DEGREE}]")
    schedule = []
    for k in range(1, bisector_count(D) + 1):
        d = 1
        while d * (d + 3) // 2 < 2 ** (k - 1):
            d += 1
        schedule.append(d)
    return schedule


def sign_codes(bisectors: List[BivariatePolynomial], x, t) -> np.ndarray:
    """Cell id (bitmask of positive signs) per point, ON_BOUNDARY on any zero set"""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    codes = np.zeros(np.broadcast(x, t).shape, dtype=np.int64)
    boundary = np.zeros(codes.shape, dtype=bool)
    for bit, poly in enumerate(bisectors):
        values = poly(x, t)
        boundary |= np.abs(values) <= BOUNDARY_TOLERANCE * poly.coefficient_scale
        codes |= (values > 0).astype(np.int64) << bit
    codes[boundary] = ON_BOUNDARY
    return codes


def _imbalance(weights: np.ndarray) -> Tuple[float, float]:
    """(max, mean) relative deviation of cell weights from their mean"""
    mean = weights.sum() / weights.size
    if mean <= 0:
        return np.inf, np.inf
    deviation = np.abs(weights - mean) / mean
    return float(deviation.max()), float(deviation.mean())


@dataclass
class PartitionResult:
    bisectors: List[BivariatePolynomial]
    product_degree: int
    cells: Dict[Tuple[int, ...], int]
    cell_weights: np.ndarray
    boundary_weight: float
    imbalance: float
    D: int
    tolerance: float = 0.1
    history: List[float] = field(default_factory=list)

    @classmethod
    def from_bisectors(
        cls,
        bisectors: List[BivariatePolynomial],
        points: WeightedPoints,
        D: Optional[int] = None,
        tolerance: float = 0.1,
    ) -> "PartitionResult":
        """Evaluate cells and weights for given bisectors"""
        if not bisectors:
            raise ValueError("a partition needs at least one bisector")
        n_cells = 2 ** len(bisectors)
        codes = sign_codes(bisectors, points.x, points.t)
        inside = codes != ON_BOUNDARY
        weights = np.bincount(codes[inside], weights=points.w[inside], minlength=n_cells)
        boundary = float(points.w[~inside].sum())
        cells = {
            tuple(1 if (cell >> bit) & 1 else -1 for bit in range(len(bisectors))): cell
            for cell in range(n_cells)
        }
        imbalance, _ = _imbalance(weights)
        degree = sum(p.degree for p in bisectors)
        return cls(
            bisectors=list(bisectors),
            product_degree=degree,
            cells=cells,
            cell_weights=weights,
            boundary_weight=boundary,
            imbalance=imbalance,
            D=D if D is not None else degree,
            tolerance=tolerance,
        )

    @property
    def nonempty_cells(self) -> int:
        return int(np.count_nonzero(self.cell_weights > 0))

    def partition_polynomial(self) -> BivariatePolynomial:
        return product(self.bisectors)

    def cell_of(self, x: float, t: float) -> int:
        return int(sign_codes(self.bisectors, x, t))

    def sign_vector(self, x: float, t: float) -> Tuple[int, ...]:
        return tuple(int(np.sign(p(x, t))) for p in self.bisectors)

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "product_degree": self.product_degree,
            "imbalance": self.imbalance,
            "tolerance": self.tolerance,
            "boundary_weight": self.boundary_weight,
            "nonempty_cells": self.nonempty_cells,
            "cell_weights": self.cell_weights.tolist(),
            "bisectors": [p.to_dict() for p in self.bisectors],
        }


class _ThresholdObjective:
    """Best-threshold imbalance of a candidate shape, given the current cells"""

    def __init__(
        self,
        monomials: np.ndarray,
        weights: np.ndarray,
        codes: np.ndarray,
        n_old: int,
    ):
        self.monomials = monomials
        self.weights = weights
        self.n_old = n_old
        self.inside = codes != ON_BOUNDARY
        self.codes = np.where(self.inside, codes, 0)
        self.cell_totals = np.bincount(
            self.codes[self.inside], weights=weights[self.inside], minlength=n_old
        )
        self.mean = self.cell_totals.sum() / (2 * n_old)

    def shape(self, vector: np.ndarray) -> Optional[np.ndarray]:
        norm = np.linalg.norm(vector)
        return None if norm == 0 else vector / norm

    def sweep(self, vector: np.ndarray) -> Tuple[float, float]:
        """(objective, constant) for the best threshold of this shape"""
        shape = self.shape(vector)
        if shape is None or self.mean <= 0:
            return np.inf, 0.0
        values = self.monomials @ shape
        order = np.argsort(values, kind="stable")
        v = values[order]
        w = np.where(self.inside, self.weights, 0.0)[order]
        one_hot = np.zeros((v.size, self.n_old))
        one_hot[np.arange(v.size), self.codes[order]] = w
        # weight of each old cell above threshold position k (points k.. are above)
        above = np.vstack([np.cumsum(one_hot[::-1], axis=0)[::-1], np.zeros((1, self.n_old))])
        below = self.cell_totals[None, :] - above
        deviation = np.abs(np.concatenate([above, below], axis=1) - self.mean) / self.mean
        score = deviation.max(axis=1) + 1e-3 * deviation.mean(axis=1)
        # thresholds must sit strictly between distinct values
        valid = np.ones(v.size + 1, dtype=bool)
        valid[1:-1] = v[1:] > v[:-1]
        score = np.where(valid, score, np.inf)
        k = int(np.argmin(score))
        if k == 0:
            threshold = v[0] - 1.0
        elif k == v.size:
            threshold = v[-1] + 1.0
        else:
            threshold = 0.5 * (v[k - 1] + v[k])
        return float(score[k]), float(threshold)

    def __call__(self, vector: np.ndarray) -> float:
        return self.sweep(vector)[0]


class PolynomialPartitioner:
    """
    Builds a degree-D partition of a weighted point set.

    Args:
        D: Target degree in [1, 8]
        tolerance: Maximum accepted imbalance tau
        restarts: Independent optimizer restarts per bisector
        maxiter: Differential evolution generations per restart
        seed: Master seed; restarts use spawned child seeds
        threads: Worker threads for the restarts
    """

    def __init__(
        self,
        D: int,
        tolerance: float = 0.1,
        restarts: int = 4,
        maxiter: int = 200,
        seed: Optional[int] = None,
        threads: int = 1,
    ):
        self.D = D
        self.schedule = degree_schedule(D)
        self.tolerance = tolerance
        self.restarts = max(1, restarts)
        self.maxiter = maxiter
        self.seed = seed
        self.threads = max(1, threads)
        self.logger = logging.getLogger(__name__)

    def _optimize(self, objective: _ThresholdObjective, dimension: int, seed: int, target: float):
        def stop(xk, convergence=None):
            return objective(xk) <= target

        result = differential_evolution(
            objective,
            bounds=[(-1.0, 1.0)] * dimension,
            seed=seed,
            maxiter=self.maxiter,
            tol=0.0,
            polish=False,
            callback=stop,
        )
        return float(result.fun), np.asarray(result.x)

    def _bisector(
        self,
        points: WeightedPoints,
        current: List[BivariatePolynomial],
        degree: int,
        center: Tuple[float, float],
        scale: float,
        seed_sequence: np.random.SeedSequence,
        target: float,
    ) -> Tuple[BivariatePolynomial, float]:
        u = (points.x - center[0]) / scale
        w = (points.t - center[1]) / scale
        exponents = monomial_exponents(degree)[1:]
        monomials = np.stack([u ** i * w ** j for i, j in exponents], axis=1)
        n_old = 2 ** len(current)
        codes = sign_codes(current, points.x, points.t) if current else np.zeros(points.x.size, dtype=np.int64)
        objective = _ThresholdObjective(monomials, points.w, codes, n_old)

        seeds = [int(s.generate_state(1)[0]) for s in seed_sequence.spawn(self.restarts)]
        outcomes = {}
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                futures = {
                    pool.submit(self._optimize, objective, len(exponents), s, target): i
                    for i, s in enumerate(seeds)
                }
                for future in as_completed(futures):
                    outcomes[futures[future]] = future.result()
        else:
            for i, s in enumerate(seeds):
                outcomes[i] = self._optimize(objective, len(exponents), s, target)

        index = min(outcomes, key=lambda i: (outcomes[i][0], i))
        score, vector = outcomes[index]
        shape = objective.shape(vector)
        if shape is None:
            raise PartitionError("optimizer returned a zero polynomial", best_imbalance=np.inf)
        _, threshold = objective.sweep(vector)
        coefficients = np.concatenate(([-threshold], shape))
        poly = BivariatePolynomial.from_vector(degree, coefficients, center, scale)
        return poly, score

    def build(self, points: WeightedPoints) -> PartitionResult:
        needed = 2 ** len(self.schedule)
        if points.positive_count < needed:
            raise ValueError(
                f"too few points: {points.positive_count} of positive weight, need {needed} for D={self.D}"
            )
        center, scale = points.frame()
        master = np.random.SeedSequence(self.seed)
        stage_seeds = master.spawn(len(self.schedule))
        bisectors: List[BivariatePolynomial] = []
        history = []
        for k, (degree, stage_seed) in enumerate(zip(self.schedule, stage_seeds), start=1):
            target = 0.25 * self.tolerance
            poly, score = self._bisector(points, bisectors, degree, center, scale, stage_seed, target)
            candidate = PartitionResult.from_bisectors(bisectors + [poly], points, self.D, self.tolerance)
            if candidate.boundary_weight > 0.01 * points.total_weight:
                poly = poly.shifted(1e-9 * poly.coefficient_scale)
                candidate = PartitionResult.from_bisectors(bisectors + [poly], points, self.D, self.tolerance)
            bisectors.append(poly)
            history.append(candidate.imbalance)
            self.logger.debug(f"Bisector {k}/{len(self.schedule)} (degree {degree}): imbalance {candidate.imbalance:.4f}")

        result = PartitionResult.from_bisectors(bisectors, points, self.D, self.tolerance)
        result.history = history
        if result.product_degree > 4 * self.D:
            raise PartitionError(
                f"product degree {result.product_degree} exceeds 4D = {4 * self.D}",
                best_imbalance=result.imbalance,
            )
        if result.imbalance > self.tolerance:
            raise PartitionError(
                f"imbalance {result.imbalance:.4f} above tolerance {self.tolerance} for D={self.D}",
                best_imbalance=result.imbalance,
            )
        self.logger.info(
            f"Partition D={self.D}: {len(bisectors)} bisectors, degree {result.product_degree}, "
            f"{result.nonempty_cells} nonempty cells, imbalance {result.imbalance:.4f}"
        )
        return result


def build_partition(
    points: WeightedPoints,
    D: int,
    tolerance: float = 0.1,
    seed: Optional[int] = None,
    restarts: int = 4,
    maxiter: int = 200,
    threads: int = 1,
) -> PartitionResult:
    return PolynomialPartitioner(D, tolerance, restarts, maxiter, seed, threads).build(points)


def cell_of(partition: PartitionResult, x: float, t: float) -> int:
    """Cell id of (x, t), or ON_BOUNDARY"""
    return partition.cell_of(x, t)


@dataclass
class LineIncidence:
    count: int
    degenerate: bool
    boundary_samples: int


def line_incidences(
    partition: PartitionResult,
    theta: float,
    v: float,
    x_window: float,
    samples: int = LINE_SAMPLES,
) -> LineIncidence:
    """
    Distinct cells met by the line x = v + theta t for |t| <= x_window.

    A line lying in a bisector's zero set is degenerate; its count is the
    union of cells met by the two parallel lines just off it.

    Raises:
        PartitionError: a non-degenerate line meets more than
            product_degree + 1 cells
    """
    t = np.linspace(-x_window, x_window, samples)
    x = v + theta * t
    codes = sign_codes(partition.bisectors, x, t)
    boundary = int(np.count_nonzero(codes == ON_BOUNDARY))
    degenerate = any(
        np.all(np.abs(p(x, t)) <= BOUNDARY_TOLERANCE * p.coefficient_scale)
        for p in partition.bisectors
    )
    if degenerate:
        offset = 1e-6 * max(1.0, x_window) / np.sqrt(1 + theta ** 2)
        met = set()
        for shift in (-offset, offset):
            side = sign_codes(partition.bisectors, x + shift, t)
            met |= set(side[side != ON_BOUNDARY].tolist())
    else:
        met = set(codes[codes != ON_BOUNDARY].tolist())
    bound = partition.product_degree + 1
    if not degenerate and len(met) > bound:
        logger.error(f"Line x = {v:g} + {theta:g} t meets {len(met)} cells, bound {bound}")
        raise PartitionError(
            f"line x = {v:g} + {theta:g} t meets {len(met)} cells, more than product degree + 1 = {bound}"
        )
    return LineIncidence(len(met), degenerate, boundary)


def line_cell_incidences(
    partition: PartitionResult, theta: float, v: float, x_window: float
) -> int:
    return line_incidences(partition, theta, v, x_window).count
