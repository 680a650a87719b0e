"""
Random functions with Fourier support near the truncated parabola and
their l^2 decoupling ratio ||g||_6 / (sum_iota ||g_iota||_6^2)^{1/2}.

Frequencies live on a lattice of spacing delta/2 restricted to the
delta-neighbourhood of {(xi, xi^2) : |xi| <= 1}; the lattice is cut into
arcs by xi-intervals of length about delta^{1/2}. Fields are evaluated on
a grid of side 4/delta by two chirp-z passes and weighted by |eta|^6.
"""
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd
from scipy import fft as sp_fft
from scipy import stats

from harmonic_core.chirp import chirp_sum
from harmonic_core.errors import EnsembleError, GridBudgetError
from harmonic_core.extension import EtaWindow, evaluate_field, make_eta
from harmonic_core.profiles import FrequencyProfile, make_profile
from harmonic_core.spacetime import SpaceTimeField, SpaceTimeGrid
from wave_packets.decomposition import frequency_partition

MAX_ARCS = 64
DEFAULT_GRID_BUDGET = 2 ** 22
LATTICE_OVERSAMPLING = 2
# grid samples per unit length; frequencies stay below 1.1 in both variables
SAMPLES_PER_UNIT = 1.0

AmplitudeLaw = Union[str, Callable[[np.random.Generator, int, int], np.ndarray]]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Arc:
    index: int
    xi_lo: float
    xi_hi: float

    @property
    def length(self) -> float:
        return self.xi_hi - self.xi_lo


@dataclass(frozen=True, eq=False)
class FrequencyLattice:
    """Lattice points (xi_i, tau_j) of the delta-neighbourhood of the parabola"""
    delta: float
    step: float
    xi0: float
    tau0: float
    n_xi: int
    n_tau: int

    @classmethod
    def for_delta(cls, delta: float) -> "FrequencyLattice":
        step = delta / LATTICE_OVERSAMPLING
        reach = delta * np.sqrt(5.0)
        n_below = int(np.ceil(reach / step))
        n_xi = int(round(2.0 / step)) + 1
        n_tau = int(np.ceil((1.0 + reach) / step)) + n_below + 1
        return cls(delta, step, -1.0, -n_below * step, n_xi, n_tau)

    @property
    def xi(self) -> np.ndarray:
        return self.xi0 + self.step * np.arange(self.n_xi)

    @property
    def tau(self) -> np.ndarray:
        return self.tau0 + self.step * np.arange(self.n_tau)

    def neighbourhood_mask(self) -> np.ndarray:
        """(n_tau, n_xi) mask of points within delta of the parabola (normal distance)"""
        xi = self.xi[None, :]
        tau = self.tau[:, None]
        return np.abs(tau - xi * xi) / np.sqrt(1.0 + 4.0 * xi * xi) <= self.delta


def make_arcs(delta: float) -> List[Arc]:
    """ceil(delta^{-1/2}) arcs of equal xi-length covering [-1, 1]"""
    count = int(np.ceil(delta ** -0.5 - 1e-9))
    edges = np.linspace(-1.0, 1.0, count + 1)
    return [Arc(i, float(edges[i]), float(edges[i + 1])) for i in range(count)]


@dataclass(frozen=True, eq=False)
class ArcPiece:
    """Amplitudes of one arc on its lattice block [tau_lo:tau_hi, xi_lo:xi_hi]"""
    arc: Arc
    xi_slice: slice
    tau_slice: slice
    block: np.ndarray

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.block))


def _draw(law: AmplitudeLaw, rng: np.random.Generator, arc_index: int, count: int) -> np.ndarray:
    if callable(law):
        values = np.asarray(law(rng, arc_index, count), dtype=complex)
        if values.shape != (count,):
            raise EnsembleError(f"amplitude law returned shape {values.shape}, expected ({count},)")
        return values
    if law == "phase":
        return np.exp(2j * np.pi * rng.random(count))
    if law == "gaussian":
        return (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / np.sqrt(2.0)
    raise EnsembleError(f"unknown amplitude law '{law}' (expected 'phase', 'gaussian' or a callable)")


def ensemble_grid(delta: float, grid_budget: int = DEFAULT_GRID_BUDGET) -> SpaceTimeGrid:
    """Grid on [-2/delta, 2/delta]^2, the support of eta at scale 1/delta and its first ring"""
    R = 1.0 / delta
    n = int(np.ceil(4.0 * R * SAMPLES_PER_UNIT)) + 1
    grid = SpaceTimeGrid(R=R, nx=n, nt=n, x_half=2 * R, t_half=2 * R)
    if grid.points > grid_budget:
        raise GridBudgetError(grid.points, grid_budget)
    return grid


@lru_cache(maxsize=8)
def _eta_for(delta: float, n: int) -> EtaWindow:
    R = 1.0 / delta
    grid = SpaceTimeGrid(R=R, nx=n, nt=n, x_half=2 * R, t_half=2 * R)
    return make_eta(R, grid)


@dataclass(eq=False)
class ArcFunctionEnsemble:
    """
    g = sum_iota g_iota with g_iota^ supported near arc iota.

    Args:
        delta: Neighbourhood width, 0 < delta <= 1/4
        lattice: Frequency lattice
        pieces: Nonempty arc pieces
        grid: Common evaluation grid
        seed: Seed the amplitudes were drawn from
    """
    delta: float
    lattice: FrequencyLattice
    pieces: List[ArcPiece]
    grid: SpaceTimeGrid
    seed: Optional[int] = None
    _fields: Optional[List[SpaceTimeField]] = field(default=None, repr=False)

    @property
    def arc_count(self) -> int:
        return len(self.pieces)

    def _piece_values(self, piece: ArcPiece, grid: SpaceTimeGrid) -> np.ndarray:
        lat = self.lattice
        xi_start = lat.xi0 + piece.xi_slice.start * lat.step
        tau_start = lat.tau0 + piece.tau_slice.start * lat.step
        rows = chirp_sum(piece.block, xi_start, lat.step, -grid.x_half, grid.dx, grid.nx)
        return chirp_sum(rows.T, tau_start, lat.step, -grid.t_half, grid.dt, grid.nt)

    def arc_fields(self) -> List[SpaceTimeField]:
        """g_iota on the ensemble grid, computed once"""
        if self._fields is None:
            self._fields = [
                SpaceTimeField(self.grid, self._piece_values(p, self.grid)) for p in self.pieces
            ]
        return self._fields

    def total_field(self) -> SpaceTimeField:
        fields = self.arc_fields()
        if not fields:
            raise EnsembleError("ensemble has no arcs")
        total = fields[0].values.copy()
        for f in fields[1:]:
            total = total + f.values
        return SpaceTimeField(self.grid, total)

    def amplitude_digest(self) -> str:
        """SHA-256 of every amplitude block, for reproducibility checks"""
        digest = hashlib.sha256()
        for piece in self.pieces:
            digest.update(np.ascontiguousarray(piece.block).tobytes())
        return digest.hexdigest()

    def periodic_l2(self) -> Tuple[float, List[float]]:
        """
        ||g||_2^2 and ||g_iota||_2^2 over one full period of the lattice, where
        distinct lattice frequencies are exactly orthogonal.
        """
        lat = self.lattice
        period = 2 * np.pi / lat.step
        nx = sp_fft.next_fast_len(lat.n_xi)
        nt = sp_fft.next_fast_len(lat.n_tau)
        dx, dt = period / nx, period / nt
        parts = []
        for piece in self.pieces:
            xi_start = lat.xi0 + piece.xi_slice.start * lat.step
            tau_start = lat.tau0 + piece.tau_slice.start * lat.step
            rows = chirp_sum(piece.block, xi_start, lat.step, 0.0, dx, nx)
            parts.append(chirp_sum(rows.T, tau_start, lat.step, 0.0, dt, nt))
        total = np.sum(parts, axis=0)
        cell = dx * dt
        return float(np.sum(np.abs(total) ** 2) * cell), [
            float(np.sum(np.abs(p) ** 2) * cell) for p in parts
        ]


def synthesize_ensemble(
    delta: float,
    seed: Optional[int] = None,
    amplitude_law: AmplitudeLaw = "phase",
    active_arcs: Optional[Sequence[int]] = None,
    grid_budget: int = DEFAULT_GRID_BUDGET,
    rng: Optional[np.random.Generator] = None,
) -> ArcFunctionEnsemble:
    """
    Draw amplitudes on the lattice points of every (selected) arc.

    Args:
        delta: Neighbourhood width in (0, 1/4] with delta^{-1/2} <= 64
        seed: Seed for numpy's default_rng (ignored when rng is given)
        amplitude_law: 'phase', 'gaussian' or callable(rng, arc_index, count)
        active_arcs: Arc indices to populate (default: all)
        grid_budget: Cap on grid points

    Returns:
        ArcFunctionEnsemble
    """
    if not 0 < delta <= 0.25:
        raise EnsembleError(f"delta must lie in (0, 1/4], got {delta}")
    arcs = make_arcs(delta)
    if len(arcs) > MAX_ARCS:
        raise EnsembleError(f"delta={delta} needs {len(arcs)} arcs, more than {MAX_ARCS}")
    grid = ensemble_grid(delta, grid_budget)
    lattice = FrequencyLattice.for_delta(delta)
    mask = lattice.neighbourhood_mask()
    xi = lattice.xi
    rng = rng if rng is not None else np.random.default_rng(seed)

    selected = set(range(len(arcs))) if active_arcs is None else set(active_arcs)
    unknown = selected - set(range(len(arcs)))
    if unknown:
        raise EnsembleError(f"arc indices {sorted(unknown)} outside 0..{len(arcs) - 1}")

    pieces = []
    for arc in arcs:
        last = arc.index == len(arcs) - 1
        in_arc = (xi >= arc.xi_lo) & ((xi <= arc.xi_hi) if last else (xi < arc.xi_hi))
        columns = np.flatnonzero(in_arc)
        if arc.index not in selected or columns.size == 0:
            continue
        sub = mask[:, columns[0]:columns[-1] + 1]
        rows = np.flatnonzero(sub.any(axis=1))
        block_mask = sub[rows[0]:rows[-1] + 1]
        block = np.zeros(block_mask.shape, dtype=complex)
        block[block_mask] = _draw(amplitude_law, rng, arc.index, int(block_mask.sum()))
        pieces.append(
            ArcPiece(
                arc=arc,
                xi_slice=slice(int(columns[0]), int(columns[-1]) + 1),
                tau_slice=slice(int(rows[0]), int(rows[-1]) + 1),
                block=block,
            )
        )
    logger.debug(f"Ensemble delta={delta}: {len(pieces)} arcs on a {grid.nx}x{grid.nt} grid")
    return ArcFunctionEnsemble(delta, lattice, pieces, grid, seed)


def weighted_l6(values: np.ndarray, weight: np.ndarray, cell: float) -> float:
    return float(np.sum(np.abs(values) ** 6 * weight) * cell) ** (1.0 / 6.0)


def decoupling_ratio(ens: ArcFunctionEnsemble) -> float:
    """||g eta||_6 / (sum_iota ||g_iota eta||_6^2)^{1/2}"""
    eta = _eta_for(ens.delta, ens.grid.nx)
    weight = eta.weight(6)
    cell = ens.grid.dx * ens.grid.dt
    pieces = [weighted_l6(f.values, weight, cell) for f in ens.arc_fields()]
    denominator = float(np.sqrt(np.sum(np.square(pieces))))
    if denominator == 0:
        raise EnsembleError("every arc piece vanishes; decoupling ratio undefined")
    return weighted_l6(ens.total_field().values, weight, cell) / denominator


def trial_seeds(seed: Optional[int], deltas: Sequence[float], trials: int) -> Dict[Tuple[int, int], int]:
    """Per-(delta index, trial) seeds spawned from one master seed"""
    children = np.random.SeedSequence(seed).spawn(len(deltas) * trials)
    return {
        (d, k): int(children[d * trials + k].generate_state(1)[0])
        for d in range(len(deltas))
        for k in range(trials)
    }


def run_battery(
    deltas: Sequence[float],
    trials: int,
    seed: Optional[int] = None,
    amplitude_law: AmplitudeLaw = "phase",
    threads: int = 1,
    grid_budget: int = DEFAULT_GRID_BUDGET,
) -> pd.DataFrame:
    """Ratios for `trials` random ensembles per delta; columns delta, trial, ratio"""
    if trials < 1:
        raise EnsembleError(f"need at least one trial, got {trials}")
    seeds = trial_seeds(seed, deltas, trials)

    def one(key: Tuple[int, int]) -> Tuple[Tuple[int, int], float]:
        d, k = key
        ens = synthesize_ensemble(deltas[d], seeds[key], amplitude_law, grid_budget=grid_budget)
        return key, decoupling_ratio(ens)

    keys = sorted(seeds)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = dict(pool.map(one, keys))
    else:
        results = dict(one(key) for key in keys)

    frame = pd.DataFrame(
        [{"delta": float(deltas[d]), "trial": k, "ratio": results[(d, k)]} for d, k in keys]
    )
    for delta, group in frame.groupby("delta", sort=False):
        logger.info(f"delta={delta:g}: max ratio {group['ratio'].max():.4f} over {len(group)} trials")
    return frame


@dataclass
class GrowthFit:
    slope: float
    intercept: float
    r_squared: float
    maxima: Dict[float, float]


def fit_growth(max_ratios: Mapping[float, float]) -> GrowthFit:
    """Least-squares slope of log(max ratio) against log(1/delta)"""
    if len(max_ratios) < 2:
        raise EnsembleError("growth fit needs at least two delta values")
    deltas = np.array(sorted(max_ratios), dtype=float)
    ratios = np.array([max_ratios[d] for d in deltas], dtype=float)
    if np.any(deltas <= 0) or np.any(ratios <= 0):
        raise EnsembleError("growth fit needs positive deltas and ratios")
    fit = stats.linregress(np.log(1.0 / deltas), np.log(ratios))
    r_squared = 1.0 if np.ptp(np.log(ratios)) == 0 else float(fit.rvalue ** 2)
    return GrowthFit(float(fit.slope), float(fit.intercept), r_squared, dict(zip(deltas.tolist(), ratios.tolist())))


def decoupling_growth_fit(
    deltas: Sequence[float],
    trials: int,
    seed: Optional[int] = None,
    amplitude_law: AmplitudeLaw = "phase",
    threads: int = 1,
) -> Tuple[GrowthFit, pd.DataFrame]:
    """Battery over deltas followed by the growth fit of the per-delta maxima"""
    frame = run_battery(deltas, trials, seed, amplitude_law, threads)
    maxima = frame.groupby("delta")["ratio"].max().to_dict()
    fit = fit_growth(maxima)
    logger.info(f"Decoupling growth slope {fit.slope:.4f} (r^2={fit.r_squared:.3f})")
    return fit, frame


def frequency_decoupling_ratio(
    f: FrequencyProfile,
    R: float,
    pieces: Optional[list] = None,
    threads: int = 1,
) -> float:
    """
    ||Ef eta||_6 / (sum_theta ||Ef_theta eta||_6^2)^{1/2} for the R^{-1/2}
    frequency partition of f, with eta at scale R/2 on a grid covering B_R.
    """
    n = int(np.ceil(2 * R * SAMPLES_PER_UNIT)) + 1
    grid = SpaceTimeGrid(R=R, nx=n, nt=n, x_half=R, t_half=R)
    eta = make_eta(R / 2, grid)
    weight = eta.weight(6)
    cell = grid.dx * grid.dt
    pieces = pieces if pieces is not None else frequency_partition(f, R)
    if not pieces:
        raise EnsembleError("profile has no nonzero frequency pieces")

    def piece_norm(piece) -> float:
        samples = np.zeros(f.M, dtype=complex)
        samples[piece.lo:piece.hi + 1] = f.samples[piece.lo:piece.hi + 1] * piece.window
        part = make_profile(samples, label=f"{f.label}[theta={piece.theta:.4g}]")
        return weighted_l6(evaluate_field(part, grid).values, weight, cell)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            norms = list(pool.map(piece_norm, pieces))
    else:
        norms = [piece_norm(p) for p in pieces]
    whole = weighted_l6(evaluate_field(f, grid, threads=threads).values, weight, cell)
    return whole / float(np.sqrt(np.sum(np.square(norms))))
