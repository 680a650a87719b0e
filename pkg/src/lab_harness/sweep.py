"""
R-sweeps over the example families: ||Ef||_{L^p(B_R)}, ||f||_2 and S per
scale, the ratio ||Ef||_p / (R^alpha S^beta ||f||_2) against a claimed
exponent point, and log-log fits of each quantity against R.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union
import logging

import numpy as np
import pandas as pd

from exponent_ops.polytope import ExponentPoint
from harmonic_core.extension import evaluate_field, evaluate_points
from harmonic_core.norms import BallNormIntegrator, weighted_l2_band
from harmonic_core.profiles import FrequencyProfile
from harmonic_core.spacetime import SpaceTimeGrid
from lab_harness.config import LabConfig
from lab_harness.fitting import PowerLawFit, fit_power_law
from wave_packets.decomposition import WavePacketDecomposer
from wave_packets.families import FAMILIES, build_family, largest_admissible_n

CSV_COLUMNS = ["family", "R", "N", "p", "lp_norm", "l2_norm", "S", "ratio"]
MIN_SWEEP_R = 256
ORACLE_POINTS = 100
ORACLE_TOLERANCE = 1e-8
BAND_NT = 65

logger = logging.getLogger(__name__)


def parse_n_rule(rule: str) -> Callable[[float], Optional[int]]:
    """'sqrt' -> largest admissible N ~ R^{1/2}; 'const:k' -> k; 'none' -> no N"""
    rule = (rule or "none").strip().lower()
    if rule in ("sqrt", "r^1/2"):
        return largest_admissible_n
    if rule == "none":
        return lambda R: None
    if rule.startswith("const:"):
        try:
            k = int(rule.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad N rule '{rule}': expected const:<integer>")
        if k < 1:
            raise ValueError(f"N rule needs k >= 1, got {k}")
        return lambda R: k
    raise ValueError(f"unknown N rule '{rule}' (expected sqrt, const:k or none)")


def _n_exponent(n_rule: str) -> float:
    return 0.5 if n_rule.strip().lower() in ("sqrt", "r^1/2") else 0.0


def predicted_slopes(family: str, p: float, n_rule: str = "sqrt", claimed: Optional[ExponentPoint] = None) -> Dict[str, float]:
    """
    Exponents of R expected for lp_norm, l2_norm, S and (with a claimed
    point) the ratio, from the size of each family's field and packets.
    """
    p = float(p)
    family = family.lower()
    n = _n_exponent(n_rule)
    single = 1.5 / p - 0.5
    if family == "f0":
        lp = 2.0 / p - 0.5 if p < 4 else 0.0
        l2, s = 0.0, -0.25
    elif family in ("f1", "many"):
        lp, l2, s = single, -0.25, 0.0
    elif family == "bundle":
        lp = single + n * (1.0 / p - 0.5)
        l2, s = -0.25, -n
    elif family == "star":
        lp = single + n * (1.0 - 3.0 / p)
        l2, s = -0.25 + 0.5 * n, -0.5 * n
    else:
        raise ValueError(f"unknown family '{family}' (expected one of {sorted(FAMILIES)})")
    slopes = {"lp_norm": lp, "l2_norm": l2, "S": s}
    if claimed is not None:
        alpha, beta = float(claimed.alpha), float(claimed.beta)
        slopes["ratio"] = lp - alpha - beta * s - l2
    return slopes


@dataclass
class SweepRow:
    family: str
    R: float
    N: Optional[int]
    p: float
    lp_norm: float = float("nan")
    l2_norm: float = float("nan")
    S: float = float("nan")
    ratio: float = float("nan")
    sup: float = float("nan")
    l1_norm: float = float("nan")
    band_l2: float = float("nan")
    band_bound: float = float("nan")
    oracle_error: float = float("nan")
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.notes


@dataclass
class SweepReport:
    family: str
    p: float
    claimed: ExponentPoint
    n_rule: str
    rows: List[SweepRow]
    fits: Dict[str, PowerLawFit] = field(default_factory=dict)
    predicted: Dict[str, float] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        records = [
            {
                "family": r.family,
                "R": r.R,
                "N": r.N if r.N is not None else "",
                "p": r.p,
                "lp_norm": r.lp_norm,
                "l2_norm": r.l2_norm,
                "S": r.S,
                "ratio": r.ratio,
            }
            for r in self.rows
        ]
        return pd.DataFrame(records, columns=CSV_COLUMNS)

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format="%.12e")
        logger.info(f"Wrote {len(self.rows)} sweep rows to {path}")
        return path

    def notes(self) -> List[str]:
        return [f"R={r.R:g}: {note}" for r in self.rows for note in r.notes]

    def summary(self) -> dict:
        return {
            "family": self.family,
            "p": self.p,
            "claimed": self.claimed.to_dict(),
            "n_rule": self.n_rule,
            "fits": {name: fit.to_dict() for name, fit in self.fits.items()},
            "predicted": self.predicted,
            "notes": self.notes(),
        }


class SweepRunner:
    """Evaluates sweep rows with the tolerances of a LabConfig"""

    def __init__(self, config: Optional[LabConfig] = None):
        self.config = config or LabConfig()
        self.logger = logging.getLogger(__name__)

    def band_grid(self, R: float) -> SpaceTimeGrid:
        """|x| <= R at unit spacing, |t| <= R on BAND_NT slices"""
        nx = int(np.ceil(2 * R)) + 1
        return SpaceTimeGrid(R=R, nx=nx, nt=BAND_NT, x_half=R, t_half=R)

    def row(
        self,
        family: str,
        R: float,
        N: Optional[int],
        p: float,
        claimed: ExponentPoint,
        seed: Optional[int],
        threads: int = 1,
    ) -> SweepRow:
        cfg = self.config
        row = SweepRow(family=family, R=R, N=N, p=p)
        f = build_family(family, R, N=N)
        row.l2_norm = f.l2_norm()
        row.l1_norm = f.l1_norm()

        integrator = BallNormIntegrator(
            points_per_axis=cfg.shell_points,
            inner_radius=cfg.shell_inner_radius,
            max_points=cfg.max_field_points,
            threads=threads,
        )
        norms = integrator.integrate(f, R, [p])
        row.lp_norm = norms.norms[float(p)]
        row.sup = norms.sup

        decomposer = WavePacketDecomposer(cfg.packet_settings())
        row.S = decomposer.decompose(f, R).S
        row.ratio = row.lp_norm / (R ** float(claimed.alpha) * row.S ** float(claimed.beta) * row.l2_norm)

        self._check_hard_inequalities(f, R, row, seed, threads)
        return row

    def _check_hard_inequalities(
        self, f: FrequencyProfile, R: float, row: SweepRow, seed: Optional[int], threads: int
    ) -> None:
        slack = 1.0 + self.config.quadrature_slack
        grid = self.band_grid(R)
        field_values = evaluate_field(f, grid, max_points=self.config.max_field_points, threads=threads)
        row.band_l2 = weighted_l2_band(field_values, R)
        row.band_bound = float(np.sqrt(2 * np.pi * 2 * R)) * row.l2_norm
        if row.band_l2 > row.band_bound * slack:
            row.notes.append(f"band bound violated: {row.band_l2:.6e} > {row.band_bound:.6e}")
        if row.sup > row.l1_norm * slack:
            row.notes.append(f"sup bound violated: {row.sup:.6e} > {row.l1_norm:.6e}")

        rng = np.random.default_rng(seed)
        ix = rng.integers(0, grid.nx, ORACLE_POINTS)
        it = rng.integers(0, grid.nt, ORACLE_POINTS)
        direct = evaluate_points(f, grid.x[ix], grid.t[it])
        row.oracle_error = float(np.max(np.abs(direct - field_values.values[ix, it])))
        if row.oracle_error > ORACLE_TOLERANCE * row.l1_norm:
            row.notes.append(f"oracle mismatch {row.oracle_error:.3e} > {ORACLE_TOLERANCE:g}*|f|_1")

    def run(
        self,
        family: str,
        p: float,
        R_list: Sequence[float],
        n_rule: str,
        claimed: ExponentPoint,
        seed: Optional[int] = None,
    ) -> SweepReport:
        R_list = [float(R) for R in R_list]
        if len(set(R_list)) < 3:
            raise ValueError(f"a sweep needs at least 3 distinct R values, got {R_list}")
        if any(b <= a for a, b in zip(R_list, R_list[1:])):
            raise ValueError(f"R values must be ascending, got {R_list}")
        if R_list[0] < MIN_SWEEP_R:
            raise ValueError(f"sweeps start at R >= {MIN_SWEEP_R}, got {R_list[0]}")
        n_of = parse_n_rule(n_rule)
        seeds = np.random.SeedSequence(seed).spawn(len(R_list))
        row_seeds = [int(s.generate_state(1)[0]) for s in seeds]
        threads = self.config.threads
        # rows run concurrently or each row uses the threads internally
        row_threads = 1 if threads > 1 and len(R_list) > 1 else threads

        def compute(i: int) -> SweepRow:
            R = R_list[i]
            N = n_of(R)
            try:
                return self.row(family, R, N, p, claimed, row_seeds[i], threads=row_threads)
            except (ValueError, RuntimeError) as e:
                self.logger.warning(f"Sweep row {family} R={R:g} failed: {e}")
                failed = SweepRow(family=family, R=R, N=N, p=p)
                failed.notes.append(f"{type(e).__name__}: {e}")
                return failed

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(compute, range(len(R_list))))
        else:
            rows = [compute(i) for i in range(len(R_list))]

        report = SweepReport(
            family=family,
            p=p,
            claimed=claimed,
            n_rule=n_rule,
            rows=rows,
            predicted=predicted_slopes(family, p, n_rule, claimed),
        )
        good = [r for r in rows if np.isfinite(r.ratio)]
        if len(good) >= 3:
            for quantity in ("lp_norm", "l2_norm", "S", "ratio"):
                report.fits[quantity] = fit_power_law([(r.R, getattr(r, quantity)) for r in good])
            self.logger.info(
                f"Sweep {family} p={p:g}: lp slope {report.fits['lp_norm'].slope:+.4f} "
                f"(predicted {report.predicted['lp_norm']:+.4f}), ratio slope "
                f"{report.fits['ratio'].slope:+.4f} (predicted {report.predicted['ratio']:+.4f})"
            )
        else:
            self.logger.warning(f"Sweep {family}: only {len(good)} usable rows, no fits")
        return report


def run_sweep(
    family: str,
    p: float,
    R_list: Sequence[float],
    N_rule: str,
    claimed_point: ExponentPoint,
    grid_budget: Optional[int] = None,
    seed: Optional[int] = None,
    config: Optional[LabConfig] = None,
) -> SweepReport:
    """
    Sweep one family over R and fit every quantity against R.

    Args:
        family: f0, f1, many, bundle or star
        p: Lebesgue exponent
        R_list: Ascending scales, at least three, all >= 256
        N_rule: 'sqrt', 'const:k' or 'none'
        claimed_point: (p, alpha, beta) whose ratio is tracked
        grid_budget: Cap on grid points per field evaluation
        seed: Seed for the oracle subsamples
        config: Tolerances (defaults to LabConfig())

    Returns:
        SweepReport with rows ordered by R
    """
    config = config or LabConfig()
    if grid_budget is not None:
        config = config.model_copy(update={"max_field_points": int(grid_budget)})
    if float(claimed_point.p) != float(p):
        logger.warning(f"claimed point {claimed_point} has p != {p}")
    return SweepRunner(config).run(family, p, R_list, N_rule, claimed_point, seed)


def default_claim(p: float) -> ExponentPoint:
    """S-free claim (p, 3/(2p) - 1/4, 0)"""
    p = Fraction(p).limit_denominator(1000)
    return ExponentPoint(p, Fraction(3, 2) / p - Fraction(1, 4), Fraction(0))
