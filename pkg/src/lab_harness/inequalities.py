"""
Fixed inequalities every profile obeys, checked numerically over a corpus:

* band bound      ||Ef||_{L^2(R x [-R, R])} <= sqrt(2 pi * 2R) ||f||_2
* trivial bound   ||Ef||_{L^p(B_R)} <= C R^{3/(2p) - 1/4} ||f||_2
* Holder sandwich between three exponents of the same field
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union
import logging

import numpy as np
import pandas as pd

from harmonic_core.extension import evaluate_field
from harmonic_core.norms import BallNormIntegrator, weighted_l2_band
from harmonic_core.profiles import FrequencyProfile
from harmonic_core.spacetime import SpaceTimeGrid
from lab_harness.config import LabConfig
from lab_harness.sweep import BAND_NT, parse_n_rule
from wave_packets.families import build_family

DEFAULT_TRIVIAL_BOUND = 10.0

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorpusItem:
    """Family member rebuilt at every R of a check"""
    family: str
    n_rule: str = "sqrt"

    @property
    def label(self) -> str:
        return self.family if self.family not in ("bundle", "star") else f"{self.family}[{self.n_rule}]"

    def build(self, R: float) -> FrequencyProfile:
        return build_family(self.family, R, N=parse_n_rule(self.n_rule)(R))


CorpusEntry = Union[CorpusItem, FrequencyProfile]


def trivial_exponent(p: float) -> float:
    """R-exponent of the S-free bound: 3/(2p) - 1/4"""
    return 1.5 / p - 0.25


def holder_exponent(p_lo: float, p_mid: float, p_hi: float) -> float:
    """s in (0, 1) with 1/p_mid = (1 - s)/p_lo + s/p_hi"""
    if not p_lo < p_mid < p_hi:
        raise ValueError(f"need p_lo < p_mid < p_hi, got {p_lo}, {p_mid}, {p_hi}")
    return (1.0 / p_lo - 1.0 / p_mid) / (1.0 / p_lo - 1.0 / p_hi)


def holder_upper_bound(norm_lo: float, norm_hi: float, p_lo: float, p_mid: float, p_hi: float) -> float:
    """||g||_{p_mid} <= ||g||_{p_lo}^{1-s} ||g||_{p_hi}^s"""
    s = holder_exponent(p_lo, p_mid, p_hi)
    return norm_lo ** (1.0 - s) * norm_hi ** s


def holder_lower_bound(norm_lo: float, norm_mid: float, p_lo: float, p_mid: float, p_hi: float) -> float:
    """
    Lower bound on ||g||_{p_hi} from the two smaller exponents.

    Rearranges ||g||_{p_mid} <= ||g||_{p_lo}^{1-s} ||g||_{p_hi}^s; this is how
    a large L^2 mass on a small set forces a large L^p norm.
    """
    s = holder_exponent(p_lo, p_mid, p_hi)
    if norm_lo <= 0:
        return 0.0
    return (norm_mid / norm_lo ** (1.0 - s)) ** (1.0 / s)


@dataclass
class InequalityRow:
    label: str
    R: float
    p: float
    l2_norm: float
    band_ratio: float
    trivial_ratio: float


@dataclass
class InequalityReport:
    rows: List[InequalityRow]
    trivial_constant: float
    trivial_bound: float
    quadrature_slack: float
    skipped: List[str] = field(default_factory=list)

    @property
    def band_ok(self) -> bool:
        return all(r.band_ratio <= 1.0 + self.quadrature_slack for r in self.rows)

    @property
    def trivial_ok(self) -> bool:
        return self.trivial_constant <= self.trivial_bound

    @property
    def ok(self) -> bool:
        return self.band_ok and self.trivial_ok

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(r) for r in self.rows])

    def ratios(self, label: str, p: float) -> Dict[float, float]:
        """Trivial-bound ratio by R for one corpus entry and exponent"""
        return {r.R: r.trivial_ratio for r in self.rows if r.label == label and r.p == float(p)}


def _band_l2(f: FrequencyProfile, R: float, config: LabConfig) -> float:
    nx = int(np.ceil(2 * R)) + 1
    grid = SpaceTimeGrid(R=R, nx=nx, nt=BAND_NT, x_half=R, t_half=R)
    values = evaluate_field(f, grid, max_points=config.max_field_points, threads=config.threads)
    return weighted_l2_band(values, R)


def verify_fixed_inequalities(
    corpus: Sequence[CorpusEntry],
    R_list: Sequence[float],
    ps: Sequence[float] = (4.0, 6.0),
    config: Optional[LabConfig] = None,
    trivial_bound: float = DEFAULT_TRIVIAL_BOUND,
) -> InequalityReport:
    """
    Check the band bound and record the trivial-bound ratio for every
    corpus entry, R and p.

    Zero profiles are skipped with a note: both sides vanish.

    Args:
        corpus: CorpusItem entries (rebuilt per R) or fixed profiles
        R_list: Scales to check
        ps: Exponents of the trivial bound
        config: Budgets and quadrature slack
        trivial_bound: Ceiling asserted for the corpus-wide constant

    Returns:
        InequalityReport; trivial_constant is the largest ratio observed
    """
    config = config or LabConfig()
    integrator = BallNormIntegrator(
        points_per_axis=config.shell_points,
        inner_radius=config.shell_inner_radius,
        max_points=config.max_field_points,
        threads=config.threads,
    )
    rows: List[InequalityRow] = []
    skipped: List[str] = []
    for entry in corpus:
        for R in R_list:
            R = float(R)
            f = entry.build(R) if isinstance(entry, CorpusItem) else entry
            label = entry.label if isinstance(entry, CorpusItem) else f.label
            if f.is_zero():
                skipped.append(f"{label} at R={R:g}: zero profile")
                logger.info(f"Skipping zero profile '{label}' at R={R:g}")
                continue
            l2 = f.l2_norm()
            band_ratio = _band_l2(f, R, config) / (np.sqrt(2 * np.pi * 2 * R) * l2)
            norms = integrator.integrate(f, R, ps).norms
            for p in ps:
                ratio = norms[float(p)] / (R ** trivial_exponent(float(p)) * l2)
                rows.append(InequalityRow(label, R, float(p), l2, float(band_ratio), float(ratio)))
            if band_ratio > 1.0 + config.quadrature_slack:
                logger.error(f"Band bound fails for '{label}' at R={R:g}: ratio {band_ratio:.4f}")

    constant = max((r.trivial_ratio for r in rows), default=0.0)
    report = InequalityReport(rows, constant, trivial_bound, config.quadrature_slack, skipped)
    logger.info(
        f"Checked {len(rows)} (profile, R, p) cases: band ok={report.band_ok}, "
        f"trivial constant {constant:.4f} (bound {trivial_bound:g})"
    )
    return report
