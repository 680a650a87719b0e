"""
Wave packet decomposition of a frequency profile at scale R.

f is cut into pieces f_theta by a partition of unity of width R^{-1/2};
Ef_theta(., 0) is sampled on a spatial grid of spacing R^{1/2}/q, multiplied
by translates of gamma((x - v)/R^{1/2}) and transformed back to give the
packets f_{theta,v}. Coefficients come from the dyadic maximal function of
|Ef_theta(., 0)| at the lattice points v.
"""
from collections import OrderedDict
from collections.abc import Sequence as SequenceABC
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy import signal

from harmonic_core.chirp import chirp_sum
from harmonic_core.errors import DecompositionError, LocalizationError
from harmonic_core.extension import DEFAULT_MAX_POINTS, evaluate_field
from harmonic_core.profiles import FrequencyProfile
from harmonic_core.spacetime import SpaceTimeField, SpaceTimeGrid, Tube
from wave_packets.families import ramp_down
from wave_packets.gamma_window import GammaWindow, make_gamma
from wave_packets.maximal import maximal_function_all

MIN_SCALE = 64.0
SUPPORT_MULTIPLIER = 3.0
_G_CACHE_SIZE = 8

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PacketSettings:
    """Tolerances and discretization choices for a decomposition"""
    x_oversampling: int = 4
    window_half_width: int = 1024
    drop_threshold: float = 1e-8
    reconstruction_tolerance: float = 1e-6
    equivalence_bound: float = 16.0
    coefficient_bound: float = 8.0
    localization_bound: float = 1e3
    rescale_bound: float = 16.0
    gamma_plateau: float = 0.9
    gamma_mollifier: float = 0.1
    threads: int = 1
    validate: bool = True
    max_field_points: int = DEFAULT_MAX_POINTS


@dataclass(frozen=True, eq=False)
class FrequencyPiece:
    """Window of the frequency partition restricted to the index range [lo, hi]"""
    theta: float
    lo: int
    hi: int
    window: np.ndarray


@dataclass(frozen=True, eq=False)
class WavePacket:
    """One packet f_{theta,v}; its profile is derived on demand from the decomposition"""
    theta: float
    v: float
    coefficient: complex
    l2_norm: float
    scale: float
    profile: Optional[FrequencyProfile] = field(default=None, repr=False)
    source: Optional["Decomposition"] = field(default=None, repr=False)
    index: int = -1

    @property
    def packet_profile(self) -> FrequencyProfile:
        if self.profile is not None:
            return self.profile
        if self.source is None:
            raise DecompositionError("packet has neither a profile nor a source decomposition")
        return self.source.packet_profile(self.index)

    @property
    def support(self) -> Tuple[float, float]:
        half = SUPPORT_MULTIPLIER * self.scale ** -0.5
        return max(-1.0, self.theta - half), min(1.0, self.theta + half)

    @property
    def tube(self) -> Tube:
        return Tube(self.theta, self.v, self.scale)


class PacketList(SequenceABC):
    """Read-only view building WavePacket objects lazily"""

    def __init__(self, decomposition: "Decomposition"):
        self._decomposition = decomposition

    def __len__(self) -> int:
        return self._decomposition.packet_count

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        return self._decomposition.packet(index)


def frequency_partition(f: FrequencyProfile, R: float) -> List[FrequencyPiece]:
    """
    Smooth partition of unity on [-1, 1] with windows centred on R^{-1/2}Z.

    Only pieces overlapping the nonzero part of f are returned.
    """
    s = np.sqrt(R)
    h = 1.0 / s
    omega = f.omega
    f_lo, f_hi = f.nonzero_range()
    k_min = int(np.ceil(-s - 1e-9))
    k_max = int(np.floor(s + 1e-9))
    pieces = []
    for k in range(k_min, k_max + 1):
        theta = k * h
        lo = 0 if k == k_min else int(np.floor((theta - h + 1) / f.spacing))
        hi = f.M - 1 if k == k_max else int(np.ceil((theta + h + 1) / f.spacing))
        lo, hi = max(lo, f_lo, 0), min(hi, f_hi, f.M - 1)
        if hi < lo:
            continue
        w = omega[lo:hi + 1]
        window = ramp_down(np.abs(w - theta) * s)
        if k == k_min:
            window = np.where(w < theta, 1.0, window)
        if k == k_max:
            window = np.where(w > theta, 1.0, window)
        if not np.any(window * f.samples[lo:hi + 1]):
            continue
        pieces.append(FrequencyPiece(theta=theta, lo=lo, hi=hi, window=window))
    return pieces


def regroup_pieces(
    f: FrequencyProfile, fine_R: float, coarse_R: float
) -> List[FrequencyPiece]:
    """Merge the fine-scale partition into coarse-scale groups K_theta (nearest coarse theta)"""
    h_coarse = coarse_R ** -0.5
    groups: Dict[int, List[FrequencyPiece]] = {}
    for piece in frequency_partition(f, fine_R):
        # ties go to the lower coarse direction
        k = int(np.ceil(piece.theta / h_coarse - 0.5 - 1e-9))
        groups.setdefault(k, []).append(piece)
    merged = []
    for k in sorted(groups):
        members = groups[k]
        lo = min(p.lo for p in members)
        hi = max(p.hi for p in members)
        window = np.zeros(hi - lo + 1)
        for p in members:
            window[p.lo - lo:p.hi - lo + 1] += p.window
        merged.append(FrequencyPiece(theta=k * h_coarse, lo=lo, hi=hi, window=window))
    return merged


class Decomposition:
    """
    Packets {(theta, v, c, f_{theta,v})} of a profile at scale R with the
    summary statistics M, S and the measured constants of the decomposition.
    """

    def __init__(
        self,
        profile: FrequencyProfile,
        R: float,
        pieces: List[FrequencyPiece],
        piece_index: np.ndarray,
        lattice_index: np.ndarray,
        coefficients: np.ndarray,
        norms: np.ndarray,
        settings: PacketSettings,
        gamma: GammaWindow,
        dropped_mass: float = 0.0,
    ):
        self.profile = profile
        self.R = float(R)
        self.pieces = pieces
        self.piece_index = np.asarray(piece_index, dtype=int)
        self.lattice_index = np.asarray(lattice_index, dtype=int)
        self.coefficients = np.asarray(coefficients, dtype=complex)
        self.norms = np.asarray(norms, dtype=float)
        self.settings = settings
        self.gamma = gamma
        self.dropped_mass = float(dropped_mass)
        self.logger = logging.getLogger(__name__)

        self.s = np.sqrt(self.R)
        self.dx = self.s / settings.x_oversampling
        period = 2 * np.pi / profile.spacing
        self.j_max = int(np.floor((0.5 * period - self.dx) / self.s))
        self.m_max = self.j_max * settings.x_oversampling
        self.thetas = np.array([pieces[i].theta for i in self.piece_index]) if len(self.piece_index) else np.zeros(0)
        self.vs = (self.lattice_index - self.j_max) * self.s

        self.f_l2 = profile.l2_norm()
        self.M = float(self.norms.max()) if self.norms.size else 0.0
        self.S = self.M / self.f_l2 if self.f_l2 > 0 else 0.0
        self.equivalence_constant = (
            float(np.sum(np.abs(self.coefficients) ** 2)) / self.f_l2 ** 2 if self.f_l2 > 0 else 0.0
        )
        self.coefficient_constant = (
            float(np.max(np.abs(self.coefficients))) / self.M if self.M > 0 else 0.0
        )
        self.reconstruction_error: Optional[float] = None
        self.rescale_constant: Optional[float] = None
        self._g_cache: "OrderedDict[int, np.ndarray]" = OrderedDict()

    # ------------------------------------------------------------------ geometry

    @property
    def packet_count(self) -> int:
        return int(self.coefficients.size)

    @property
    def packets(self) -> PacketList:
        return PacketList(self)

    @property
    def x_grid(self) -> np.ndarray:
        return np.arange(-self.m_max, self.m_max + 1) * self.dx

    def packet(self, index: int) -> WavePacket:
        if index < 0:
            index += self.packet_count
        if not 0 <= index < self.packet_count:
            raise IndexError(f"packet index {index} out of range")
        return WavePacket(
            theta=float(self.thetas[index]),
            v=float(self.vs[index]),
            coefficient=complex(self.coefficients[index]),
            l2_norm=float(self.norms[index]),
            scale=self.R,
            source=self,
            index=index,
        )

    def dominant_packet(self) -> WavePacket:
        return self.packet(int(np.argmax(self.norms)))

    def tubes(self, width_multiplier: float = 1.0) -> List[Tube]:
        return [
            Tube(float(th), float(v), self.R, width_multiplier)
            for th, v in zip(self.thetas, self.vs)
        ]

    def tubes_through(self, x: float, t: float, width_multiplier: float = 1.0) -> np.ndarray:
        """Indices of packets whose (enlarged) tube contains (x, t)"""
        distance = np.abs(x - self.vs - self.thetas * t)
        return np.flatnonzero(distance <= width_multiplier * self.s * (1 + 1e-12))

    def piece_field(self, piece_id: int) -> np.ndarray:
        """Ef_theta(x_m, 0) on the spatial grid, cached"""
        if piece_id in self._g_cache:
            self._g_cache.move_to_end(piece_id)
            return self._g_cache[piece_id]
        g = _piece_field(self.profile, self.pieces[piece_id], self.m_max, self.dx)
        self._g_cache[piece_id] = g
        if len(self._g_cache) > _G_CACHE_SIZE:
            self._g_cache.popitem(last=False)
        return g

    def _window_table(self) -> np.ndarray:
        return self.gamma.table(self.settings.x_oversampling, self.settings.window_half_width)

    def _band(self, theta: float) -> Tuple[int, int]:
        half = SUPPORT_MULTIPLIER / self.s
        f = self.profile
        lo = max(0, int(np.ceil((theta - half + 1) / f.spacing - 1e-9)))
        hi = min(f.M - 1, int(np.floor((theta + half + 1) / f.spacing + 1e-9)))
        return lo, hi

    # ------------------------------------------------------------------ packets

    def packet_profile(self, index: int) -> FrequencyProfile:
        """f_{theta,v} on the profile grid, zero outside theta +- 3 R^{-1/2}"""
        piece_id = int(self.piece_index[index])
        theta = self.pieces[piece_id].theta
        g = self.piece_field(piece_id)
        table = self._window_table()
        q = self.settings.x_oversampling
        centre = int(self.lattice_index[index]) * q
        half = (table.size - 1) // 2
        start, stop = max(0, centre - half), min(g.size, centre + half + 1)
        windowed = g[start:stop] * table[start - centre + half:stop - centre + half]

        lo, hi = self._band(theta)
        f = self.profile
        values = np.zeros(f.M, dtype=complex)
        x_start = (start - self.m_max) * self.dx
        band = chirp_sum(windowed, x_start, self.dx, f.omega[lo], f.spacing, hi - lo + 1, sign=-1)
        values[lo:hi + 1] = band * self.dx / (2 * np.pi) / f.weights[lo:hi + 1]
        return FrequencyProfile(
            values,
            label=f"packet(theta={theta:.4g},v={self.vs[index]:.4g})",
            support=(f.omega[lo], f.omega[hi]),
        )

    def packet_values_at(self, x: float, t: float) -> np.ndarray:
        """
        Ef_{theta,v}(x, t) for every packet.

        Uses Ef_{theta,v}(x,t) = dx * sum_m G(x_m) gamma((x_m - v)/s) K_t(x - x_m)
        with K_t the propagator restricted to the packet band.
        """
        out = np.zeros(self.packet_count, dtype=complex)
        f = self.profile
        table = self._window_table()
        q = self.settings.x_oversampling
        n = 2 * self.m_max + 1
        for piece_id in np.unique(self.piece_index):
            members = np.flatnonzero(self.piece_index == piece_id)
            theta = self.pieces[piece_id].theta
            lo, hi = self._band(theta)
            omega = f.omega[lo:hi + 1]
            kernel = chirp_sum(
                np.exp(1j * omega * omega * t),
                omega[0], f.spacing, x + self.m_max * self.dx, -self.dx, n, sign=1,
            ) * (f.spacing / (2 * np.pi))
            weighted = self.piece_field(piece_id) * kernel * self.dx
            smoothed = signal.fftconvolve(weighted, table, mode="same")
            out[members] = smoothed[self.lattice_index[members] * q]
        return out

    def subset(self, keep: np.ndarray) -> "Decomposition":
        """Decomposition restricted to the packets selected by a mask or index array"""
        keep = np.asarray(keep)
        if keep.dtype == bool:
            keep = np.flatnonzero(keep)
        dropped = float(self.norms.sum() - self.norms[keep].sum())
        sub = Decomposition(
            self.profile, self.R, self.pieces,
            self.piece_index[keep], self.lattice_index[keep],
            self.coefficients[keep], self.norms[keep],
            self.settings, self.gamma, self.dropped_mass + dropped,
        )
        sub._g_cache = self._g_cache
        return sub

    # ------------------------------------------------------------------ checks

    def reconstruct(self) -> np.ndarray:
        """Samples of sum_{theta,v} f_{theta,v} on the profile grid"""
        f = self.profile
        table = self._window_table()
        q = self.settings.x_oversampling
        total = np.zeros(f.M, dtype=complex)
        for piece_id in np.unique(self.piece_index):
            members = np.flatnonzero(self.piece_index == piece_id)
            comb = np.zeros(2 * self.m_max + 1)
            comb[self.lattice_index[members] * q] = 1.0
            coverage = signal.fftconvolve(comb, table, mode="same")
            h = self.piece_field(piece_id) * coverage
            lo, hi = self._band(self.pieces[piece_id].theta)
            band = chirp_sum(h, -self.m_max * self.dx, self.dx, f.omega[lo], f.spacing, hi - lo + 1, sign=-1)
            total[lo:hi + 1] += band * self.dx / (2 * np.pi) / f.weights[lo:hi + 1]
        return total

    def measure_reconstruction(self) -> float:
        f = self.profile
        diff = self.reconstruct() - f.samples
        error = float(np.sqrt(f.spacing * np.sum(f.weights * np.abs(diff) ** 2)))
        self.reconstruction_error = error
        return error

    def validate(self) -> None:
        """Raise DecompositionError when a decomposition contract fails"""
        st = self.settings
        if not 0 < self.S <= 1 + 1e-6:
            raise DecompositionError(f"S={self.S} outside (0, 1]")
        error = self.measure_reconstruction()
        allowed = st.reconstruction_tolerance * self.f_l2 + self.dropped_mass
        if error > allowed:
            raise DecompositionError(
                f"reconstruction error {error:.3e} exceeds {allowed:.3e} (|f|_2={self.f_l2:.3e})"
            )
        lo, hi = 1.0 / st.equivalence_bound, st.equivalence_bound
        if not lo <= self.equivalence_constant <= hi:
            raise DecompositionError(
                f"sum |c|^2 / |f|^2 = {self.equivalence_constant:.3f} outside [{lo}, {hi}]"
            )
        if self.coefficient_constant > st.coefficient_bound:
            raise DecompositionError(
                f"max |c| / M = {self.coefficient_constant:.3f} exceeds {st.coefficient_bound}"
            )

    def summary(self) -> Dict[str, float]:
        return {
            "R": self.R,
            "f_l2": self.f_l2,
            "M": self.M,
            "S": self.S,
            "K": self.packet_count,
            "equivalence_constant": self.equivalence_constant,
            "coefficient_constant": self.coefficient_constant,
            "reconstruction_error": self.reconstruction_error,
            "dropped_mass": self.dropped_mass,
        }

    def to_dict(self) -> dict:
        half = SUPPORT_MULTIPLIER / self.s
        document = {k: v for k, v in self.summary().items()}
        document["packets"] = [
            {
                "theta": float(th),
                "v": float(v),
                "c_re": float(c.real),
                "c_im": float(c.imag),
                "support": [max(-1.0, th - half), min(1.0, th + half)],
            }
            for th, v, c in zip(self.thetas, self.vs, self.coefficients)
        ]
        return document


def _piece_field(
    f: FrequencyProfile, piece: FrequencyPiece, m_max: int, dx: float
) -> np.ndarray:
    """Ef_theta(x_m, 0) for x_m = m*dx, |m| <= m_max"""
    weighted = f.weighted_samples()[piece.lo:piece.hi + 1] * piece.window
    return chirp_sum(
        weighted, f.omega[piece.lo], f.spacing, -m_max * dx, dx, 2 * m_max + 1, sign=1
    )


class WavePacketDecomposer:
    """Builds decompositions with a fixed set of PacketSettings"""

    def __init__(self, settings: Optional[PacketSettings] = None):
        self.settings = settings or PacketSettings()
        self.gamma = make_gamma(self.settings.gamma_plateau, self.settings.gamma_mollifier)
        self.logger = logging.getLogger(__name__)

    def decompose(
        self,
        f: FrequencyProfile,
        R: float,
        pieces: Optional[List[FrequencyPiece]] = None,
    ) -> Decomposition:
        """
        Decompose f at scale R.

        Args:
            f: Nonzero profile with M >= 8 R^{1/2}
            R: Scale, R >= 64
            pieces: Precomputed frequency pieces (regrouped partitions)

        Returns:
            Decomposition (validated unless settings.validate is False)
        """
        st = self.settings
        if R < MIN_SCALE:
            raise DecompositionError(f"scale R={R} is below the minimum {MIN_SCALE}")
        if f.is_zero():
            raise DecompositionError("cannot decompose an all-zero f")
        s = np.sqrt(R)
        if f.M < 8 * s:
            raise DecompositionError(f"profile with M={f.M} does not resolve R^(1/2)={s:.1f}")

        pieces = pieces if pieces is not None else frequency_partition(f, R)
        q = st.x_oversampling
        dx = s / q
        j_max = int(np.floor((np.pi / f.spacing - dx) / s))
        if j_max < 1:
            raise DecompositionError(f"profile period too short for packets at R={R}")
        m_max = j_max * q
        table = self.gamma.table(q, st.window_half_width)
        root_scale = R ** 0.25 / np.sqrt(2 * np.pi)
        lattice = np.arange(2 * j_max + 1) * q

        def analyse(piece_id: int) -> Tuple[np.ndarray, np.ndarray]:
            g = _piece_field(f, pieces[piece_id], m_max, dx)
            magnitude = np.abs(g)
            maximal = maximal_function_all(magnitude)[lattice]
            phase = g[lattice] / np.where(magnitude[lattice] > 0, magnitude[lattice], 1.0)
            phase = np.where(magnitude[lattice] > 0, phase, 1.0)
            energy = signal.fftconvolve(magnitude ** 2, table ** 2, mode="same")[lattice]
            norms = np.sqrt(np.clip(energy, 0.0, None) * dx / (2 * np.pi))
            return root_scale * maximal * phase, norms

        ids = list(range(len(pieces)))
        if st.threads > 1 and len(ids) > 1:
            with ThreadPoolExecutor(max_workers=st.threads) as pool:
                results = list(pool.map(analyse, ids))
        else:
            results = [analyse(i) for i in ids]

        coefficients = np.concatenate([r[0] for r in results])
        norms = np.concatenate([r[1] for r in results])
        piece_index = np.repeat(np.arange(len(pieces)), lattice.size)
        lattice_index = np.tile(np.arange(lattice.size), len(pieces))

        c_max = np.max(np.abs(coefficients))
        m_value = np.max(norms)
        keep = (np.abs(coefficients) >= st.drop_threshold * c_max) & (
            norms >= st.drop_threshold * m_value
        )
        dropped = float(norms[~keep].sum())
        self.logger.info(
            f"Decomposed '{f.label}' at R={R:g}: {len(pieces)} directions, "
            f"{int(keep.sum())} packets kept of {keep.size}"
        )
        decomposition = Decomposition(
            f, R, pieces,
            piece_index[keep], lattice_index[keep],
            coefficients[keep], norms[keep],
            st, self.gamma, dropped,
        )
        if st.validate:
            decomposition.validate()
            self.logger.info(
                f"R={R:g}: S={decomposition.S:.4e}, sum|c|^2/|f|^2={decomposition.equivalence_constant:.3f}, "
                f"max|c|/M={decomposition.coefficient_constant:.3f}, "
                f"reconstruction={decomposition.reconstruction_error:.2e}"
            )
        return decomposition

    def packet_field(
        self, packet: WavePacket, grid: SpaceTimeGrid
    ) -> Tuple[SpaceTimeField, float]:
        """Ef_{theta,v} on a grid with the measured localization constant C_4"""
        profile = packet.packet_profile
        field_values = evaluate_field(profile, grid, max_points=self.settings.max_field_points)
        magnitude = field_values.magnitude()
        if not np.any(magnitude):
            return field_values, 0.0
        scale = packet.scale
        amplitude = scale ** -0.25 * abs(packet.coefficient)
        if amplitude == 0:
            raise LocalizationError("nonzero packet field with zero coefficient")
        xx, tt = grid.mesh()
        distance = np.abs(xx - packet.v - packet.theta * tt)
        constant = float(np.max(magnitude * (1 + distance / np.sqrt(scale)) ** 4) / amplitude)
        if not np.isfinite(constant) or constant > self.settings.localization_bound:
            raise LocalizationError(
                f"localization constant {constant:.3e} exceeds {self.settings.localization_bound:.1e}"
            )
        return field_values, constant


def decompose(
    f: FrequencyProfile, R: float, settings: Optional[PacketSettings] = None
) -> Decomposition:
    return WavePacketDecomposer(settings).decompose(f, R)


def packet_field(
    packet: WavePacket, grid: SpaceTimeGrid, settings: Optional[PacketSettings] = None
) -> SpaceTimeField:
    """Ef_{theta,v} on the grid; raises LocalizationError when C_4 exceeds its bound"""
    field_values, _ = WavePacketDecomposer(settings).packet_field(packet, grid)
    return field_values


def localization_constant(
    packet: WavePacket, grid: SpaceTimeGrid, settings: Optional[PacketSettings] = None
) -> float:
    return WavePacketDecomposer(settings).packet_field(packet, grid)[1]


def tail_sum(decomp: Decomposition, x: float, t: float, delta: float) -> float:
    """
    Sum of |Ef_{theta,v}(x,t)| over packets whose R^{1+delta} tube misses (x, t).
    """
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    values = decomp.packet_values_at(x, t)
    distance = np.abs(x - decomp.vs - decomp.thetas * t)
    outside = distance > decomp.R ** ((1 + delta) / 2)
    return float(np.sum(np.abs(values[outside])))


def rescale_decomposition(
    decomp: Decomposition, R1: float, settings: Optional[PacketSettings] = None
) -> Decomposition:
    """
    Decompose the same profile at a coarser scale R1 by grouping the fine
    frequency pieces, and record C in max|c_new| <= C (R2/R1)^{1/4} max|c_old|.
    """
    R2 = decomp.R
    ratio = R2 / R1
    root = np.sqrt(ratio)
    if ratio < 1 - 1e-12 or abs(root - round(root)) > 1e-9 * max(1.0, root):
        raise DecompositionError(f"(R2/R1)^(1/2) = {root} is not a positive integer")
    settings = settings or decomp.settings
    decomposer = WavePacketDecomposer(settings)
    if round(root) == 1:
        coarse = decomposer.decompose(decomp.profile, R2)
    else:
        pieces = regroup_pieces(decomp.profile, R2, R1)
        coarse = decomposer.decompose(decomp.profile, R1, pieces=pieces)
    old_max = float(np.max(np.abs(decomp.coefficients)))
    new_max = float(np.max(np.abs(coarse.coefficients)))
    constant = new_max / (ratio ** 0.25 * old_max)
    coarse.rescale_constant = constant
    if constant > settings.rescale_bound:
        raise DecompositionError(
            f"rescaled coefficients grow by C={constant:.3f} > {settings.rescale_bound}"
        )
    logger.info(f"Rescaled R={R2:g} -> {R1:g}: C={constant:.4f}")
    return coarse


@dataclass
class TruncationResult:
    """Packets whose R^{1+delta} tube meets B_R, and what was discarded"""
    decomposition: Decomposition
    kept: int
    discarded: int
    discarded_mass: float


def truncate_to_ball(decomp: Decomposition, delta: float) -> TruncationResult:
    """Keep the packets whose enlarged tube |x - v - theta t| <= R^{(1+delta)/2} meets B_R"""
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    width = decomp.R ** ((1 + delta) / 2)
    reach = decomp.R * np.sqrt(1 + decomp.thetas ** 2) + width
    keep = np.abs(decomp.vs) <= reach
    kept = decomp.subset(keep)
    discarded = float(decomp.norms[~keep].sum())
    return TruncationResult(kept, int(keep.sum()), int((~keep).sum()), discarded)


def packet_count(decomp: Decomposition) -> int:
    """K(f): number of packets kept by the decomposition"""
    return decomp.packet_count


def with_settings(settings: PacketSettings, **changes) -> PacketSettings:
    return replace(settings, **changes)
