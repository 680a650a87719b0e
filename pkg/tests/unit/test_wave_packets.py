"""
Tests for example families, the gamma window, the dyadic maximal function
and the wave packet decomposition
"""
import pytest
import numpy as np
import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from harmonic_core.errors import DecompositionError, ProfileError
from harmonic_core.extension import evaluate_extension
from harmonic_core.profiles import make_profile, zero_profile
from harmonic_core.spacetime import SpaceTimeGrid
from wave_packets.decomposition import (
    PacketSettings, WavePacket, WavePacketDecomposer, decompose, frequency_partition,
    packet_count, packet_field, regroup_pieces, rescale_decomposition, tail_sum,
    truncate_to_ball
)
from wave_packets.families import (
    BumpSpec, build_family, largest_admissible_n, make_bundle, make_f0, make_f1,
    make_many, make_star, ramp_down, star_plateau
)
from wave_packets.gamma_window import GammaWindow, make_gamma
from wave_packets.maximal import dyadic_radii, maximal_function, maximal_function_all


class TestFamilies:
    """Test the example profiles against their plateau and support clauses"""

    def test_ramp_is_complementary(self):
        u = np.linspace(0, 1, 101)
        assert np.allclose(ramp_down(u) + ramp_down(1 - u), 1.0, atol=1e-14)
        assert ramp_down(np.array([-0.5]))[0] == 1.0
        assert ramp_down(np.array([1.5]))[0] == 0.0

    def test_bump_spec_validation(self):
        with pytest.raises(ProfileError):
            BumpSpec(0.0, 0.5, 0.4)
        with pytest.raises(ProfileError):
            BumpSpec(0.9, 0.1, 0.2)

    def test_f0(self):
        f = make_f0(4096)
        assert f.value_at(0.0).real == pytest.approx(1.0)
        assert f.value_at(1.0) == 0j and f.value_at(-1.0) == 0j
        assert 1.0 <= f.l2_norm() <= np.sqrt(2.0)

    @pytest.mark.parametrize("R", [256.0, 1024.0])
    def test_f1(self, R):
        f = make_f1(R)
        h = R ** -0.5
        assert f.value_at(0.0).real == pytest.approx(1.0)
        assert f.value_at(3 * h) == 0j
        assert np.sqrt(2.0) <= f.l2_norm() * R ** 0.25 <= 2.0

    def test_many(self):
        U = 1.0 / 32
        f = make_many(U, R=256.0)
        assert f.value_at(0.0).real == pytest.approx(1.0)
        assert f.value_at(2 * U) == 0j
        assert np.sqrt(U) <= f.l2_norm() <= np.sqrt(2 * U)
        with pytest.raises(ProfileError):
            make_many(1.5)

    @pytest.mark.parametrize("N", [2, 3, 15])
    def test_bundle_plateaus_and_gaps(self, N):
        R = 256.0
        h = R ** -0.5
        f = make_bundle(R, N)
        for n in range(-N, N + 1):
            assert f.value_at(n * h).real == pytest.approx(1.0)
        for n in range(-N, N):
            assert abs(f.value_at((n + 0.5) * h)) <= 1e-6
        assert 0.5 <= f.l2_norm() * R ** 0.25 <= 2.0

    def test_bundle_must_fit(self):
        with pytest.raises(ProfileError):
            make_bundle(256.0, 16)
        with pytest.raises(ProfileError):
            make_bundle(256.0, 0)

    @pytest.mark.parametrize("N", [1, 4, 15])
    def test_star_plateau_is_exact(self, N):
        R = 256.0
        f = make_star(R, N)
        edge = 0.9 * star_plateau(R, N)
        for w in np.linspace(-edge, edge, 20):
            assert abs(f.value_at(w) - 1.0) <= 1e-10

    def test_star_integral(self):
        R, N = 256.0, 7
        h = R ** -0.5
        value = evaluate_extension(make_star(R, N), 0.0, 0.0)
        assert abs(value.imag) <= 1e-12
        assert value.real == pytest.approx((2 * N + 1) * h, rel=1e-3)
        assert value.real <= (2 * N + 2) * h

    def test_profiles_are_real_even_and_bounded(self):
        for f in (make_many(1 / 32), make_bundle(256.0, 5), make_star(256.0, 5)):
            assert np.all(f.samples.imag == 0)
            assert np.allclose(f.samples, f.samples[::-1], atol=1e-12)
            assert np.max(np.abs(f.samples)) <= 1.0 + 1e-12

    def test_largest_admissible_n(self):
        assert largest_admissible_n(256.0) == 15
        assert largest_admissible_n(1024.0) == 31
        assert largest_admissible_n(4.0) == 1
        make_bundle(4096.0, largest_admissible_n(4096.0))
        make_star(4096.0, largest_admissible_n(4096.0))

    def test_build_family(self):
        assert build_family("bundle", 256.0).label == "bundle(R=256,N=15)"
        assert build_family("star", 256.0, N=2).label == "star(R=256,N=2)"
        with pytest.raises(ProfileError):
            build_family("comet", 256.0)


class TestGammaWindow:
    """Test the window whose integer translates sum to one"""

    def setup_method(self):
        self.gamma = make_gamma()

    def test_hat_normalization_and_support(self):
        assert self.gamma.hat(np.array(0.0)) == pytest.approx(1.0, abs=1e-14)
        assert self.gamma.hat(np.array(1.5)) == 0.0
        assert self.gamma.hat(np.array(-1.0)) == pytest.approx(0.0, abs=1e-14)

    def test_poisson_sum(self):
        assert self.gamma.poisson_sum(0.37, 4096) == pytest.approx(1.0, abs=1e-8)

    def test_short_poisson_sum_is_close(self):
        assert self.gamma.poisson_sum(0.37, 64) == pytest.approx(1.0, abs=5e-2)

    def test_table_is_cached(self):
        first = self.gamma.table(4, 8)
        assert first is self.gamma.table(4, 8)
        assert first.size == 65
        assert first[32] == pytest.approx(0.9 / np.pi, rel=1e-12)

    def test_support_radius_limit(self):
        with pytest.raises(ValueError):
            GammaWindow(plateau=0.95, mollifier=0.1)


class TestMaximalFunction:
    """Test the dyadic Hardy-Littlewood maximal function"""

    def test_constant(self):
        g = np.full(100, 2.5)
        assert np.allclose(maximal_function_all(g), 2.5)
        assert maximal_function(g, 0) == pytest.approx(2.5)

    def test_spike(self):
        g = np.zeros(64)
        g[20] = 3.0
        assert maximal_function(g, 20) == 3.0

    def test_indicator_away_from_support(self):
        x = np.linspace(-8, 8, 1025)
        g = ((x >= 0) & (x <= 1)).astype(float)
        index = int(np.argmin(np.abs(x - 2.0)))
        assert maximal_function(g, index) == pytest.approx(0.25, rel=0.05)
        assert maximal_function_all(g)[index] == pytest.approx(maximal_function(g, index))

    def test_dominates_the_function(self):
        g = np.abs(np.random.default_rng(2).normal(size=300))
        assert np.all(maximal_function_all(g) >= g)

    def test_radii(self):
        assert list(dyadic_radii(8)) == [0, 1, 2, 4, 8]

    def test_invalid_input(self):
        with pytest.raises(ValueError):
            maximal_function_all(np.array([]))
        with pytest.raises(ValueError):
            maximal_function_all(np.array([1.0, -1.0]))
        with pytest.raises(IndexError):
            maximal_function(np.ones(4), 4)


class TestFrequencyPartition:
    """Test the partition of unity behind f_theta"""

    def test_windows_sum_to_one(self):
        f = make_profile(np.ones(1024))
        total = np.zeros(f.M)
        for piece in frequency_partition(f, 256.0):
            total[piece.lo:piece.hi + 1] += piece.window
        assert np.allclose(total, 1.0, atol=1e-12)

    def test_only_pieces_meeting_f(self):
        thetas = [p.theta for p in frequency_partition(make_f1(256.0), 256.0)]
        assert min(thetas) >= -2 / 16 - 1e-12
        assert max(thetas) <= 2 / 16 + 1e-12

    def test_regrouped_windows_still_sum_to_one(self):
        f = make_profile(np.ones(2048))
        total = np.zeros(f.M)
        groups = regroup_pieces(f, 1024.0, 256.0)
        for piece in groups:
            total[piece.lo:piece.hi + 1] += piece.window
        assert np.allclose(total, 1.0, atol=1e-12)
        assert all(abs(p.theta * 16 - round(p.theta * 16)) < 1e-9 for p in groups)


class TestDecomposition:
    """Test the size-R decomposition on the example families"""

    def setup_method(self):
        self.R = 256.0
        self.decomposer = WavePacketDecomposer(PacketSettings())
        self.f1 = make_f1(self.R)
        self.d1 = self.decomposer.decompose(self.f1, self.R)

    def test_contracts_hold(self):
        d = self.d1
        assert 0 < d.S <= 1 + 1e-6
        assert d.reconstruction_error <= 1e-6 * d.f_l2 + d.dropped_mass
        assert 1 / 16 <= d.equivalence_constant <= 16
        assert d.coefficient_constant <= 8

    def test_single_packet_profile(self):
        d = self.d1
        dominant = d.dominant_packet()
        assert dominant.theta == pytest.approx(0.0, abs=1e-12)
        assert dominant.v == pytest.approx(0.0, abs=1e-9)
        assert d.S >= 0.05

    def test_single_packet_S_is_scale_free(self):
        other = self.decomposer.decompose(make_f1(1024.0), 1024.0)
        assert 0.5 <= other.S / self.d1.S <= 2.0

    def test_f0_concentration(self):
        d = self.decomposer.decompose(make_f0(), self.R)
        assert 1 / 16 <= d.S * self.R ** 0.25 <= 16

    def test_bundle_concentration(self):
        N = largest_admissible_n(self.R)
        d = self.decomposer.decompose(make_bundle(self.R, N), self.R)
        assert 1 / 16 <= d.S * N <= 16

    def test_star_concentration(self):
        N = largest_admissible_n(self.R)
        d = self.decomposer.decompose(make_star(self.R, N), self.R)
        assert 1 / 16 <= d.S * np.sqrt(N) <= 16

    def test_packet_support_clause(self):
        d = self.d1
        h = self.R ** -0.5
        for index in np.argsort(-d.norms)[:5]:
            packet = d.packet(int(index))
            profile = packet.packet_profile
            lo, hi = profile.nonzero_range()
            assert profile.omega[lo] >= packet.theta - 3 * h - 1e-12
            assert profile.omega[hi] <= packet.theta + 3 * h + 1e-12

    def test_packet_norms_match_profiles(self):
        d = self.d1
        index = int(np.argmax(d.norms))
        assert d.packet_profile(index).l2_norm() == pytest.approx(d.norms[index], rel=1e-3)

    def test_S_invariant_under_scalar_multiple(self):
        scaled = self.decomposer.decompose(self.f1.scaled(2.5 * np.exp(0.7j)), self.R)
        assert scaled.S == pytest.approx(self.d1.S, rel=1e-12)

    def test_packets_sum_to_extension(self):
        d = self.d1
        for x, t in [(0.0, 0.0), (37.0, -120.0), (-200.0, 90.0)]:
            total = np.sum(d.packet_values_at(x, t))
            assert abs(total - evaluate_extension(self.f1, x, t)) <= 1e-5 * self.f1.l1_norm()

    def test_zero_profile_rejected(self):
        with pytest.raises(DecompositionError, match="all-zero"):
            self.decomposer.decompose(zero_profile(1024), self.R)

    def test_small_scale_rejected(self):
        with pytest.raises(DecompositionError):
            self.decomposer.decompose(self.f1, 16.0)

    def test_unresolved_scale_rejected(self):
        with pytest.raises(DecompositionError):
            self.decomposer.decompose(make_profile(np.ones(64)), 256.0)

    def test_views_and_serialization(self):
        d = self.d1
        assert packet_count(d) == len(d.packets) == d.packet_count
        document = d.to_dict()
        assert document["S"] == d.S
        assert len(document["packets"]) == d.packet_count
        assert set(document["packets"][0]) == {"theta", "v", "c_re", "c_im", "support"}
        through = d.tubes_through(0.0, 0.0)
        assert int(np.argmax(d.norms)) in set(through.tolist())
        assert len(d.tubes()) == d.packet_count

    def test_module_level_decompose(self):
        d = decompose(self.f1, self.R)
        assert d.S == pytest.approx(self.d1.S, rel=1e-12)


class TestPacketFields:
    """Test packet fields, tail sums, truncation and rescaling"""

    def setup_method(self):
        self.R = 256.0
        self.decomposer = WavePacketDecomposer()
        self.d = self.decomposer.decompose(make_f1(self.R), self.R)

    def test_localization_constant(self):
        packet = self.d.dominant_packet()
        grid = SpaceTimeGrid(R=160.0, nx=321, nt=33, x_half=160.0, t_half=160.0)
        field, constant = self.decomposer.packet_field(packet, grid)
        amplitude = self.R ** -0.25 * abs(packet.coefficient)
        core = abs(field.value_at(packet.v, 0.0))
        assert 1e-2 * amplitude <= core <= 1e2 * amplitude
        assert np.isfinite(constant) and constant <= 1e3
        xx, tt = grid.mesh()
        far = np.abs(xx - packet.v - packet.theta * tt) >= 10 * np.sqrt(self.R)
        if np.any(far):
            assert np.max(field.magnitude()[far]) <= constant * amplitude * 11.0 ** -4 * (1 + 1e-9)

    def test_zero_packet_field(self):
        packet = WavePacket(theta=0.0, v=0.0, coefficient=0j, l2_norm=0.0, scale=256.0,
                            profile=zero_profile(1024))
        grid = SpaceTimeGrid(R=64.0, nx=33, nt=9, x_half=64.0, t_half=64.0)
        assert packet_field(packet, grid).max_abs() == 0.0

    def test_tail_sum_on_tube_core(self):
        index = int(np.argmax(self.d.norms))
        single = self.d.subset(np.array([index]))
        packet = single.packet(0)
        assert tail_sum(single, packet.v, 0.0, 0.2) == 0.0

    def test_tail_sum_monotone_in_delta(self):
        d = decompose(make_f0(), self.R)
        narrow = tail_sum(d, 0.0, 0.0, 0.2)
        wide = tail_sum(d, 0.0, 0.0, 0.4)
        assert 0.0 <= wide <= narrow
        with pytest.raises(ValueError):
            tail_sum(d, 0.0, 0.0, 0.0)

    def test_truncate_to_ball(self):
        result = truncate_to_ball(self.d, 0.5)
        assert result.kept + result.discarded == self.d.packet_count
        assert result.decomposition.packet_count == result.kept
        assert result.discarded_mass >= 0.0
        reach = self.R * np.sqrt(2.0) + self.R ** 0.75
        assert np.all(np.abs(result.decomposition.vs) <= reach + 1e-9)

    def test_rescale_identity(self):
        same = rescale_decomposition(self.d, self.R)
        assert np.allclose(same.coefficients, self.d.coefficients)
        assert same.rescale_constant == pytest.approx(1.0)

    def test_rescale_single_packet(self):
        fine = decompose(make_f1(1024.0), 1024.0)
        coarse = rescale_decomposition(fine, 256.0)
        assert coarse.R == 256.0
        assert 0 < coarse.rescale_constant <= 16
        assert np.max(np.abs(coarse.coefficients)) <= (
            coarse.rescale_constant * np.sqrt(2.0) * np.max(np.abs(fine.coefficients)) * (1 + 1e-12)
        )

    def test_rescale_needs_square_ratio(self):
        with pytest.raises(DecompositionError):
            rescale_decomposition(self.d, 128.0)
        with pytest.raises(DecompositionError):
            rescale_decomposition(self.d, 1024.0)

    @pytest.mark.slow
    def test_rescale_bundle(self):
        R = 4096.0
        fine = decompose(make_bundle(R, 8), R)
        coarse = rescale_decomposition(fine, R / 16)
        assert coarse.rescale_constant <= 16


@pytest.mark.slow
class TestDecompositionCorpus:
    """Decomposition contracts across the corpus at desk scale"""

    @pytest.mark.parametrize("R", [256.0, 1024.0, 4096.0])
    @pytest.mark.parametrize("family", ["f0", "f1", "many", "bundle", "star"])
    def test_corpus(self, family, R):
        d = decompose(build_family(family, R), R)
        assert d.reconstruction_error <= 1e-6 * d.f_l2 + d.dropped_mass
        assert 1 / 16 <= d.equivalence_constant <= 16
        assert d.coefficient_constant <= 8
        N = largest_admissible_n(R)
        if family == "f0":
            assert 1 / 16 <= d.S * R ** 0.25 <= 16
        elif family == "bundle":
            assert 1 / 16 <= d.S * N <= 16
        elif family == "star":
            assert 1 / 16 <= d.S * np.sqrt(N) <= 16


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
