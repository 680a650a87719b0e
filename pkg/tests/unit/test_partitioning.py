"""
Tests for bivariate polynomials, polynomial partitioning, line incidences
and zero-set neighbourhood areas
"""
import pytest
import numpy as np
import sys
import os
import logging
from dataclasses import replace

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../../src'))

from harmonic_core.errors import PartitionError
from lab_harness.fitting import fit_power_law
from partitioning.partition import (
    ON_BOUNDARY, PartitionResult, WeightedPoints, bisector_count, build_partition,
    cell_of, degree_schedule, line_cell_incidences, line_incidences, sign_codes
)
from partitioning.polynomials import (
    BivariatePolynomial, monomial_count, monomial_exponents, product, random_polynomial
)
from partitioning.wongkew import (
    distance_to_zero_set, neighborhood_area, neighborhood_areas, wongkew_ratio
)


def disk_cloud(n=1000, seed=0, radius=1.0):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.random(n))
    a = 2 * np.pi * rng.random(n)
    return WeightedPoints.uniform(r * np.cos(a), r * np.sin(a))


class TestBivariatePolynomial:
    """Test evaluation and arithmetic of P(x, t)"""

    def test_monomials(self):
        assert monomial_exponents(1) == [(0, 0), (1, 0), (0, 1)]
        assert monomial_count(3) == 10 == len(monomial_exponents(3))

    def test_line_and_circle(self):
        line = BivariatePolynomial.line(2.0, -1.0, 3.0)
        assert line(1.0, 5.0) == pytest.approx(0.0)
        circle = BivariatePolynomial.circle(1.0, -2.0, 3.0)
        assert circle(4.0, -2.0) == pytest.approx(0.0)
        assert circle(1.0, -2.0) == pytest.approx(-9.0)

    def test_gradient(self):
        circle = BivariatePolynomial.circle(0.0, 0.0, 2.0)
        gx, gt = circle.gradient(np.array([1.0]), np.array([3.0]))
        assert gx[0] == pytest.approx(2.0)
        assert gt[0] == pytest.approx(6.0)

    def test_normalized_frame(self):
        poly = BivariatePolynomial.from_vector(1, [0.0, 1.0, 0.0], center=(5.0, 0.0), scale=10.0)
        assert poly(15.0, 3.0) == pytest.approx(1.0)
        gx, _ = poly.gradient(0.0, 0.0)
        assert gx == pytest.approx(0.1)

    def test_product_evaluates_pointwise(self):
        rng = np.random.default_rng(4)
        polys = [random_polynomial(d, rng) for d in (1, 2, 3)]
        prod = product(polys)
        assert prod.degree == 6
        x, t = rng.normal(size=20), rng.normal(size=20)
        expected = polys[0](x, t) * polys[1](x, t) * polys[2](x, t)
        assert np.allclose(prod(x, t), expected)

    def test_addition_and_shift(self):
        line = BivariatePolynomial.line(1.0, 0.0, 0.0)
        assert (line + 2.0)(1.0, 0.0) == pytest.approx(3.0)
        assert (line - line)(3.0, 4.0) == pytest.approx(0.0)
        assert (2 * line)(1.5, 0.0) == pytest.approx(3.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            BivariatePolynomial.from_vector(2, [1.0, 2.0])
        with pytest.raises(ValueError):
            BivariatePolynomial(1, np.ones((2, 2)))
        with pytest.raises(ValueError):
            BivariatePolynomial.line(1, 0, 0) + BivariatePolynomial.circle(1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            product([])

    def test_random_polynomial_through_point(self):
        poly = random_polynomial(3, np.random.default_rng(5), scale=10.0, through=(1.0, -2.0))
        assert poly(1.0, -2.0) == pytest.approx(0.0, abs=1e-12)

    def test_dict_form(self):
        poly = random_polynomial(2, np.random.default_rng(6), scale=3.0)
        again = BivariatePolynomial.from_dict(poly.to_dict())
        assert np.array_equal(again.coefficients, poly.coefficients)
        assert again.scale == 3.0


class TestWeightedPoints:
    """Test point set validation"""

    def test_validation(self):
        with pytest.raises(ValueError):
            WeightedPoints(np.zeros(3), np.zeros(2), np.ones(3))
        with pytest.raises(ValueError):
            WeightedPoints(np.zeros(2), np.zeros(2), np.array([1.0, -1.0]))
        with pytest.raises(ValueError):
            WeightedPoints(np.zeros(2), np.zeros(2), np.zeros(2))

    def test_csv(self, tmp_path):
        points = disk_cloud(10)
        path = tmp_path / "points.csv"
        points.to_frame().to_csv(path, index=False)
        loaded = WeightedPoints.from_csv(path)
        assert np.allclose(loaded.x, points.x)
        assert loaded.total_weight == pytest.approx(10.0)


class TestPartition:
    """Test bisector schedules, sign cells and the build contract"""

    def setup_method(self):
        self.square = WeightedPoints.uniform([1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0])

    def test_schedule(self):
        assert bisector_count(1) == 1
        assert bisector_count(2) == 2
        assert bisector_count(4) == 4
        assert degree_schedule(2) == [1, 1]
        assert degree_schedule(4) == [1, 1, 2, 3]
        with pytest.raises(ValueError):
            degree_schedule(9)

    def test_square_with_one_line(self):
        result = build_partition(self.square, 1, seed=0)
        assert len(result.bisectors) == 1
        assert result.product_degree == 1
        assert sorted(result.cell_weights.tolist()) == [2.0, 2.0]
        assert result.imbalance == 0.0

    def test_cells_of_fixed_bisector(self):
        result = PartitionResult.from_bisectors([BivariatePolynomial.line(1.0, 0.0, 0.0)], self.square)
        assert cell_of(result, 1.0, 1.0) != cell_of(result, -1.0, 1.0)
        assert cell_of(result, 0.0, 0.3) == ON_BOUNDARY
        assert result.cells[(1,)] == cell_of(result, 2.0, 0.0)

    def test_sign_codes_match_brute_force(self):
        rng = np.random.default_rng(7)
        bisectors = [random_polynomial(d, rng) for d in (1, 1, 2)]
        x, t = rng.normal(size=200), rng.normal(size=200)
        codes = sign_codes(bisectors, x, t)
        for k in range(200):
            expected = sum(1 << bit for bit, p in enumerate(bisectors) if p(x[k], t[k]) > 0)
            assert codes[k] == expected

    def test_too_few_points(self):
        single = WeightedPoints(np.array([0.0, 1.0]), np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        with pytest.raises(ValueError, match="too few points"):
            build_partition(single, 2)

    def test_disk_cloud_degree_two(self):
        points = disk_cloud(1000, seed=1)
        result = build_partition(points, 2, seed=11)
        assert result.product_degree <= 2 * 2
        assert len(result.cell_weights) == 4
        assert result.imbalance <= 0.1
        assert np.all(np.abs(result.cell_weights - 250) <= 25)
        assert result.cell_weights.sum() + result.boundary_weight == pytest.approx(points.total_weight)

    def test_deterministic(self):
        points = disk_cloud(300, seed=2)
        first = build_partition(points, 2, seed=5)
        second = build_partition(points, 2, seed=5)
        assert first.to_dict() == second.to_dict()

    def test_failure_reports_best_imbalance(self):
        points = disk_cloud(201, seed=3)
        with pytest.raises(PartitionError) as info:
            build_partition(points, 2, tolerance=1e-9, seed=0, restarts=1, maxiter=2)
        assert info.value.best_imbalance is not None

    @pytest.mark.slow
    @pytest.mark.parametrize("D", [1, 2, 4])
    def test_random_clouds(self, D):
        for seed in range(20):
            result = build_partition(disk_cloud(1000, seed=seed), D, seed=seed)
            assert result.imbalance <= 0.1
            assert result.product_degree <= 4 * D


class TestLineIncidences:
    """Test how many cells a line x = v + theta t can meet"""

    def test_single_line_partition(self):
        result = PartitionResult.from_bisectors([BivariatePolynomial.line(1.0, 0.0, 0.0)], self.square())
        assert line_cell_incidences(result, 0.5, 0.0, 10.0) == 2
        assert line_cell_incidences(result, 0.0, 3.0, 10.0) == 1

    def test_degenerate_line(self):
        result = PartitionResult.from_bisectors([BivariatePolynomial.line(1.0, 0.0, 0.0)], self.square())
        incidence = line_incidences(result, 0.0, 0.0, 5.0)
        assert incidence.degenerate
        assert incidence.count == 2
        assert incidence.boundary_samples > 0

    def test_random_lines_respect_degree(self):
        rng = np.random.default_rng(8)
        points = disk_cloud(400, seed=4)
        for _ in range(5):
            bisectors = [random_polynomial(1, rng), random_polynomial(1, rng)]
            result = PartitionResult.from_bisectors(bisectors, points)
            for _ in range(100):
                count = line_cell_incidences(result, rng.uniform(-1, 1), rng.uniform(-1, 1), 2.0)
                assert count <= result.product_degree + 1

    def test_crossing_lines_meet_three_cells(self):
        bisectors = [BivariatePolynomial.line(1.0, 0.0, 0.0), BivariatePolynomial.line(0.0, 1.0, 0.0)]
        result = PartitionResult.from_bisectors(bisectors, self.square())
        assert line_cell_incidences(result, -1.0, 0.5, 10.0) == 3

    def test_count_above_degree_bound_raises(self):
        bisectors = [BivariatePolynomial.line(1.0, 0.0, 0.0), BivariatePolynomial.line(0.0, 1.0, 0.0)]
        understated = replace(PartitionResult.from_bisectors(bisectors, self.square()), product_degree=1)
        with pytest.raises(PartitionError, match="more than product degree"):
            line_incidences(understated, -1.0, 0.5, 10.0)

    @staticmethod
    def square():
        return WeightedPoints.uniform([1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0])


class TestNeighbourhoodArea:
    """Test Monte Carlo areas of rho-neighbourhoods of zero sets"""

    def test_line_strip(self):
        estimate = neighborhood_area(BivariatePolynomial.line(1.0, 0.0, 0.0), 0.1, 10.0, seed=0)
        assert estimate.within(4.0)
        assert wongkew_ratio(estimate, 1) == pytest.approx(4.0, rel=0.1)

    def test_circle_annulus(self):
        estimate = neighborhood_area(BivariatePolynomial.circle(0.0, 0.0, 5.0), 0.1, 10.0, seed=1)
        assert estimate.within(2 * np.pi)

    def test_linear_in_rho(self):
        small, large = neighborhood_areas(
            BivariatePolynomial.circle(0.0, 0.0, 5.0), [0.1, 0.2], 10.0, seed=2
        )
        assert large.area / small.area == pytest.approx(2.0, rel=0.1)

    def test_distance_to_circle(self):
        circle = BivariatePolynomial.circle(0.0, 0.0, 5.0)
        q = np.array([[7.0, 0.0], [0.0, -4.5], [3.0, 4.0]])
        assert np.allclose(distance_to_zero_set(circle, q), [2.0, 0.5, 0.0], atol=1e-9)

    def test_empty_zero_set_is_reported(self, caplog):
        no_real_zeros = BivariatePolynomial.circle(0.0, 0.0, 1.0) + 2.0
        with caplog.at_level(logging.WARNING, logger="partitioning.wongkew"):
            estimate = neighborhood_area(no_real_zeros, 0.1, 10.0, n_samples=10_000, seed=3)
        assert estimate.stalled == 10_000
        assert estimate.area == 0.0
        assert any("stalled" in record.message for record in caplog.records)

    def test_regular_curve_has_no_stalled_samples(self):
        estimate = neighborhood_area(BivariatePolynomial.line(1.0, 0.0, 0.0), 0.1, 10.0, seed=0)
        assert estimate.stalled == 0

    def test_input_checks(self):
        line = BivariatePolynomial.line(1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            neighborhood_area(line, 0.1, 10.0, n_samples=100)
        with pytest.raises(ValueError):
            neighborhood_area(line, 20.0, 10.0)

    def test_rho_slope_of_random_curves(self):
        rng = np.random.default_rng(9)
        rhos = [0.05, 0.1, 0.2]
        for degree in (1, 2, 3, 4):
            poly = random_polynomial(degree, rng, scale=10.0, through=(0.0, 0.0))
            estimates = neighborhood_areas(poly, rhos, 10.0, seed=degree)
            fit = fit_power_law([(e.rho, e.area) for e in estimates])
            assert 0.9 <= fit.slope <= 1.1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
