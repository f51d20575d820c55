import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, stats

from qcut.haar import (
    HypersphericalPoint,
    MomentSpec,
    exact_moment,
    exact_moment_fraction,
    jacobian,
    measure_density,
    point_to_state,
    sample_point,
    sample_state,
    sample_state_gaussian,
    sample_states,
    sample_states_gaussian,
    total_surface_measure,
)
from qcut.rng import stream


def leading_moment(dim, *exps):
    return MomentSpec(dim, tuple(exps) + (0,) * (dim - len(exps)))


def mean_and_stderr(values):
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(len(values)))


class TestCoordinates:
    def test_pole_collapses_to_first_axis(self):
        p = HypersphericalPoint([0.0], [0.3, 1.1])
        state = point_to_state(p)
        np.testing.assert_allclose(state.amps, [np.exp(0.3j), 0.0], atol=1e-15)

    def test_equal_superposition_at_quarter_pi(self):
        p = HypersphericalPoint([np.pi / 4], [0.0, 0.0])
        np.testing.assert_allclose(point_to_state(p).amps, [1 / np.sqrt(2), 1 / np.sqrt(2)])

    def test_random_points_give_unit_norm(self):
        rng = stream(401)
        for _ in range(200):
            dim = int(rng.integers(1, 9))
            state = point_to_state(sample_point(dim, rng))
            assert abs(np.sum(np.abs(state.amps) ** 2) - 1.0) < 1e-13

    def test_angle_range_validation(self):
        with pytest.raises(ValueError, match="polar"):
            HypersphericalPoint([2.0], [0.0, 0.0])
        with pytest.raises(ValueError, match="phases"):
            HypersphericalPoint([0.5], [0.0, 7.0])
        with pytest.raises(ValueError, match="N-1"):
            HypersphericalPoint([0.5, 0.5], [0.0, 0.0])


class TestMeasure:
    def test_qubit_density_at_quarter_pi(self):
        p = HypersphericalPoint([np.pi / 4], [0.0, 0.0])
        assert measure_density(p) == pytest.approx(0.5, abs=1e-15)

    def test_density_vanishes_at_zero_angle(self):
        for dim in (3, 4, 5):
            p = HypersphericalPoint([0.0] * (dim - 1), [0.0] * dim)
            assert measure_density(p) == 0.0

    def test_integrated_density_matches_total_measure(self):
        # Oracle: numerical quadrature of the angular density over the
        # theta box, times (2*pi)^N for the phases.
        def density(t1, t2):
            return measure_density(HypersphericalPoint([t1, t2], [0.0, 0.0, 0.0]))

        box, _ = integrate.dblquad(density, 0, np.pi / 2, 0, np.pi / 2, epsabs=1e-12)
        assert box * (2 * np.pi) ** 3 == pytest.approx(total_surface_measure(3), rel=1e-10)
        assert total_surface_measure(3) == pytest.approx(np.pi**3, rel=1e-12)


class TestJacobian:
    def test_qubit_value_at_unit_radius(self):
        assert jacobian(1.0, [np.pi / 4]) == pytest.approx(0.5, abs=1e-15)

    def test_qubit_radial_scaling(self):
        assert jacobian(2.0, [np.pi / 4]) == pytest.approx(4.0, abs=1e-12)

    def test_recursion_identity(self):
        # J_N(r, t1..t_{N-1}) = r^2 cos(t1) J_{N-1}(r sin(t1), t2..).
        rng = stream(402)
        for _ in range(1000):
            n = int(rng.integers(3, 9))
            r = 0.25 + 2.0 * rng.random()
            thetas = rng.random(n - 1) * (np.pi / 2)
            lhs = jacobian(r, thetas)
            rhs = r**2 * np.cos(thetas[0]) * jacobian(r * np.sin(thetas[0]), thetas[1:])
            assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1e-300)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError, match="radius"):
            jacobian(0.0, [0.3])


class TestSamplers:
    def test_dim_one_is_a_phase(self):
        rng = stream(403)
        assert abs(abs(sample_state(1, rng).amps[0]) - 1.0) < 1e-14
        assert abs(abs(sample_state_gaussian(1, rng).amps[0]) - 1.0) < 1e-14

    def test_rejects_dim_zero(self):
        rng = stream(404)
        with pytest.raises(ValueError, match="dimension"):
            sample_state(0, rng)
        with pytest.raises(ValueError, match="dimension"):
            sample_states_gaussian(0, 5, rng)

    def test_mean_weight_is_uniform(self):
        rng = stream(405)
        weights = np.abs(sample_states(4, 100_000, rng)) ** 2
        for j in range(4):
            mean, stderr = mean_and_stderr(weights[:, j])
            assert abs(mean - 0.25) < 4 * stderr

    def test_fourth_moment_matches_exact_value(self):
        rng = stream(406)
        weights = np.abs(sample_states(3, 100_000, rng)) ** 2
        mean, stderr = mean_and_stderr(weights[:, 0] ** 2)
        assert exact_moment(leading_moment(3, 2)) == pytest.approx(1 / 6)
        assert abs(mean - 1 / 6) < 4 * stderr

    def test_gaussian_sampler_weight_is_uniform_for_qubits(self):
        rng = stream(407)
        w = np.abs(sample_states_gaussian(2, 100_000, rng)[:, 0]) ** 2
        assert stats.kstest(w, "uniform").statistic < 0.01

    def test_two_samplers_agree_on_first_two_moments(self):
        rng = stream(408)
        for power in (1, 2):
            a = np.abs(sample_states(5, 100_000, rng)[:, 0]) ** (2 * power)
            b = np.abs(sample_states_gaussian(5, 100_000, rng)[:, 0]) ** (2 * power)
            mean_a, se_a = mean_and_stderr(a)
            mean_b, se_b = mean_and_stderr(b)
            assert abs(mean_a - mean_b) < 4 * math.hypot(se_a, se_b)

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_both_samplers_match_exact_moments(self, dim):
        rng = stream(409 + dim)
        for sampler in (sample_states, sample_states_gaussian):
            w = np.abs(sampler(dim, 100_000, rng)) ** 2
            mean, stderr = mean_and_stderr(w[:, 0] ** 2)
            assert abs(mean - exact_moment(leading_moment(dim, 2))) < 4 * stderr
            if dim >= 2:
                mean, stderr = mean_and_stderr(w[:, 0] * w[:, 1])
                assert abs(mean - exact_moment(leading_moment(dim, 1, 1))) < 4 * stderr


class TestExactMoments:
    def test_qubit_fourth_moment_against_quadrature(self):
        # Oracle: 1D quadrature of cos^4 against the angular density.
        num, _ = integrate.quad(lambda t: np.cos(t) * np.sin(t) * np.cos(t) ** 4, 0, np.pi / 2)
        den, _ = integrate.quad(lambda t: np.cos(t) * np.sin(t), 0, np.pi / 2)
        assert num / den == pytest.approx(1 / 3, rel=1e-12)
        assert exact_moment(leading_moment(2, 2)) == pytest.approx(1 / 3, rel=1e-14)

    def test_qutrit_fourth_moment_gives_measurement_fidelity(self):
        assert exact_moment_fraction(leading_moment(3, 2)) == Fraction(1, 6)
        assert 3 * exact_moment(leading_moment(3, 2)) == pytest.approx(1 / 2)

    @pytest.mark.parametrize("dim", [1, 2, 5, 17])
    def test_single_weight_averages_to_reciprocal_dim(self, dim):
        assert exact_moment_fraction(leading_moment(dim, 1)) == Fraction(1, dim)

    def test_reduced_identity_for_entangled_averages(self):
        # N*R-dimensional moments recombine into (R+1)/(N*R+1), exactly.
        for n in range(1, 13):
            for r in range(1, 7):
                nr = n * r
                combined = nr * exact_moment_fraction(leading_moment(nr, 2))
                if r > 1:
                    combined += nr * (r - 1) * exact_moment_fraction(leading_moment(nr, 1, 1))
                assert combined == Fraction(r + 1, nr + 1)

    def test_large_inputs_stay_accurate(self):
        spec = MomentSpec(64, (8, 7, 5) + (0,) * 61)
        logs = (
            math.lgamma(64)
            + math.lgamma(9)
            + math.lgamma(8)
            + math.lgamma(6)
            - math.lgamma(64 + 20)
        )
        assert exact_moment(spec) == pytest.approx(math.exp(logs), rel=1e-12)

    def test_moment_spec_validation(self):
        with pytest.raises(ValueError, match="positive"):
            MomentSpec(3, (0, 0, 0))
        with pytest.raises(ValueError, match="nonnegative"):
            MomentSpec(2, (1, -1))
        with pytest.raises(ValueError, match="one exponent per"):
            MomentSpec(3, (1, 0))
