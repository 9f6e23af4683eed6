import math

import numpy as np
import pandas as pd
import pytest
from scipy import optimize

from dephasim import bath, dynamics
from dephasim.errors import ContractViolation
from dephasim.models import BasisString, ModelConfig, SpectralParams, Variant

FAST_OHMIC = SpectralParams(coupling=1.0, ohmicity=1.0, cutoff=3.0)


def _first_zero_of_g():
    """Δ(t*) = -π/2 for the s = 1, w_c = 3 bath"""
    return optimize.brentq(lambda t: math.cos(bath.delta_exact(FAST_OHMIC, t)), 0.5, 1.0, xtol=1e-15)


class TestCoherenceFactors:
    def test_initial_values(self, qubit_pair, super_ohmic):
        factors = dynamics.coherence_factors(qubit_pair, super_ohmic, 0.0)
        assert (factors.f, factors.g, factors.chi) == (1.0, 1.0, 0.0)

    @pytest.mark.parametrize("t", [0.3, 2.0, 17.0])
    def test_single_qubit_has_no_cosine_factor(self, variant, super_ohmic, t):
        m = ModelConfig(qubit_count=1, variant=variant)
        factors = dynamics.coherence_factors(m, super_ohmic, t)
        assert factors.g == 1.0
        assert factors.chi == 0.0

    def test_pair_loses_coherence_at_quarter_phase(self, variant):
        t_star = _first_zero_of_g()
        assert bath.delta_exact(FAST_OHMIC, t_star) == pytest.approx(-math.pi / 2, abs=1e-12)
        factors = dynamics.coherence_factors(ModelConfig(qubit_count=2, variant=variant), FAST_OHMIC, t_star)
        assert factors.g == pytest.approx(0.0, abs=1e-12)

    def test_negative_cosine_sets_phase(self, qubit_pair):
        factors = dynamics.coherence_factors(qubit_pair, FAST_OHMIC, 1.0)
        assert factors.chi == math.pi
        assert factors.alpha_offdiag.real < 0
        assert abs(factors.alpha_offdiag) == pytest.approx(factors.f * factors.g)

    def test_alternative_form_of_cosine_factor(self):
        delta = bath.delta_exact(FAST_OHMIC, np.linspace(0.0, 10.0, 400))
        for qubit_count in (3, 4, 5):
            m = ModelConfig(qubit_count=qubit_count)
            g = np.abs(dynamics.cosine_factor(m, delta))
            np.testing.assert_allclose(g, np.sqrt(0.5 * (1 + np.cos(qubit_count * delta))), atol=1e-7)


class TestReducedStates:
    def test_initial_states(self, qubit_pair, super_ohmic):
        rho_plus, rho_minus = dynamics.reduced_pair(qubit_pair, super_ohmic, 0.0)
        np.testing.assert_allclose(rho_plus.matrix, 0.5 * np.ones((2, 2)))
        np.testing.assert_allclose(rho_minus.matrix, [[0.5, -0.5], [-0.5, 0.5]])

    @pytest.mark.parametrize("t", [0.2, 1.0, 4.5, 12.0])
    def test_states_are_physical_and_distance_is_fg(self, variant, super_ohmic, t):
        m = ModelConfig(qubit_count=3, variant=variant, splitting=0.7)
        rho_plus, rho_minus = dynamics.reduced_pair(m, super_ohmic, t)
        assert rho_plus.is_physical()
        assert rho_minus.is_physical()
        factors = dynamics.coherence_factors(m, super_ohmic, t)
        eigenvalues = np.linalg.eigvalsh(rho_plus.matrix - rho_minus.matrix)
        np.testing.assert_allclose(eigenvalues, [-factors.f * factors.g, factors.f * factors.g], atol=1e-14)
        distance = 0.5 * np.sum(np.linalg.svd(rho_plus.matrix - rho_minus.matrix, compute_uv=False))
        assert distance == pytest.approx(factors.f * factors.g, abs=1e-12)
        assert dynamics.trace_distance(m, super_ohmic, t) == pytest.approx(distance, abs=1e-12)

    def test_pair_offdiagonal_at_t10(self, qubit_pair, super_ohmic):
        reference = bath.kernel_quadrature(super_ohmic, 10.0)
        assert reference.gamma == pytest.approx(1.0, abs=1e-2)
        rho_plus, _ = dynamics.reduced_pair(qubit_pair, super_ohmic, 10.0)
        expected = 0.5 * math.exp(-reference.gamma) * abs(math.cos(reference.delta))
        assert abs(rho_plus.offdiagonal) == pytest.approx(expected, rel=1e-7)


class TestRegister:
    def test_diagonal_elements(self, super_ohmic):
        m = ModelConfig(qubit_count=3)
        string = BasisString((1, -1, 1))
        for t in (0.0, 1.0, 7.0):
            assert dynamics.n_qubit_element(m, super_ohmic, t, string, string) == 1 / 8

    def test_fully_flipped_element_decays_as_four_gamma(self, qubit_pair, super_ohmic):
        up, down = BasisString((1, 1)), BasisString((-1, -1))
        for t in (0.5, 2.0, 9.0):
            element = dynamics.n_qubit_element(qubit_pair, super_ohmic, t, up, down)
            gamma = bath.gamma_exact(super_ohmic, t)
            assert abs(element) == pytest.approx(0.25 * math.exp(-4 * gamma), rel=1e-12)

    def test_length_mismatch(self, qubit_pair, super_ohmic):
        with pytest.raises(ContractViolation):
            dynamics.n_qubit_element(qubit_pair, super_ohmic, 1.0, BasisString((1,)), BasisString((1, -1)))

    def test_density_matrix_matches_elements(self, variant, super_ohmic):
        m = ModelConfig(qubit_count=3, variant=variant, splitting=0.4)
        rho = dynamics.density_matrix(m, super_ohmic, 2.3)
        strings = list(BasisString.all_strings(3))
        for i in (0, 2, 5):
            for j in (1, 6, 7):
                element = dynamics.n_qubit_element(m, super_ohmic, 2.3, strings[i], strings[j])
                assert rho[i, j] == pytest.approx(element, abs=1e-15)

    @pytest.mark.parametrize("t", [0.0, 0.8, 3.0, 15.0])
    def test_pair_register_is_a_state(self, super_ohmic, t):
        rho = dynamics.density_matrix(ModelConfig(qubit_count=2, splitting=1.1), super_ohmic, t)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-14)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12

    @pytest.mark.parametrize("qubit_count", [2, 3])
    def test_partial_trace_gives_reduced_state(self, variant, super_ohmic, qubit_count):
        m = ModelConfig(qubit_count=qubit_count, variant=variant, splitting=1.3)
        for t in (0.4, 2.0, 11.0):
            reduced = dynamics.partial_trace_first(dynamics.density_matrix(m, super_ohmic, t), qubit_count)
            rho_plus, _ = dynamics.reduced_pair(m, super_ohmic, t)
            np.testing.assert_allclose(reduced, rho_plus.matrix, atol=1e-12)

    def test_register_size_guard(self, super_ohmic):
        with pytest.raises(ContractViolation):
            dynamics.density_matrix(ModelConfig(qubit_count=11), super_ohmic, 1.0)


class TestDistinguishability:
    def test_starts_at_one(self, qubit_pair, super_ohmic):
        assert dynamics.trace_distance(qubit_pair, super_ohmic, 0.0) == 1.0

    def test_bounded_by_envelope(self, qubit_pair, super_ohmic):
        times = np.linspace(0.0, 20.0, 500)
        D = dynamics.trace_distance(qubit_pair, super_ohmic, times)
        assert np.all(D <= np.exp(-bath.gamma_exact(super_ohmic, times)) + 1e-15)

    def test_single_qubit_ohmic_value(self, single_qubit, ohmic):
        assert dynamics.trace_distance(single_qubit, ohmic, 1.0) == pytest.approx(0.707107, abs=1e-6)

    def test_variants_agree_up_to_two_qubits(self, super_ohmic):
        times = np.linspace(0.0, 20.0, 2001)
        for qubit_count in (1, 2):
            paper = dynamics.trace_distance(ModelConfig(qubit_count, variant=Variant.PAPER), super_ohmic, times)
            pairwise = dynamics.trace_distance(
                ModelConfig(qubit_count, variant=Variant.PAIRWISE), super_ohmic, times)
            np.testing.assert_array_equal(paper, pairwise)

    def test_relative_entropy_values(self):
        assert dynamics.relative_entropy(0.0) == 0.0
        assert dynamics.relative_entropy(0.5) == pytest.approx(0.5 * math.log(3))
        assert dynamics.relative_entropy(1.0) == math.inf
        values = dynamics.relative_entropy(np.array([0.1, 0.4, 0.9]))
        assert np.all(np.diff(values) > 0)

    @pytest.mark.parametrize("D", [-0.1, 1.1, float('nan')])
    def test_relative_entropy_rejects_out_of_range(self, D):
        with pytest.raises(ContractViolation):
            dynamics.relative_entropy(D)


class TestRates:
    def test_single_qubit_ohmic_value(self, single_qubit, ohmic):
        assert dynamics.rates(single_qubit, ohmic, 1.0).trace_distance_rate == pytest.approx(-0.353553, abs=1e-6)

    def test_single_qubit_rate_is_envelope_decay(self, single_qubit, super_ohmic):
        for t in (0.3, 1.0, 6.0):
            gamma_rate, _ = bath.kernel_rates(super_ohmic, t)
            expected = -gamma_rate * math.exp(-bath.gamma_exact(super_ohmic, t))
            assert dynamics.rates(single_qubit, super_ohmic, t).trace_distance_rate == pytest.approx(expected)

    def test_rates_match_finite_differences(self, qubit_pair, super_ohmic):
        h, t = 1e-6, 2.0
        D = lambda u: dynamics.trace_distance(qubit_pair, super_ohmic, u)  # noqa: E731
        S = lambda u: dynamics.relative_entropy(D(u))  # noqa: E731
        values = dynamics.rates(qubit_pair, super_ohmic, t)
        assert not values.kink
        assert values.trace_distance_rate == pytest.approx((D(t + h) - D(t - h)) / (2 * h), rel=1e-5)
        assert values.entropy_rate == pytest.approx((S(t + h) - S(t - h)) / (2 * h), rel=1e-5)

    def test_one_sided_values_at_a_kink(self, qubit_pair):
        values = dynamics.rates(qubit_pair, FAST_OHMIC, _first_zero_of_g())
        assert values.kink
        assert values.trace_distance_rate > 0 > values.left_trace_distance_rate
        assert values.trace_distance_rate == pytest.approx(-values.left_trace_distance_rate, rel=1e-9)
        assert values.to_dict()['dDdt_left'] == values.left_trace_distance_rate

    def test_time_zero_rejected(self, qubit_pair, super_ohmic):
        with pytest.raises(ContractViolation):
            dynamics.rates(qubit_pair, super_ohmic, 0.0)

    def test_entropy_rate_has_the_sign_of_the_distance_rate(self, super_ohmic):
        frame = dynamics.coherence_trajectory(ModelConfig(qubit_count=3), super_ohmic,
                                              np.linspace(0.01, 20.0, 3000))
        interior = (frame['D'] > 0) & (frame['D'] < 1)
        np.testing.assert_array_equal(np.sign(frame.loc[interior, 'dSdt']),
                                      np.sign(frame.loc[interior, 'dDdt']))

    def test_splitting_only_moves_the_phase(self, super_ohmic):
        times = np.linspace(0.0, 10.0, 101)
        still = dynamics.coherence_trajectory(ModelConfig(qubit_count=2), super_ohmic, times)
        spinning = dynamics.coherence_trajectory(ModelConfig(qubit_count=2, splitting=2.5), super_ohmic, times)
        pd.testing.assert_frame_equal(still, spinning)
        for t in (0.7, 4.0):
            assert (dynamics.rates(ModelConfig(qubit_count=2), super_ohmic, t)
                    == dynamics.rates(ModelConfig(qubit_count=2, splitting=2.5), super_ohmic, t))


class TestTrajectory:
    def test_columns_and_initial_row(self, qubit_pair, super_ohmic):
        frame = dynamics.coherence_trajectory(qubit_pair, super_ohmic, np.linspace(0.0, 5.0, 51))
        assert list(frame.columns) == dynamics.TRAJECTORY_COLUMNS
        first = frame.iloc[0]
        assert (first['f'], first['g'], first['D']) == (1.0, 1.0, 1.0)
        assert first['S'] == math.inf
        assert first['dDdt'] == 0.0

    def test_rows_match_pointwise_rates(self, qubit_pair, super_ohmic):
        times = np.array([0.5, 1.5, 3.5])
        frame = dynamics.coherence_trajectory(qubit_pair, super_ohmic, times)
        for row, t in zip(frame.itertuples(), times):
            values = dynamics.rates(qubit_pair, super_ohmic, t)
            assert row.dDdt == pytest.approx(values.trace_distance_rate, rel=1e-12)
            assert row.dSdt == pytest.approx(values.entropy_rate, rel=1e-12)
