"""Tilted CHSH: parameter relations, ideal strategy, Bell values, tables."""

import math

import numpy as np
import pytest

from qcorrkit.separating import exact_pstar
from qcorrkit.strategy import Strategy, StrategyError, induce
from qcorrkit.tilted_chsh import (
    SIGMA_X,
    SIGMA_Z,
    TiltedChshParams,
    bell_value,
    ideal_strategy,
    ideal_table,
    params_from_alpha,
    params_from_beta,
    tilted_sigma_x,
    tilted_sigma_z,
)

from conftest import kron_induce


class TestParams:
    def test_untilted_limit(self):
        p = params_from_beta(0.0)
        assert p.theta == pytest.approx(math.pi / 4, abs=1e-12)
        assert p.mu == pytest.approx(math.pi / 4, abs=1e-12)
        assert p.alpha == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_limit(self):
        p = params_from_beta(2.0)
        assert p.theta == 0.0
        assert p.mu == 0.0
        assert p.alpha == 0.0

    def test_mid_tilt_values(self):
        # frozen from direct evaluation: sin 2t = sqrt(3/5), t = asin(.)/2,
        # mu = atan(sin 2t), a = tan(t)
        p = params_from_beta(1.0)
        sin2t = math.sqrt(3.0 / 5.0)
        assert sin2t == pytest.approx(0.7745966692414834, abs=1e-15)
        assert p.theta == pytest.approx(0.4430385618963069, abs=1e-14)
        assert p.alpha == pytest.approx(0.4744978678080796, abs=1e-14)
        assert p.mu == pytest.approx(0.6590580358264090, abs=1e-14)

    def test_beta_range_enforced(self):
        with pytest.raises(ValueError):
            params_from_beta(-0.1)
        with pytest.raises(ValueError):
            params_from_beta(2.1)

    def test_alpha_endpoints(self):
        assert params_from_alpha(1.0).beta == pytest.approx(0.0, abs=1e-12)
        assert params_from_alpha(0.0).beta == pytest.approx(2.0, abs=1e-12)

    def test_alpha_half(self):
        p = params_from_alpha(0.5)
        assert p.beta == pytest.approx(1.5 / math.sqrt(2.5625), abs=1e-14)
        assert p.beta == pytest.approx(0.9370426, abs=1e-7)

    def test_alpha_roundtrip(self):
        for alpha in np.linspace(0.0, 1.0, 21):
            p = params_from_alpha(float(alpha))
            assert p.alpha == pytest.approx(alpha, abs=1e-10)
            q = params_from_beta(p.beta)
            assert q.theta == pytest.approx(p.theta, abs=1e-12)

    def test_alpha_range_enforced(self):
        with pytest.raises(ValueError):
            params_from_alpha(1.5)

    def test_inconsistent_tuple_rejected(self):
        with pytest.raises(ValueError, match="inconsistent"):
            TiltedChshParams(beta=1.0, theta=0.3, mu=0.6590580358264090, alpha=0.47)


class TestIdealStrategy:
    def test_untilted_state_and_observables(self):
        s = ideal_strategy(params_from_beta(0.0))
        np.testing.assert_allclose(
            s.state, np.array([1, 0, 0, 1]) / math.sqrt(2), atol=1e-12
        )
        b0 = s.bob_meas[0][0] - s.bob_meas[0][1]
        np.testing.assert_allclose(b0, (SIGMA_Z + SIGMA_X) / math.sqrt(2), atol=1e-12)

    def test_degenerate_product_state(self):
        s = ideal_strategy(params_from_beta(2.0))
        np.testing.assert_allclose(s.state, [1, 0, 0, 0], atol=1e-12)
        for y in range(2):
            np.testing.assert_allclose(
                s.bob_meas[y][0] - s.bob_meas[y][1], SIGMA_Z, atol=1e-12
            )

    def test_alpha_half_amplitudes(self):
        s = ideal_strategy(params_from_alpha(0.5))
        np.testing.assert_allclose(
            s.state, [0.8944271909999159, 0, 0, 0.4472135954999579], atol=1e-12
        )

    def test_tilted_paulis_are_involutions(self):
        for mu in np.linspace(0, math.pi / 4, 7):
            for obs in (tilted_sigma_z(mu), tilted_sigma_x(mu)):
                np.testing.assert_allclose(obs @ obs, np.eye(2), atol=1e-14)


class TestBellValue:
    def test_maximum_at_sampled_tilts(self):
        for beta in (0.0, 0.5, 1.0, 1.5, 2.0):
            value = bell_value(ideal_strategy(params_from_beta(beta)), beta)
            assert value == pytest.approx(math.sqrt(8.0 + 2.0 * beta**2), abs=1e-9)

    def test_untilted_is_tsirelson(self):
        assert bell_value(ideal_strategy(params_from_beta(0.0)), 0.0) == pytest.approx(
            2.0 * math.sqrt(2.0), abs=1e-12
        )

    def test_full_grid(self):
        for beta in np.linspace(0.0, 2.0, 21):
            value = bell_value(ideal_strategy(params_from_beta(float(beta))), float(beta))
            assert value == pytest.approx(math.sqrt(8.0 + 2.0 * beta**2), abs=1e-9)

    def test_product_strategies_classical_bound(self, rng):
        # separable states cannot beat 2 + beta
        for _ in range(40):
            beta = float(rng.uniform(0.0, 2.0))
            phases = rng.uniform(0, 2 * np.pi, size=2)
            state_a = np.array([np.cos(phases[0]), np.sin(phases[0])], dtype=complex)
            state_b = np.array([np.cos(phases[1]), np.sin(phases[1])], dtype=complex)
            state = np.kron(state_a, state_b)
            meas = []
            for side in range(2):
                side_meas = []
                for _q in range(2):
                    angle = rng.uniform(0, 2 * np.pi)
                    obs = np.cos(angle) * SIGMA_Z + np.sin(angle) * SIGMA_X
                    side_meas.append([(np.eye(2) + obs) / 2, (np.eye(2) - obs) / 2])
                meas.append(side_meas)
            s = Strategy(2, 2, state, meas[0], meas[1])
            assert bell_value(s, beta) <= 2.0 + beta + 1e-9

    def test_shape_requirements(self):
        s = ideal_strategy(params_from_beta(0.0))
        single = Strategy(2, 2, s.state, [s.alice_meas[0]], s.bob_meas)
        with pytest.raises(StrategyError):
            bell_value(single, 0.0)


class TestIdealTable:
    def test_untilted_diagonal(self):
        t = ideal_table(params_from_beta(0.0), 0, 0)
        diag = (2.0 + math.sqrt(2.0)) / 8.0
        off = (2.0 - math.sqrt(2.0)) / 8.0
        np.testing.assert_allclose(t.entries, [[diag, off], [off, diag]], atol=1e-12)

    def test_degenerate_limit(self):
        # at full tilt the state is |00> and Bob always answers 0; Alice is
        # deterministic on the sigma_z question and unbiased on sigma_x
        for y in range(2):
            t0 = ideal_table(params_from_beta(2.0), 0, y)
            np.testing.assert_allclose(t0.entries, [[1, 0], [0, 0]], atol=1e-12)
            t1 = ideal_table(params_from_beta(2.0), 1, y)
            np.testing.assert_allclose(t1.entries, [[0.5, 0], [0.5, 0]], atol=1e-12)

    def test_matches_kron_oracle(self):
        params = params_from_alpha(0.5)
        oracle = kron_induce(ideal_strategy(params))
        for x in range(2):
            for y in range(2):
                np.testing.assert_allclose(
                    ideal_table(params, x, y).entries, oracle[x, y], atol=1e-12
                )

    def test_matches_induce(self):
        params = params_from_beta(1.3)
        p = induce(ideal_strategy(params))
        for x in range(2):
            for y in range(2):
                np.testing.assert_allclose(
                    ideal_table(params, x, y).entries, p.table[x, y], atol=1e-12
                )

    def test_structural_identity_with_separating_blocks(self):
        # aligned-pair questions of the separating correlation carry exactly
        # the two-qubit tables, zero mass on answer 2
        alpha = 0.5
        p = exact_pstar(alpha)
        params = params_from_alpha(alpha)
        for x in range(2):
            for y in range(2):
                table = p.table[x, y]
                np.testing.assert_allclose(
                    table[:2, :2], ideal_table(params, x, y).entries, atol=1e-12
                )
                assert np.all(table[2, :] == 0.0) and np.all(table[:, 2] == 0.0)

    def test_question_range(self):
        with pytest.raises(ValueError):
            ideal_table(params_from_beta(0.0), 2, 0)
