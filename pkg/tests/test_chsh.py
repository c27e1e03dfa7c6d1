import math

import numpy as np
import pytest

from hybell.chsh import (
    OptimizerSettings,
    chsh_from_coefficients,
    conditions,
    gamma_opt,
    s_gamma,
    s_gamma_atomic,
    s_max_atomic,
    s_max_closed,
    s_max_over_alpha,
    scenario_coefficients,
    theorem1_witness,
    violation_threshold,
)
from hybell.model import (
    ChannelSpec,
    Coefficients,
    LossConvention,
    Scenario,
    ScenarioKind,
    TSIRELSON_BOUND,
)

PHOTOCOUNT = Scenario(kind=ScenarioKind.PHOTOCOUNT)
TWO_HOMODYNE = Scenario(kind=ScenarioKind.TWO_HOMODYNE)


def random_coefficients(rng):
    return Coefficients(*(rng.uniform(-1.0, 1.0) for _ in range(3)))


class TestSGamma:
    def test_degenerate_product_state(self):
        assert s_gamma(Coefficients(0.0, 1.0, 1.0), math.pi / 4) == pytest.approx(0.0, abs=1e-15)

    def test_tsirelson_at_ideal_coefficients(self):
        got = s_gamma(Coefficients(1.0, 1.0, -1.0), math.pi / 4)
        assert got == pytest.approx(TSIRELSON_BOUND, abs=1e-14)

    def test_parabola_identity(self):
        # s_gamma = 2 sqrt(A sin^4 nu + B sin^2 nu + c2^2)
        rng = np.random.default_rng(3)
        for _ in range(300):
            c = random_coefficients(rng)
            nu = rng.uniform(0.0, math.pi / 2)
            total = c.c2 + c.c3
            a_coef = total * total - 4.0 * c.c1 ** 2
            b_coef = 4.0 * c.c1 ** 2 - 2.0 * c.c2 * total
            u = math.sin(nu) ** 2
            f = a_coef * u * u + b_coef * u + c.c2 ** 2
            assert s_gamma(c, nu) == pytest.approx(2.0 * math.sqrt(max(f, 0.0)), abs=1e-12)

    def test_consistency_with_closed_form_maximum(self):
        channel = ChannelSpec()
        coeffs = scenario_coefficients(2.1, channel, PHOTOCOUNT)
        s, nu_opt = s_max_closed(coeffs)
        assert s_gamma(coeffs, nu_opt) == pytest.approx(s, abs=1e-12)


class TestGammaOpt:
    def test_pure_sz_alignment(self):
        assert gamma_opt(Coefficients(0.0, 1.0, 0.0), 0.3) == 0.0

    def test_pure_sx_alignment(self):
        assert gamma_opt(Coefficients(1.0, 0.0, 0.0), math.pi / 4) == pytest.approx(
            math.pi / 2, abs=1e-15
        )

    def test_undefined_when_both_terms_vanish(self):
        with pytest.raises(ValueError, match="gamma undefined"):
            gamma_opt(Coefficients(0.0, 0.0, 0.0), 0.5)

    def test_reproduces_s_gamma(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            c = random_coefficients(rng)
            nu = rng.uniform(0.0, math.pi / 2)
            g = gamma_opt(c, nu)
            assert chsh_from_coefficients(c, nu, g) == pytest.approx(
                s_gamma(c, nu), abs=1e-12
            )

    def test_generic_identity_at_optimum(self):
        coeffs = scenario_coefficients(2.1, ChannelSpec(), PHOTOCOUNT)
        _, nu_opt = s_max_closed(coeffs)
        g = gamma_opt(coeffs, nu_opt)
        assert chsh_from_coefficients(coeffs, nu_opt, g) == pytest.approx(
            s_gamma(coeffs, nu_opt), abs=1e-12
        )


class TestConditions:
    def test_ideal_coefficients(self):
        assert conditions(Coefficients(1.0, 1.0, -1.0)) == (True, True)

    def test_no_interference(self):
        assert conditions(Coefficients(0.0, 1.0, 1.0)) == (False, False)

    def test_photocount_c2_implies_c1(self):
        # with c2 = 1 and c3 <= 1, condition C2 is the binding one
        rng = np.random.default_rng(23)
        for _ in range(500):
            c = Coefficients(rng.uniform(-1, 1), 1.0, rng.uniform(-1, 1))
            c1_ok, c2_ok = conditions(c)
            if c2_ok:
                assert c1_ok


class TestSMaxClosed:
    def test_ideal_coefficients(self):
        s, nu = s_max_closed(Coefficients(1.0, 1.0, -1.0))
        assert s == pytest.approx(TSIRELSON_BOUND, abs=1e-14)
        assert nu == pytest.approx(math.pi / 4, abs=1e-14)

    def test_boundary_when_conditions_fail(self):
        s, nu = s_max_closed(Coefficients(0.0, 1.0, 1.0))
        assert s == 2.0
        assert nu == 0.0

    def test_boundary_picks_larger_branch(self):
        s, nu = s_max_closed(Coefficients(0.0, 0.3, -0.8))
        assert s == pytest.approx(1.6, abs=1e-15)
        assert nu == pytest.approx(math.pi / 2, abs=1e-15)

    def test_interior_stationarity(self):
        # interior optimum satisfies (2 A sin^2 nu + B) sin nu = 0
        rng = np.random.default_rng(29)
        for _ in range(400):
            c = random_coefficients(rng)
            s, nu = s_max_closed(c)
            if 0.0 < nu < math.pi / 2:
                total = c.c2 + c.c3
                a_coef = total * total - 4.0 * c.c1 ** 2
                b_coef = 4.0 * c.c1 ** 2 - 2.0 * c.c2 * total
                residual = (2.0 * a_coef * math.sin(nu) ** 2 + b_coef) * math.sin(nu)
                assert abs(residual) <= 1e-10

    def test_dominates_random_nu(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            c = random_coefficients(rng)
            s, _ = s_max_closed(c)
            probes = rng.uniform(0.0, math.pi / 2, size=1000)
            assert max(s_gamma(c, float(nu)) for nu in probes) <= s + 1e-12

    def test_violation_implies_conditions(self):
        rng = np.random.default_rng(37)
        for _ in range(2000):
            c = random_coefficients(rng)
            s, _ = s_max_closed(c)
            if s > 2.0:
                assert conditions(c) == (True, True)

    def test_tsirelson_bound_holds(self):
        rng = np.random.default_rng(41)
        for _ in range(2000):
            s, _ = s_max_closed(random_coefficients(rng))
            assert s <= TSIRELSON_BOUND + 1e-9


class TestSMaxOverAlpha:
    def test_photocount_reference_maximum(self):
        result = s_max_over_alpha(ChannelSpec(), PHOTOCOUNT)
        assert result.s_value == pytest.approx(2.324, abs=5e-3)
        assert result.alpha_opt == pytest.approx(2.1, abs=0.1)
        assert result.c1_ok and result.c2_ok

    def test_two_homodyne_reference_maximum(self):
        result = s_max_over_alpha(ChannelSpec(), TWO_HOMODYNE)
        assert result.s_value == pytest.approx(2.29, abs=5e-3)
        assert result.nu_opt == math.pi / 4

    def test_two_homodyne_alpha_opt_range(self):
        result = s_max_over_alpha(ChannelSpec(t_line=0.75), TWO_HOMODYNE)
        assert 2.2 <= result.alpha_opt <= 3.0

    def test_monotone_in_transmission(self):
        values = [
            s_max_over_alpha(ChannelSpec(t_line=t), TWO_HOMODYNE).s_value
            for t in (0.7, 0.8, 0.9, 1.0)
        ]
        assert all(b >= a - 1e-8 for a, b in zip(values, values[1:]))

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            s_max_over_alpha(
                ChannelSpec(), PHOTOCOUNT, OptimizerSettings(alpha_grid=(1.0, 0.5, 0.1))
            )

    def test_result_within_quantum_bound(self):
        for t in (0.6, 0.8, 1.0):
            result = s_max_over_alpha(ChannelSpec(t_line=t), PHOTOCOUNT)
            assert 0.0 <= result.s_value <= TSIRELSON_BOUND + 1e-9

    def test_below_threshold_transmission_no_violation(self):
        result = s_max_over_alpha(ChannelSpec(t_line=0.6), TWO_HOMODYNE)
        assert result.s_value <= 2.0 + 1e-12


class TestAtomicInefficiency:
    def test_perfect_detection_reduces_to_two_homodyne_form(self):
        coeffs = Coefficients(0.6, 0.9, -0.9)
        for nu in (0.2, 0.7, 1.2):
            expected = 2.0 * math.sqrt(
                coeffs.c1 ** 2 * math.sin(2 * nu) ** 2 + coeffs.c2 ** 2
            )
            assert s_gamma_atomic(coeffs, nu, 1.0) == pytest.approx(expected, abs=1e-14)

    def test_blind_atom_gives_marginal(self):
        coeffs = Coefficients(0.6, 0.9, -0.9)
        assert s_gamma_atomic(coeffs, 0.0, 0.0) == pytest.approx(2 * 0.9, abs=1e-14)

    def test_accepts_array_nu(self):
        coeffs = Coefficients(0.6, 0.9, -0.9)
        grid = np.linspace(0.0, math.pi / 2, 7)
        values = s_gamma_atomic(coeffs, grid, 0.8)
        assert values.shape == grid.shape

    def test_perfect_eta_a_matches_two_homodyne_result(self):
        full = s_max_over_alpha(ChannelSpec(), TWO_HOMODYNE)
        atomic = s_max_atomic(ChannelSpec(eta_a=1.0))
        assert atomic.s_value == pytest.approx(full.s_value, abs=1e-6)

    def test_half_efficiency_below_local_bound(self):
        assert s_max_atomic(ChannelSpec(eta_a=0.5)).s_value < 2.0

    def test_at_threshold_efficiency_s_is_two(self):
        threshold = violation_threshold(TWO_HOMODYNE, "eta_a", ChannelSpec())
        result = s_max_atomic(ChannelSpec(eta_a=threshold))
        assert result.s_value == pytest.approx(2.0, abs=1e-3)


class TestTheorem1:
    def test_unit_efficiency_witness(self):
        witness = theorem1_witness(1.0)
        assert witness.found
        assert witness.s_value > 2.0
        # amplitude-exponent convention peaks at 2.2358 near alpha = 2.65
        assert witness.alpha == pytest.approx(2.6515, abs=0.05)
        assert witness.s_value == pytest.approx(2.23582, abs=1e-3)

    def test_low_efficiency_witness_satisfies_asymptotic_condition(self):
        witness = theorem1_witness(0.01)
        assert witness.found and witness.s_value > 2.0
        alpha = witness.alpha
        assert math.exp(-0.01 * alpha * alpha / 4.0) < math.sqrt(2.0 / math.pi) * 2.0 / alpha
        assert witness.asymptotic_alpha < alpha

    def test_near_product_state_does_not_violate(self):
        coeffs = scenario_coefficients(
            0.01,
            ChannelSpec(),
            Scenario(kind=ScenarioKind.PHOTOCOUNT, loss_convention=LossConvention.PAPER),
            b=1.0,
        )
        s, _ = s_max_closed(coeffs)
        assert s <= 2.0 + 1e-6

    def test_no_witness_below_cap(self):
        witness = theorem1_witness(0.001, alpha_search_max=50.0)
        assert not witness.found
        assert witness.alpha is None
        assert witness.asymptotic_alpha > 50.0

    def test_rejects_zero_eta(self):
        with pytest.raises(ValueError):
            theorem1_witness(0.0)


class TestViolationThreshold:
    def test_rejects_unknown_parameter(self):
        with pytest.raises(ValueError):
            violation_threshold(TWO_HOMODYNE, "eta", ChannelSpec())

    def test_eta_a_requires_two_homodyne(self):
        with pytest.raises(ValueError, match="two-homodyne"):
            violation_threshold(PHOTOCOUNT, "eta_a", ChannelSpec())

    def test_no_threshold_when_never_violating(self):
        # photocounting at eta = 0.01 needs amplitudes beyond the default grid
        with pytest.raises(ValueError, match="no threshold"):
            violation_threshold(PHOTOCOUNT, "t_line", ChannelSpec(eta=0.01))
