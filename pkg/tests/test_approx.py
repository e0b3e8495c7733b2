import math

import numpy as np
import pytest

from cayleyheat.approx import (
    ApproxSequenceConfig,
    build_chi_n,
    cexp_pushforward_factorized,
    check_power_diff,
    convergence_check_lemma37,
    rate_check_lemma35,
)
from cayleyheat.checks import sweep_mean_ineq, sweep_rsd
from cayleyheat.errors import DomainError
from cayleyheat.groups import (
    FiniteAbelianGroup,
    GroupFunction,
    cexp_spectral,
    delta,
    dft,
    idft,
    phi,
    SpectrumFunction,
)


class TestPowerDiff:
    def test_equal_inputs(self):
        assert check_power_diff(0.7, 0.7, 1.0, 5)

    def test_extreme_case(self):
        assert check_power_diff(2.0, 0.0, 2.0, 2)

    def test_random_bulk(self):
        rng = np.random.default_rng(42)
        for _ in range(10_000):
            C = rng.uniform(1e-3, 2.0)
            a, b = rng.uniform(0, C, 2)
            n = int(rng.integers(1, 61))
            assert check_power_diff(a, b, C, n)

    def test_precondition(self):
        with pytest.raises(DomainError):
            check_power_diff(3.0, 0.0, 2.0, 2)


class TestBuildChiN:
    def test_config_requires_n_above_alpha(self):
        G = FiniteAbelianGroup((12,))
        with pytest.raises(DomainError):
            ApproxSequenceConfig(5.0, G.element((1,)), 4)

    def test_first_shell_value(self):
        G = FiniteAbelianGroup((12,))
        res = build_chi_n(ApproxSequenceConfig(1.0, G.element((1,)), 100), G)
        assert abs(res.chi.values[1] - 0.01) < 1e-15
        assert res.chi.values[0] >= 1.0

    def test_second_shell_fourth_power(self):
        G = FiniteAbelianGroup((12,))
        res = build_chi_n(ApproxSequenceConfig(1.0, G.element((1,)), 100), G)
        assert abs(res.chi.values[2] - 1e-8) < 1e-16

    def test_sup_error_bound(self):
        # remainder after the {0, +-r_n} shell is a fourth-order theta tail
        G = FiniteAbelianGroup((12,))
        g0 = G.element((1,))
        for n in (16, 64, 256):
            alpha = 1.0
            res = build_chi_n(ApproxSequenceConfig(alpha, g0, n), G)
            target = delta(G) + (alpha / n) * phi(G, g0)
            err = (target - res.chi).sup_norm()
            assert err <= 3 * (alpha / n) ** 4


class TestLemma35Rate:
    def test_fitted_order_near_minus_four(self):
        G = FiniteAbelianGroup((12,))
        rr = rate_check_lemma35(1.0, G.element((1,)), G)
        assert rr.passed
        assert -4.5 <= rr.fitted_order <= -3.5

    def test_successive_ratios(self):
        G = FiniteAbelianGroup((12,))
        rr = rate_check_lemma35(1.0, G.element((1,)), G, ns=(16, 32, 64, 128, 256))
        for e_n, e_2n in zip(rr.errors, rr.errors[1:]):
            ratio = e_2n / e_n
            assert 2**-5 <= ratio <= 2**-3  # within a factor 2 of 2^-4

    def test_degenerate_g0_zero(self):
        G = FiniteAbelianGroup((12,))
        rr = rate_check_lemma35(1.0, G.identity, G, ns=(16, 32, 64, 128))
        assert rr.passed


class TestLemma37Convergence:
    def test_decreasing_on_z8(self):
        G = FiniteAbelianGroup((8,))
        rr = convergence_check_lemma37(1.0, G.element((1,)), G)
        assert rr.passed
        assert all(b < a for a, b in zip(rr.errors, rr.errors[1:]))

    def test_slope_near_euler_limit_order(self):
        # total error dominated by the (1 + x/n)^n - e^x gap, first order in 1/n
        G = FiniteAbelianGroup((8,))
        rr = convergence_check_lemma37(1.0, G.element((1,)), G, ns=(16, 64, 256))
        assert -1.5 <= rr.fitted_order <= -0.6

    def test_value_at_origin_converges(self):
        G = FiniteAbelianGroup((8,))
        g0 = G.element((1,))
        target = cexp_spectral(phi(G, g0)).values[0]
        chi = build_chi_n(ApproxSequenceConfig(1.0, g0, 1024), G).chi
        power = idft(SpectrumFunction(G, dft(chi).values ** 1024))
        assert abs(power.values[0] - target) < 5e-3

    def test_alpha_zero_edge(self):
        G = FiniteAbelianGroup((8,))
        res = build_chi_n(ApproxSequenceConfig(0.0, G.element((1,)), 16), G)
        assert np.allclose(res.chi.values, delta(G).values)


class TestLemma34Consequence:
    def test_spectral_power_gap_bound(self):
        # |a_n^n - b_n^n| <= e^{2 alpha} * n * |a_n - b_n| per character
        G = FiniteAbelianGroup((12,))
        g0 = G.element((1,))
        alpha = 1.0
        K = math.exp(2 * alpha)
        for n in (16, 64, 256):
            chi = build_chi_n(ApproxSequenceConfig(alpha, g0, n), G).chi
            a_n = 1.0 + alpha * dft(phi(G, g0)).values.real / n
            b_n = dft(chi).values.real
            gap = np.abs(a_n**n - b_n**n)
            bound = K * n * np.abs(a_n - b_n)
            assert np.all(gap <= bound + 1e-12)


class TestPushforwardPowersSatisfyInequalities:
    def test_chi_n_and_powers_pass_sweeps(self):
        G = FiniteAbelianGroup((8,))
        g0 = G.element((1,))
        for n in (16, 64):
            chi = build_chi_n(ApproxSequenceConfig(1.0, g0, n), G).chi
            power = idft(SpectrumFunction(G, dft(chi).values ** n))
            for f in (chi, power):
                assert sweep_rsd(f, 1e-12 * f.at_index(0) ** 4).passed
                assert sweep_mean_ineq(f, 1e-12 * f.at_index(0) ** 2).passed

    @pytest.mark.parametrize("alpha", [0.1, 1.0, 5.0])
    def test_cexp_phi_passes_mean_inequality(self, alpha):
        for sizes in [(24,), (2, 12), (3, 8)]:
            G = FiniteAbelianGroup(sizes)
            g0 = G.from_index(1)
            f = cexp_spectral(alpha * phi(G, g0))
            assert sweep_mean_ineq(f, 1e-9).passed


class TestFactorized:
    def test_single_orbit_reduces_to_power(self):
        G = FiniteAbelianGroup((8,))
        g0 = G.element((1,))
        u = 1.0 * phi(G, g0)
        out = cexp_pushforward_factorized(u, 256)
        chi = build_chi_n(ApproxSequenceConfig(1.0, g0, 256), G).chi
        power = idft(SpectrumFunction(G, dft(chi).values ** 256))
        assert np.max(np.abs(out.values - power.values)) < 1e-10

    def test_converges_to_cexp_on_z6(self):
        rng = np.random.default_rng(12)
        G = FiniteAbelianGroup((6,))
        v = rng.uniform(0, 1, 6)
        v = v + v[G.neg_index_table()]
        u = GroupFunction(G, v)
        out = cexp_pushforward_factorized(u, 256)
        target = cexp_spectral(u)
        assert np.max(np.abs(out.values - target.values)) < 0.05 * target.sup_norm()

    def test_result_even_nonnegative(self):
        G = FiniteAbelianGroup((6,))
        u = 0.8 * phi(G, G.element((2,)))
        out = cexp_pushforward_factorized(u, 64)
        assert out.is_even()
        assert np.all(out.values > -1e-12)
