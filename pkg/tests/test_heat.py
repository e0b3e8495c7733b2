import json
import math

import numpy as np
import pytest

from cayleyheat.errors import DomainError
from cayleyheat.groups import FiniteAbelianGroup, GroupFunction, cexp_series, convolve
from cayleyheat.heat import (
    CayleyWeights,
    GeneralGraph,
    ctrw_simulate,
    default_t_grid,
    heat_matrix_general,
    heat_row_cayley,
    monotone_check_cayley,
    monotone_violation_search,
    random_heavy_tailed_graph,
    search_monotonicity_violations,
    tau_from_weights,
)

GROUP_POOL = [
    (2,), (3,), (5,), (8,), (12,), (17,), (24,),
    (2, 2), (2, 4), (3, 3), (2, 2, 2), (6, 4),
]


def random_weights(G, rng, scale=2.0):
    v = rng.uniform(0, scale, G.order)
    v = v + v[G.neg_index_table()]
    v[0] = 0.0
    return CayleyWeights(G, GroupFunction(G, v))


def unit_cycle_weights(n):
    G = FiniteAbelianGroup((n,))
    v = np.zeros(n)
    v[1] = 1.0
    v[n - 1] += 1.0 if n > 2 else 0.0
    if n == 2:
        v[1] = 1.0
    return CayleyWeights(G, GroupFunction(G, v))


class TestCayleyWeights:
    def test_rejects_identity_weight(self):
        G = FiniteAbelianGroup((4,))
        with pytest.raises(DomainError):
            CayleyWeights(G, GroupFunction(G, np.array([1.0, 0, 0, 0])))

    def test_rejects_uneven(self):
        G = FiniteAbelianGroup((4,))
        with pytest.raises(DomainError):
            CayleyWeights(G, GroupFunction(G, np.array([0.0, 1.0, 0, 0])))

    def test_from_dict_mirrors(self):
        cw = CayleyWeights.from_dict({"group": "Z12", "weights": {"1": 2.5, "3": 1.0}})
        assert cw.w.values[1] == 2.5
        assert cw.w.values[11] == 2.5
        assert cw.w.values[9] == 1.0
        assert cw.degree == 2 * (2.5 + 1.0)

    def test_from_dict_rejects_identity_index(self):
        with pytest.raises(DomainError):
            CayleyWeights.from_dict({"group": "Z4", "weights": {"0": 1.0}})


class TestTau:
    def test_z2(self):
        G = FiniteAbelianGroup((2,))
        cw = CayleyWeights(G, GroupFunction(G, np.array([0.0, 1.0])))
        assert tau_from_weights(cw).values.tolist() == [-1.0, 1.0]

    def test_row_sum_zero(self):
        rng = np.random.default_rng(1)
        G = FiniteAbelianGroup((3, 4))
        cw = random_weights(G, rng)
        assert abs(tau_from_weights(cw).values.sum()) < 1e-12

    def test_z4_unit(self):
        G = FiniteAbelianGroup((4,))
        cw = CayleyWeights(G, GroupFunction(G, np.array([0.0, 1.0, 0.0, 1.0])))
        assert tau_from_weights(cw).values.tolist() == [-2.0, 1.0, 0.0, 1.0]


class TestHeatRowCayley:
    def test_z2_closed_form(self):
        G = FiniteAbelianGroup((2,))
        cw = CayleyWeights(G, GroupFunction(G, np.array([0.0, 1.0])))
        for t in (0.1, 1.0, 5.0):
            row = heat_row_cayley(cw, t).values.values
            assert abs(row[0] - (1 + math.exp(-2 * t)) / 2) < 1e-12
            assert abs(row[1] - (1 - math.exp(-2 * t)) / 2) < 1e-12

    def test_z3_closed_form(self):
        G = FiniteAbelianGroup((3,))
        cw = CayleyWeights(G, GroupFunction(G, np.array([0.0, 1.0, 1.0])))
        t = 0.9
        row = heat_row_cayley(cw, t).values.values
        assert abs(row[0] - (1 + 2 * math.exp(-3 * t)) / 3) < 1e-12

    def test_t_to_zero_approaches_delta(self):
        rng = np.random.default_rng(2)
        G = FiniteAbelianGroup((8,))
        cw = random_weights(G, rng)
        row = heat_row_cayley(cw, 1e-8).values.values
        assert row[0] > 1 - 1e-6
        assert np.all(row[1:] < 1e-6)

    def test_row_sums_to_one_and_positive(self):
        rng = np.random.default_rng(3)
        G = FiniteAbelianGroup((12,))
        cw = random_weights(G, rng)
        for t in (1e-3, 0.1, 1.0, 10.0, 100.0):
            row = heat_row_cayley(cw, t).values.values
            assert abs(row.sum() - 1.0) < 1e-10
            assert np.all(row > 0)

    def test_semigroup(self):
        rng = np.random.default_rng(4)
        G = FiniteAbelianGroup((2, 4))
        cw = random_weights(G, rng)
        a = heat_row_cayley(cw, 0.6).values
        b = heat_row_cayley(cw, 1.1).values
        ab = heat_row_cayley(cw, 1.7).values
        assert np.max(np.abs(convolve(a, b).values - ab.values)) < 1e-10

    def test_matches_series_route(self):
        # exp(-t*deg) * cexp(t*w) computed directly via the series definition
        rng = np.random.default_rng(5)
        G = FiniteAbelianGroup((6,))
        cw = random_weights(G, rng, scale=1.0)
        t = 0.8
        row = heat_row_cayley(cw, t).values.values
        series = math.exp(-t * cw.degree) * cexp_series(t * cw.w, 1e-15).values
        assert np.max(np.abs(row - series)) < 1e-9

    def test_rejects_nonpositive_t(self):
        G = FiniteAbelianGroup((2,))
        cw = CayleyWeights(G, GroupFunction(G, np.array([0.0, 1.0])))
        with pytest.raises(DomainError):
            heat_row_cayley(cw, 0.0)


class TestHeatMatrixGeneral:
    def test_single_edge_closed_form(self):
        w = 1.7
        g = GeneralGraph(np.array([[0.0, w], [w, 0.0]]))
        t = 0.6
        H = heat_matrix_general(g, t)
        assert abs(H[1, 1] - (1 + math.exp(-2 * w * t)) / 2) < 1e-12

    def test_t_to_zero_identity(self):
        g = GeneralGraph(np.array([[0.0, 1.0, 0.5], [1.0, 0, 0], [0.5, 0, 0]]))
        H = heat_matrix_general(g, 1e-9)
        assert np.max(np.abs(H - np.eye(3))) < 1e-6

    def test_doubly_stochastic_symmetric(self):
        rng = np.random.default_rng(6)
        g = random_heavy_tailed_graph(6, rng)
        H = heat_matrix_general(g, 0.3)
        assert np.allclose(H, H.T, atol=1e-9)
        assert np.allclose(H.sum(axis=1), 1.0, atol=1e-9)
        assert np.min(H) >= -1e-12

    def test_matches_cayley_on_circulant(self):
        rng = np.random.default_rng(7)
        for trial in range(25):
            sizes = GROUP_POOL[trial % len(GROUP_POOL)]
            G = FiniteAbelianGroup(sizes)
            cw = random_weights(G, rng)
            n = G.order
            sub = G.sub_index_table()
            W = cw.w.values[sub]
            H = heat_matrix_general(GeneralGraph(W), 0.9)
            row = heat_row_cayley(cw, 0.9).values.values
            assert np.max(np.abs(H[0] - row)) < 1e-9

    def test_rejects_asymmetric(self):
        with pytest.raises(DomainError):
            GeneralGraph(np.array([[0.0, 1.0], [2.0, 0.0]]))


class TestMonotonicity:
    def test_z2_ratio_is_tanh(self):
        G = FiniteAbelianGroup((2,))
        cw = CayleyWeights(G, GroupFunction(G, np.array([0.0, 1.0])))
        row = heat_row_cayley(cw, 1.0).values.values
        assert abs(row[1] / row[0] - 0.7615941559557649) < 1e-10

    def test_random_z12_sweep(self):
        rng = np.random.default_rng(8)
        G = FiniteAbelianGroup((12,))
        grid = 0.1 * 1.3 ** np.arange(21)
        for _ in range(10):
            cw = random_weights(G, rng)
            assert monotone_check_cayley(cw, grid, 1e-10).passed

    def test_identity_ratio_constant(self):
        rng = np.random.default_rng(9)
        G = FiniteAbelianGroup((6,))
        cw = random_weights(G, rng)
        for t in (0.2, 2.0):
            row = heat_row_cayley(cw, t).values.values
            assert row[0] / row[0] == 1.0

    def test_disconnected_support_trivially_monotone(self):
        # weights generating a proper subgroup: unreachable ratios stay 0
        G = FiniteAbelianGroup((8,))
        v = np.zeros(8)
        v[2] = v[6] = 1.0
        cw = CayleyWeights(G, GroupFunction(G, v))
        rep = monotone_check_cayley(cw, default_t_grid(count=10), 1e-10)
        assert rep.passed

    def test_sweep_over_group_pool(self):
        rng = np.random.default_rng(10)
        grid = default_t_grid(count=10)
        for sizes in GROUP_POOL:
            cw = random_weights(FiniteAbelianGroup(sizes), rng)
            assert monotone_check_cayley(cw, grid, 1e-10).passed

    def test_complete_graph_no_violation(self):
        n = 5
        W = np.ones((n, n)) - np.eye(n)
        rep = monotone_violation_search(GeneralGraph(W), default_t_grid(count=10))
        assert rep.passed

    def test_cayley_instance_no_violation_general_route(self):
        G = FiniteAbelianGroup((6,))
        cw = random_weights(G, np.random.default_rng(11))
        W = cw.w.values[G.sub_index_table()]
        rep = monotone_violation_search(GeneralGraph(W), default_t_grid(count=10))
        assert rep.passed

    def test_violation_search_finds_instance(self):
        found = search_monotonicity_violations(8, 5000, seed=7)
        assert found, "no violating graph found within budget"
        g, rep = found[0]
        assert not rep.passed
        # re-verify the witness on a fresh check
        again = monotone_violation_search(g, default_t_grid())
        assert not again.passed


class TestCTRW:
    def test_small_t_stays_home(self):
        G = FiniteAbelianGroup((6,))
        cw = CayleyWeights.from_dict({"group": "Z6", "weights": {"1": 1.0}})
        emp = ctrw_simulate(cw, 1e-4, 20_000, seed=1)
        assert emp.values[0] > 0.999

    def test_z2_binomial_bound(self):
        G = FiniteAbelianGroup((2,))
        cw = CayleyWeights(G, GroupFunction(G, np.array([0.0, 1.0])))
        trials = 10**6
        emp = ctrw_simulate(cw, 1.0, trials, seed=42)
        p = 0.43233235838169365  # (1 - e^-2)/2
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(emp.values[1] - p) < 3 * sigma

    def test_z6_total_variation(self):
        cw = CayleyWeights.from_dict({"group": "Z6", "weights": {"1": 1.0}})
        emp = ctrw_simulate(cw, 0.7, 10**6, seed=7)
        row = heat_row_cayley(cw, 0.7).values.values
        tv = 0.5 * float(np.sum(np.abs(emp.values - row)))
        assert tv < 0.005

    def test_deterministic_given_seed(self):
        cw = CayleyWeights.from_dict({"group": "Z6", "weights": {"1": 1.0, "2": 0.5}})
        a = ctrw_simulate(cw, 0.5, 10_000, seed=3)
        b = ctrw_simulate(cw, 0.5, 10_000, seed=3)
        assert np.array_equal(a.values, b.values)

    def test_zero_degree_stays_at_identity(self):
        G = FiniteAbelianGroup((4,))
        cw = CayleyWeights(G, GroupFunction(G, np.zeros(4)))
        emp = ctrw_simulate(cw, 1.0, 100, seed=0)
        assert emp.values[0] == 1.0
