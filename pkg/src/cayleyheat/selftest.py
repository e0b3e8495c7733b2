"""Reduced-scale invariant suite behind the `selftest` CLI command.

Each entry exercises one module invariant at a scale that keeps the whole
run well under a minute; the first failure is reported by name.
"""

from __future__ import annotations

import math

import numpy as np

from . import checks
from .approx import (
    ApproxSequenceConfig,
    build_chi_n,
    check_power_diff,
    convergence_check_lemma37,
    rate_check_lemma35,
)
from .continuum import h3_monotone_check, h3_reduced_check, sphere_monotone_check
from .groups import (
    FiniteAbelianGroup,
    cexp_series,
    cexp_spectral,
    convolve,
    delta,
    dft,
    idft,
    phi,
    phi_basis_decompose,
    recompose,
)
from .heat import (
    CayleyWeights,
    GeneralGraph,
    GroupFunction,
    default_t_grid,
    heat_matrix_general,
    heat_row_cayley,
    monotone_check_cayley,
)
from .lattices import Lattice, LatticeHom, direct_sum, fiber_product, pushforward


def _rng():
    return np.random.default_rng(12345)


def _random_even_nonneg(G, rng):
    v = rng.uniform(0, 1, G.order)
    v = v + v[G.neg_index_table()]
    return GroupFunction(G, v)


def _check_group_core():
    G = FiniteAbelianGroup((2, 3, 4))
    rng = _rng()
    f = GroupFunction(G, rng.normal(size=G.order))
    g = GroupFunction(G, rng.normal(size=G.order))
    assert np.allclose(
        convolve(f, g, "direct").values, convolve(f, g, "spectral").values, atol=1e-10
    )
    assert np.allclose(idft(dft(f)).values, f.values, atol=1e-12)
    u = _random_even_nonneg(G, rng)
    assert np.allclose(
        cexp_series(u, 1e-14).values, cexp_spectral(u).values, rtol=1e-9, atol=1e-12
    )
    assert np.allclose(recompose(G, phi_basis_decompose(u)).values, u.values)


def _check_pushforward_closure():
    G = FiniteAbelianGroup((6,))
    rng = _rng()
    for _ in range(5):
        d = int(rng.integers(1, 3))
        B = rng.uniform(-1.5, 1.5, (d, d))
        while np.linalg.svd(B, compute_uv=False)[-1] < 0.3:
            B = rng.uniform(-1.5, 1.5, (d, d))
        h1 = LatticeHom(
            Lattice(B), G, tuple(G.from_index(int(rng.integers(6))) for _ in range(d))
        )
        h2 = LatticeHom(
            Lattice.integers(rng.uniform(0.7, 1.5)), G, (G.from_index(int(rng.integers(6))),)
        )
        chi1 = pushforward(h1).chi
        chi2 = pushforward(h2).chi
        ds = pushforward(direct_sum(h1, h2)).chi
        assert np.max(np.abs(ds.values - convolve(chi1, chi2).values)) < 1e-8
        fp = pushforward(fiber_product(h1, h2)).chi
        assert np.max(np.abs(fp.values - chi1.values * chi2.values)) < 1e-8
        scale = chi1.at_index(0)
        assert checks.sweep_rsd(chi1, 1e-12 * scale**4).passed
        assert checks.sweep_mean_ineq(chi1, 1e-12 * scale**2).passed


def _check_rate_lemma35():
    G = FiniteAbelianGroup((12,))
    rr = rate_check_lemma35(1.0, G.from_index(1), G, ns=(16, 32, 64, 128))
    assert rr.passed, f"fitted order {rr.fitted_order}"


def _check_convergence_lemma37():
    G = FiniteAbelianGroup((8,))
    rr = convergence_check_lemma37(1.0, G.from_index(1), G, ns=(16, 64, 256))
    assert rr.passed


def _check_power_diff_samples():
    rng = _rng()
    for _ in range(500):
        C = rng.uniform(0.1, 2.0)
        a, b = rng.uniform(0, C, 2)
        n = int(rng.integers(1, 60))
        assert check_power_diff(a, b, C, n)


def _check_heat_cayley():
    G = FiniteAbelianGroup((2,))
    w = GroupFunction(G, np.array([0.0, 1.0]))
    cw = CayleyWeights(G, w)
    row = heat_row_cayley(cw, 1.0).values.values
    assert abs(row[0] - (1 + math.exp(-2)) / 2) < 1e-12
    assert abs(row[1] / row[0] - math.tanh(1.0)) < 1e-12
    rng = _rng()
    G12 = FiniteAbelianGroup((12,))
    v = rng.uniform(0, 2, 12)
    v = v + v[G12.neg_index_table()]
    v[0] = 0
    cw12 = CayleyWeights(G12, GroupFunction(G12, v))
    assert monotone_check_cayley(cw12, default_t_grid(count=12), 1e-10).passed
    # circulant embedding agrees with the eigensolver route
    W = np.zeros((12, 12))
    for i in range(12):
        for j in range(12):
            if i != j:
                W[i, j] = v[(i - j) % 12]
    H = heat_matrix_general(GeneralGraph(W), 0.7)
    row = heat_row_cayley(cw12, 0.7).values.values
    assert np.max(np.abs(H[0] - row)) < 1e-9


def _check_continuum():
    ls, rs, violated = h3_reduced_check(3.0, 1.0)
    assert violated and ls > rs
    assert h3_monotone_check(2.0, np.geomspace(0.1, 10, 15)).passed
    assert sphere_monotone_check(0.0, np.geomspace(0.1, 5, 10)).passed


INVARIANTS = [
    ("group_core", _check_group_core),
    ("pushforward_closure_and_inequalities", _check_pushforward_closure),
    ("lemma35_rate", _check_rate_lemma35),
    ("lemma37_convergence", _check_convergence_lemma37),
    ("power_diff_bound", _check_power_diff_samples),
    ("cayley_heat", _check_heat_cayley),
    ("continuum", _check_continuum),
]


def run(verbose: bool = False) -> list[str]:
    """Run every invariant; returns the names of the failures."""
    failures = []
    for name, fn in INVARIANTS:
        try:
            fn()
            if verbose:
                print(f"PASS {name}")
        except AssertionError as exc:
            failures.append(name)
            if verbose:
                print(f"FAIL {name}: {exc}")
        except Exception as exc:  # invariant machinery itself broke
            failures.append(name)
            if verbose:
                print(f"ERROR {name}: {exc!r}")
    return failures
