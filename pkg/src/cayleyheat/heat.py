"""Heat kernels on weighted Abelian Cayley graphs and on arbitrary weighted
graphs, monotonicity checks, violation search and Monte Carlo validation.

On a Cayley graph the kernel is translation-invariant, so a single row
(based at the identity) determines the whole matrix; it is computed as
exp(-t*deg) times the convolutional exponential of the t-scaled weights.
Arbitrary graphs go through a dense symmetric eigendecomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .checks import CheckReport
from .errors import DomainError
from .groups import FiniteAbelianGroup, GroupFunction, cexp_spectral, parse_group
from .lattices import DEFAULT_EPSILON


def default_t_grid(t_min: float = 0.05, t_max: float = 50.0, count: int = 20) -> np.ndarray:
    if not (t_min > 0 and t_max > t_min and count >= 2):
        raise DomainError("need 0 < t_min < t_max and count >= 2")
    return np.geomspace(t_min, t_max, count)


@dataclass(frozen=True)
class CayleyWeights:
    """Even nonnegative weight function on G \\ {0}."""

    group: FiniteAbelianGroup
    w: GroupFunction

    def __post_init__(self):
        if self.w.group != self.group:
            raise DomainError("weight function lives on the wrong group")
        v = self.w.values
        if v[0] != 0:
            raise DomainError("weight at the identity must be 0")
        if np.any(v < 0):
            raise DomainError("weights must be nonnegative")
        if not self.w.is_even():
            raise DomainError("weights must be even: w(g) = w(-g)")

    @property
    def degree(self) -> float:
        return float(np.sum(self.w.values))

    @staticmethod
    def from_dict(spec: dict) -> "CayleyWeights":
        """Parse {"group": "Z12", "weights": {"1": 2.5, ...}}.

        Keys are element indices of one representative per orbit; evenness
        is enforced by mirroring onto the negation.
        """
        group = parse_group(str(spec["group"]))
        vals = np.zeros(group.order)
        neg = group.neg_index_table()
        for key, weight in dict(spec["weights"]).items():
            idx = int(key)
            if idx == 0:
                raise DomainError("weight at index 0 (the identity) is not allowed")
            if not 0 < idx < group.order:
                raise DomainError(f"element index {idx} out of range")
            weight = float(weight)
            if weight < 0:
                raise DomainError("weights must be nonnegative")
            vals[idx] = weight
            vals[neg[idx]] = weight
        return CayleyWeights(group, GroupFunction(group, vals))


@dataclass(frozen=True)
class GeneralGraph:
    """Arbitrary finite weighted undirected graph as a symmetric matrix."""

    W: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise DomainError("weight matrix must be square")
        if not np.allclose(W, W.T, rtol=0, atol=1e-12):
            raise DomainError("weight matrix must be symmetric")
        if np.any(W < 0):
            raise DomainError("weights must be nonnegative")
        if np.any(np.abs(np.diag(W)) > 0):
            raise DomainError("diagonal must be zero")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return self.W.shape[0]

    def laplacian(self) -> np.ndarray:
        return np.diag(self.W.sum(axis=1)) - self.W


@dataclass(frozen=True)
class HeatRow:
    t: float
    values: GroupFunction


def tau_from_weights(cw: CayleyWeights) -> GroupFunction:
    """Negated Laplacian row at the identity: weights off 0, -degree at 0."""
    v = cw.w.values.copy()
    v[0] = -cw.degree
    return GroupFunction(cw.group, v)


def heat_row_cayley(cw: CayleyWeights, t: float) -> HeatRow:
    """Row of exp(-tL) based at the identity: exp(-t*deg) * cexp(t*w).

    The degree shift is applied inside the spectral exponential; the
    exponents t*(w_hat(k) - deg) are never positive, so no overflow at
    large t.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    from .groups import SpectrumFunction, dft, idft

    spec = np.exp(t * dft(cw.w).values - t * cw.degree)
    row = idft(SpectrumFunction(cw.group, spec))
    return HeatRow(t, row)


def heat_matrix_general(g: GeneralGraph, t: float) -> np.ndarray:
    """exp(-tL) via symmetric eigendecomposition."""
    if t <= 0:
        raise DomainError("t must be positive")
    L = g.laplacian()
    evals, Q = np.linalg.eigh(L)
    return (Q * np.exp(-t * evals)) @ Q.T


def monotone_check_cayley(
    cw: CayleyWeights, t_grid, tol: float = 1e-10
) -> CheckReport:
    """Ratio H_t(0,v)/H_t(0,0) must be nondecreasing in t for every v."""
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must be strictly increasing with length >= 2")
    worst = math.inf
    witness = ""
    count = 0
    prev = None
    prev_t = None
    for t in t_grid:
        row = heat_row_cayley(cw, float(t)).values.values
        ratio = row / row[0]
        if prev is not None:
            margins = ratio - prev
            v = int(np.argmin(margins))
            count += len(margins)
            if margins[v] < worst:
                worst = float(margins[v])
                witness = f"v={cw.group.from_index(v)}, t={prev_t:.6g}, t'={t:.6g}"
        prev, prev_t = ratio, t
    return CheckReport(
        passed=worst >= -tol,
        worst_margin=worst,
        witness=witness,
        count=count,
        name="monotone_cayley",
    )


def monotone_violation_search(
    g: GeneralGraph, t_grid, tol: float = 1e-10
) -> CheckReport:
    """Same monotonicity check on an arbitrary graph, for all basepoints.

    A failed report here is a successful reproduction of the known
    non-Cayley violation phenomenon, so callers treat passed=False as a
    find, not an error.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must be strictly increasing with length >= 2")
    worst = math.inf
    witness = ""
    count = 0
    prev = None
    prev_t = None
    for t in t_grid:
        H = heat_matrix_general(g, float(t))
        ratio = H / np.diag(H)[:, None]
        if prev is not None:
            margins = ratio - prev
            u, v = np.unravel_index(int(np.argmin(margins)), margins.shape)
            count += margins.size
            if margins[u, v] < worst:
                worst = float(margins[u, v])
                witness = f"u={u}, v={v}, t={prev_t:.6g}, t'={t:.6g}"
        prev, prev_t = ratio, t
    return CheckReport(
        passed=worst >= -tol,
        worst_margin=worst,
        witness=witness,
        count=count,
        name="monotone_general",
    )


def random_heavy_tailed_graph(n: int, rng: np.random.Generator, density: float = 0.6) -> GeneralGraph:
    """Random symmetric weight matrix with Pareto-distributed edge weights."""
    W = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                W[i, j] = W[j, i] = rng.pareto(0.8) + 0.01
    return GeneralGraph(W)


def search_monotonicity_violations(
    n_max: int,
    trials: int,
    seed: int,
    t_grid=None,
    tol: float = 1e-10,
    stop_after: int = 1,
):
    """Random search for graphs violating ratio monotonicity.

    Returns a list of (graph, report) pairs for the violating instances
    found, at most ``stop_after`` of them.
    """
    if t_grid is None:
        t_grid = default_t_grid()
    rng = np.random.default_rng(seed)
    found = []
    for _ in range(trials):
        n = int(rng.integers(3, n_max + 1))
        g = random_heavy_tailed_graph(n, rng)
        report = monotone_violation_search(g, t_grid, tol)
        if not report.passed:
            found.append((g, report))
            if len(found) >= stop_after:
                break
    return found


def ctrw_simulate(
    cw: CayleyWeights, t: float, trials: int, seed: int
) -> GroupFunction:
    """Empirical time-t distribution of the continuous-time walk from 0.

    The walk holds for Exp(degree) times and jumps by s with probability
    w(s)/degree.  Splitting the Poisson jump stream by generator gives
    independent Poisson(w(s)*t) counts per generator, and since the group
    is Abelian the endpoint depends only on those counts; that exact
    representation is what is sampled.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if t <= 0:
        raise DomainError("t must be positive")
    G = cw.group
    rng = np.random.default_rng(seed)
    support = np.nonzero(cw.w.values)[0]
    if len(support) == 0:
        freq = np.zeros(G.order)
        freq[0] = 1.0
        return GroupFunction(G, freq)
    res = np.zeros((trials, G.rank), dtype=np.int64)
    sizes = np.array(G.factor_sizes, dtype=np.int64)
    for idx in support:
        counts = rng.poisson(cw.w.values[idx] * t, size=trials)
        step = np.array(G.residues_of(int(idx)), dtype=np.int64)
        res = (res + counts[:, None] * step[None, :]) % sizes
    flat = np.ravel_multi_index(tuple(res.T), G.factor_sizes)
    freq = np.bincount(flat, minlength=G.order) / trials
    return GroupFunction(G, freq)
