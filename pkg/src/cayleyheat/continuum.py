"""Closed-form continuum heat kernel checks.

Hyperbolic 3-space in the hyperboloid model with its closed-form kernel;
the 2-sphere and real projective plane via truncated Legendre series.  The
geodesic-reflection inequality and its averaged consequence are evaluated
numerically, including the explicit hyperbolic configuration where the
reflection inequality fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .checks import CheckReport
from .errors import DomainError, NumericalConsistencyError

DEFAULT_L_MAX = 200
MIN_SPHERE_T = 0.05


# --- hyperbolic 3-space, hyperboloid model ---


@dataclass(frozen=True)
class HyperboloidPoint:
    x: np.ndarray  # (x0, x1, x2, x3)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.shape != (4,):
            raise DomainError("hyperboloid points are 4-vectors")
        q = x[0] ** 2 - x[1] ** 2 - x[2] ** 2 - x[3] ** 2
        if abs(q - 1.0) > 1e-8 * max(1.0, x[0] ** 2) or x[0] < 1.0 - 1e-10:
            raise DomainError(f"point not on the hyperboloid (form value {q})")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)


def minkowski(x: HyperboloidPoint, y: HyperboloidPoint) -> float:
    a, b = x.x, y.x
    return float(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3])


def h3_distance(x: HyperboloidPoint, y: HyperboloidPoint) -> float:
    """arccosh of the Minkowski pairing."""
    p = minkowski(x, y)
    if p < 1.0 - 1e-9:
        raise DomainError(f"Minkowski pairing {p} below 1; invalid points")
    return math.acosh(max(p, 1.0))


def _d_over_sinh(d: float) -> float:
    # Taylor guard against cancellation near 0
    if d < 1e-4:
        return 1.0 - d * d / 6.0 + 7.0 * d**4 / 360.0
    return d / math.sinh(d)


def h3_heat(d: float, t: float) -> float:
    """(4 pi t)^{-3/2} * (d/sinh d) * exp(-t - d^2/(4t))."""
    if t <= 0:
        raise DomainError("t must be positive")
    if d < 0:
        raise DomainError("distance must be nonnegative")
    return (
        (4.0 * math.pi * t) ** -1.5
        * _d_over_sinh(d)
        * math.exp(-t - d * d / (4.0 * t))
    )


def h3_abc(d1: float) -> tuple[HyperboloidPoint, HyperboloidPoint, HyperboloidPoint]:
    """The explicit isoceles configuration with leg length d1."""
    if d1 <= 0:
        raise DomainError("d1 must be positive")
    c, s = math.cosh(d1), math.sinh(d1)
    return (
        HyperboloidPoint(np.array([c, s, 0.0, 0.0])),
        HyperboloidPoint(np.array([1.0, 0.0, 0.0, 0.0])),
        HyperboloidPoint(np.array([c, 0.0, s, 0.0])),
    )


def h3_point_symmetry(b: HyperboloidPoint, c: HyperboloidPoint) -> HyperboloidPoint:
    """Geodesic reflection through b: 2<b,c>_M b - c."""
    p = minkowski(b, c)
    return HyperboloidPoint(2.0 * p * b.x - c.x)


def _log_d_over_sinh(d: float) -> float:
    if d < 1e-4:
        return math.log(_d_over_sinh(d))
    # log(sinh d) = d + log1p(-exp(-2d)) - log 2, stable for large d
    return math.log(d) - (d + math.log1p(-math.exp(-2.0 * d)) - math.log(2.0))


def h3_log_heat(d: float, t: float) -> float:
    """log of the closed-form kernel; usable far into the underflow regime."""
    if t <= 0:
        raise DomainError("t must be positive")
    return -1.5 * math.log(4.0 * math.pi * t) + _log_d_over_sinh(d) - t - d * d / (4.0 * t)


def h3_reduced_log(d1: float, t: float) -> tuple[float, float]:
    """(log LS, log RS) of the reduced reflection inequality."""
    if d1 <= 0 or t <= 0:
        raise DomainError("d1 and t must be positive")
    d2 = math.acosh(math.cosh(d1) ** 2)
    log_ls = 2.0 * _log_d_over_sinh(d1) - d1 * d1 / (2.0 * t)
    log_rs = _log_d_over_sinh(d2) - d2 * d2 / (4.0 * t)
    return log_ls, log_rs


def h3_reduced_check(d1: float, t: float) -> tuple[float, float, bool]:
    """Both sides of the reduced reflection inequality for the isoceles triple.

    LS = (d1^2/sinh^2 d1) exp(-d1^2/2t), RS = (d2/sinh d2) exp(-d2^2/4t)
    with d2 the base length; returns (LS, RS, violated).  Cross-validated
    in log space against the unreduced inequality built from the kernel and
    the geodesic reflection.
    """
    log_ls, log_rs = h3_reduced_log(d1, t)
    ls, rs = math.exp(log_ls), math.exp(log_rs)

    a, b, c = h3_abc(d1)
    # the unreduced log-ratio is twice the reduced one (common factors cancel)
    log_lhs_u = 2.0 * h3_log_heat(h3_distance(a, b), t) + 2.0 * h3_log_heat(
        h3_distance(b, c), t
    )
    log_rhs_u = (
        h3_log_heat(h3_distance(a, c), t)
        + h3_log_heat(h3_distance(a, h3_point_symmetry(b, c)), t)
        + 2.0 * h3_log_heat(0.0, t)
    )
    reduced_gap = log_ls - log_rs
    unreduced_gap = 0.5 * (log_lhs_u - log_rhs_u)
    if abs(reduced_gap - unreduced_gap) > 1e-10 * max(abs(reduced_gap), 1.0):
        raise NumericalConsistencyError(
            "reduced and unreduced inequality routes disagree"
        )
    return ls, rs, log_ls > log_rs


def h3_monotone_check(d: float, t_grid, tol: float = 1e-12) -> CheckReport:
    """Ratio H_t(d)/H_t(0) = (d/sinh d) exp(-d^2/4t) nondecreasing in t."""
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must be strictly increasing")
    ratios = _d_over_sinh(d) * np.exp(-d * d / (4.0 * t_grid))
    margins = np.diff(ratios)
    worst_i = int(np.argmin(margins))
    worst = float(margins[worst_i])
    return CheckReport(
        passed=worst >= -tol,
        worst_margin=worst,
        witness=f"d={d}, t={t_grid[worst_i]:.6g}, t'={t_grid[worst_i + 1]:.6g}",
        count=len(margins),
        name="h3_monotone",
    )


# --- sphere and projective plane via Legendre series ---


@dataclass(frozen=True)
class SpherePoint:
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.shape != (3,):
            raise DomainError("sphere points are unit 3-vectors")
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise DomainError("sphere point must have unit norm")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)


def _legendre_series(cos_theta, t: float, l_max: int, even_only: bool):
    """sum over l of (2l+1)/(4 pi) exp(-l(l+1)t) P_l(cos theta).

    Three-term recurrence; vectorized over cos_theta.  Returns (value,
    truncation bound per evaluation).
    """
    if l_max < 1:
        raise DomainError("l_max must be >= 1")
    if t <= 0:
        raise DomainError("t must be positive")
    x = np.asarray(cos_theta, dtype=float)
    if np.any((x < -1 - 1e-12) | (x > 1 + 1e-12)):
        raise DomainError("cos_theta must lie in [-1, 1]")
    x = np.clip(x, -1.0, 1.0)
    p_prev = np.ones_like(x)  # P_0
    p_curr = x.copy()  # P_1
    total = np.zeros_like(x)
    for l in range(0, l_max + 1):
        if l == 0:
            p_l = p_prev
        elif l == 1:
            p_l = p_curr
        else:
            p_l = ((2 * l - 1) * x * p_curr - (l - 1) * p_prev) / l
            p_prev, p_curr = p_curr, p_l
        if not even_only or l % 2 == 0:
            total += (2 * l + 1) / (4.0 * math.pi) * math.exp(-l * (l + 1) * t) * p_l
    # |P_l| <= 1, so the dropped tail is bounded termwise
    tail = 0.0
    for l in range(l_max + 1, l_max + 400):
        term = (2 * l + 1) / (4.0 * math.pi) * math.exp(-l * (l + 1) * t)
        tail += term
        if term < 1e-300:
            break
    return total, tail


def sphere_heat(cos_theta, t: float, l_max: int = DEFAULT_L_MAX):
    """Heat kernel on the unit 2-sphere as a function of the angle.

    Returns (value, truncation_bound); refuses when the bound is not
    small against the value.
    """
    val, tail = _legendre_series(cos_theta, t, l_max, even_only=False)
    ref = float(np.min(np.abs(val))) if np.ndim(val) else abs(float(val))
    if tail > 1e-3 * max(ref, 1e-300):
        raise NumericalConsistencyError(
            f"truncation bound {tail:.3e} too large; raise l_max or t"
        )
    return val, tail


def rp2_heat(cos_theta, t: float, l_max: int = DEFAULT_L_MAX):
    """Heat kernel on the projective plane: even-degree terms, doubled.

    The factor 2 is a quotient normalization; it cancels in the
    degree-balanced inequality checks.
    """
    val, tail = _legendre_series(cos_theta, t, l_max, even_only=True)
    val = 2.0 * val
    tail = 2.0 * tail
    ref = float(np.min(np.abs(val))) if np.ndim(val) else abs(float(val))
    if tail > 1e-3 * max(ref, 1e-300):
        raise NumericalConsistencyError(
            f"truncation bound {tail:.3e} too large; raise l_max or t"
        )
    return val, tail


def sphere_point_symmetry(b: SpherePoint, c: SpherePoint) -> SpherePoint:
    """Geodesic reflection through b: 2(b.c)b - c."""
    v = 2.0 * float(np.dot(b.u, c.u)) * b.u - c.u
    return SpherePoint(v / np.linalg.norm(v))


def random_sphere_point(rng: np.random.Generator) -> SpherePoint:
    v = rng.normal(size=3)
    return SpherePoint(v / np.linalg.norm(v))


def _space_kernel(space: str, cos_vals: np.ndarray, t: float, l_max: int):
    if space == "S2":
        return sphere_heat(cos_vals, t, l_max)
    if space == "RP2":
        return rp2_heat(cos_vals, t, l_max)
    raise DomainError(f"unknown series space {space!r}")


def symmetric_ineq_check_sphere(
    space: str,
    a: SpherePoint,
    b: SpherePoint,
    c: SpherePoint,
    t: float,
    tol: float = 0.0,
    l_max: int = DEFAULT_L_MAX,
) -> CheckReport:
    """H(a,b)^2 H(b,c)^2 <= H(a,c) H(a,s_b(c)) H(a,a)^2 on S2 or RP2.

    The tolerance is widened by ten times the combined truncation bounds,
    so series truncation can never manufacture a violation.
    """
    sbc = sphere_point_symmetry(b, c)
    cos_vals = np.array(
        [
            float(np.dot(a.u, b.u)),
            float(np.dot(b.u, c.u)),
            float(np.dot(a.u, c.u)),
            float(np.dot(a.u, sbc.u)),
            1.0,
        ]
    )
    vals, tail = _space_kernel(space, cos_vals, t, l_max)
    hab, hbc, hac, hasbc, haa = (float(v) for v in vals)
    lhs = hab**2 * hbc**2
    rhs = hac * hasbc * haa**2
    # per-evaluation error: truncation tail plus series roundoff; |P_l| <= 1
    # bounds the termwise absolute sum by the value at distance zero
    per_eval = 10.0 * tail + 100.0 * np.finfo(float).eps * haa
    # crude first-order sensitivity of each side to per-evaluation error
    trunc = per_eval * (
        2 * abs(hab) * hbc**2
        + 2 * abs(hbc) * hab**2
        + abs(hasbc * haa**2)
        + abs(hac * haa**2)
        + 2 * abs(hac * hasbc * haa)
    )
    margin = rhs - lhs
    return CheckReport(
        passed=margin >= -(tol + trunc),
        worst_margin=margin,
        witness=f"space={space}, t={t}",
        count=1,
        name="symmetric_ineq",
    )


def heat_lemma_check_sphere(
    space: str,
    a: SpherePoint,
    b: SpherePoint,
    c: SpherePoint,
    t: float,
    tol: float = 0.0,
    l_max: int = DEFAULT_L_MAX,
) -> CheckReport:
    """H(a,b)H(b,c)/H(a,a) <= (H(a,c) + H(a,s_b(c)))/2 on S2 or RP2."""
    sbc = sphere_point_symmetry(b, c)
    cos_vals = np.array(
        [
            float(np.dot(a.u, b.u)),
            float(np.dot(b.u, c.u)),
            float(np.dot(a.u, c.u)),
            float(np.dot(a.u, sbc.u)),
            1.0,
        ]
    )
    vals, tail = _space_kernel(space, cos_vals, t, l_max)
    hab, hbc, hac, hasbc, haa = (float(v) for v in vals)
    lhs = hab * hbc / haa
    rhs = 0.5 * (hac + hasbc)
    per_eval = 10.0 * tail + 100.0 * np.finfo(float).eps * haa
    trunc = per_eval * (abs(hab) / haa + abs(hbc) / haa + 1.0 + lhs / haa)
    margin = rhs - lhs
    return CheckReport(
        passed=margin >= -(tol + trunc),
        worst_margin=margin,
        witness=f"space={space}, t={t}",
        count=1,
        name="heat_lemma",
    )


def symmetric_ineq_check_h3(
    a: HyperboloidPoint,
    b: HyperboloidPoint,
    c: HyperboloidPoint,
    t: float,
    tol: float = 0.0,
) -> CheckReport:
    """The reflection inequality on hyperbolic 3-space (closed form)."""
    sbc = h3_point_symmetry(b, c)
    lhs = h3_heat(h3_distance(a, b), t) ** 2 * h3_heat(h3_distance(b, c), t) ** 2
    rhs = (
        h3_heat(h3_distance(a, c), t)
        * h3_heat(h3_distance(a, sbc), t)
        * h3_heat(0.0, t) ** 2
    )
    margin = rhs - lhs
    return CheckReport(
        passed=margin >= -tol,
        worst_margin=margin,
        witness=f"space=H3, t={t}",
        count=1,
        name="symmetric_ineq",
    )


def heat_lemma_check_h3(
    a: HyperboloidPoint,
    b: HyperboloidPoint,
    c: HyperboloidPoint,
    t: float,
    tol: float = 0.0,
) -> CheckReport:
    sbc = h3_point_symmetry(b, c)
    haa = h3_heat(0.0, t)
    lhs = h3_heat(h3_distance(a, b), t) * h3_heat(h3_distance(b, c), t) / haa
    rhs = 0.5 * (
        h3_heat(h3_distance(a, c), t) + h3_heat(h3_distance(a, sbc), t)
    )
    margin = rhs - lhs
    return CheckReport(
        passed=margin >= -tol,
        worst_margin=margin,
        witness="space=H3",
        count=1,
        name="heat_lemma",
    )


def sphere_monotone_check(
    cos_theta: float, t_grid, l_max: int = DEFAULT_L_MAX, tol: float = 0.0
) -> CheckReport:
    """H_t(theta)/H_t(0) nondecreasing in t on the sphere."""
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must be strictly increasing")
    ratios = []
    tails = []
    for t in t_grid:
        vals, tail = sphere_heat(np.array([cos_theta, 1.0]), float(t), l_max)
        ratios.append(float(vals[0] / vals[1]))
        tails.append(tail / float(vals[1]))
    margins = np.diff(ratios)
    worst_i = int(np.argmin(margins))
    worst = float(margins[worst_i])
    trunc = 10.0 * max(tails)
    return CheckReport(
        passed=worst >= -(tol + trunc),
        worst_margin=worst,
        witness=f"t={t_grid[worst_i]:.6g}, t'={t_grid[worst_i + 1]:.6g}",
        count=len(margins),
        name="sphere_monotone",
    )
