"""Inequality checkers for Gaussian pushforwards and their convolutions.

Each check returns a CheckReport; ``passed`` means the worst margin (RHS
minus LHS under the check's sign convention) stayed above minus the
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .groups import GroupElement, GroupFunction


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    worst_margin: float
    witness: str
    count: int
    name: str = "check"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "witness": self.witness,
            "count": self.count,
        }


def check_rsd(
    chi: GroupFunction, g1: GroupElement, g2: GroupElement, tol: float
) -> CheckReport:
    """chi(g1)^2 chi(g2)^2 <= chi(g1+g2) chi(g1-g2) chi(0)^2."""
    if chi.at_index(0) <= 0:
        raise DomainError("check requires chi(0) > 0")
    lhs = chi(g1) ** 2 * chi(g2) ** 2
    rhs = chi(g1 + g2) * chi(g1 - g2) * chi.at_index(0) ** 2
    margin = rhs - lhs
    return CheckReport(
        passed=margin >= -tol,
        worst_margin=margin,
        witness=f"g1={g1}, g2={g2}",
        count=1,
        name="rsd",
    )


def check_mean_ineq(
    chi: GroupFunction, g1: GroupElement, g2: GroupElement, tol: float
) -> CheckReport:
    """chi(g1)chi(g2)/chi(0) <= (chi(g1+g2) + chi(g1-g2))/2."""
    if chi.at_index(0) <= 0:
        raise DomainError("check requires chi(0) > 0")
    lhs = chi(g1) * chi(g2) / chi.at_index(0)
    rhs = 0.5 * (chi(g1 + g2) + chi(g1 - g2))
    margin = rhs - lhs
    return CheckReport(
        passed=margin >= -tol,
        worst_margin=margin,
        witness=f"g1={g1}, g2={g2}",
        count=1,
        name="mean_ineq",
    )


def _pair_sweep(chi: GroupFunction, tol: float, single, name: str) -> CheckReport:
    G = chi.group
    worst = np.inf
    worst_witness = ""
    count = 0
    for i in range(G.order):
        g1 = G.from_index(i)
        for j in range(G.order):
            g2 = G.from_index(j)
            rep = single(chi, g1, g2, tol)
            count += 1
            if rep.worst_margin < worst:
                worst = rep.worst_margin
                worst_witness = rep.witness
    return CheckReport(
        passed=worst >= -tol,
        worst_margin=float(worst),
        witness=worst_witness,
        count=count,
        name=name,
    )


def sweep_rsd(chi: GroupFunction, tol: float) -> CheckReport:
    """check_rsd over every (g1, g2) pair."""
    return _pair_sweep(chi, tol, check_rsd, "rsd_sweep")


def sweep_mean_ineq(chi: GroupFunction, tol: float) -> CheckReport:
    return _pair_sweep(chi, tol, check_mean_ineq, "mean_ineq_sweep")


def sweep_rsd_fast(chi: GroupFunction, tol: float) -> CheckReport:
    """Vectorized version of sweep_rsd, used on larger groups."""
    G = chi.group
    v = chi.values
    sub = G.sub_index_table()  # [x, y] -> x - y
    add = sub[:, G.neg_index_table()]  # x - (-y) = x + y
    lhs = np.outer(v**2, v**2)
    rhs = v[add] * v[sub] * v[0] ** 2
    margin = rhs - lhs
    i, j = np.unravel_index(int(np.argmin(margin)), margin.shape)
    worst = float(margin[i, j])
    return CheckReport(
        passed=worst >= -tol,
        worst_margin=worst,
        witness=f"g1={G.from_index(int(i))}, g2={G.from_index(int(j))}",
        count=G.order**2,
        name="rsd_sweep",
    )


def check_convolve_even(
    chi: GroupFunction, upsilon: GroupFunction, tol: float
) -> CheckReport:
    """With omega = chi * upsilon: chi(g)/chi(0) <= omega(g)/omega(0) for all g."""
    from .groups import convolve

    if np.any(upsilon.values < 0) or not upsilon.is_even():
        raise DomainError("upsilon must be even and nonnegative")
    omega = convolve(chi, upsilon)
    if omega.at_index(0) == 0:
        raise DomainError("omega(0) = 0; ratio undefined")
    margins = omega.values / omega.at_index(0) - chi.values / chi.at_index(0)
    worst_i = int(np.argmin(margins))
    worst = float(margins[worst_i])
    return CheckReport(
        passed=worst >= -tol,
        worst_margin=worst,
        witness=f"g={chi.group.from_index(worst_i)}",
        count=chi.group.order,
        name="convolve_even",
    )
