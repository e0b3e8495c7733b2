"""Finite Abelian groups, function spaces on them, convolution, DFT and the
convolutional exponential.

Groups are products of cyclic factors Z_{n1} x ... x Z_{nk}.  Elements are
residue vectors; the flat index of an element is the lexicographic index with
the last factor varying fastest (numpy C order), so reshaping a value vector
to shape ``factor_sizes`` lines the axes up with the factors.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DivergenceError,
    DomainError,
    GroupMismatchError,
    NumericalConsistencyError,
)

DEFAULT_ORDER_CAP = 4096

# relative tolerance with absolute floor, used for all "equals" checks
REL_TOL = 1e-10
ABS_TOL = 1e-14


def _close(a: np.ndarray, b: np.ndarray, rel: float = REL_TOL, abs_: float = ABS_TOL) -> bool:
    scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
    return bool(np.max(np.abs(a - b), initial=0.0) <= rel * scale + abs_)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups Z_{n1} x ... x Z_{nk}."""

    factor_sizes: tuple[int, ...]
    order_cap: int = DEFAULT_ORDER_CAP

    def __post_init__(self):
        if not self.factor_sizes:
            object.__setattr__(self, "factor_sizes", (1,))
        if any(n < 1 for n in self.factor_sizes):
            raise DomainError(f"factor sizes must be >= 1, got {self.factor_sizes}")
        if self.order > self.order_cap:
            raise DomainError(
                f"group order {self.order} exceeds cap {self.order_cap}"
            )

    @property
    def order(self) -> int:
        return math.prod(self.factor_sizes)

    @property
    def rank(self) -> int:
        return len(self.factor_sizes)

    def index_of(self, residues: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(residues), self.factor_sizes))

    def residues_of(self, index: int) -> tuple[int, ...]:
        return tuple(int(r) for r in np.unravel_index(index, self.factor_sizes))

    def element(self, residues: Sequence[int]) -> "GroupElement":
        res = tuple(int(r) % n for r, n in zip(residues, self.factor_sizes))
        if len(res) != self.rank:
            raise DomainError(
                f"expected {self.rank} residues, got {len(res)}"
            )
        return GroupElement(self, res)

    def from_index(self, index: int) -> "GroupElement":
        return GroupElement(self, self.residues_of(index))

    @property
    def identity(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def elements(self):
        for i in range(self.order):
            yield self.from_index(i)

    # index arithmetic on whole arrays, used by convolution and orbit logic
    def neg_index_table(self) -> np.ndarray:
        """neg[i] = flat index of -g_i."""
        grids = np.meshgrid(
            *[(-np.arange(n)) % n for n in self.factor_sizes], indexing="ij"
        )
        return np.ravel_multi_index(grids, self.factor_sizes).ravel()

    def sub_index_table(self) -> np.ndarray:
        """table[x, y] = flat index of g_x - g_y."""
        idx = [np.arange(n) for n in self.factor_sizes]
        x_res = np.array(
            np.meshgrid(*idx, indexing="ij")
        ).reshape(self.rank, -1)  # (k, |G|)
        diff = (x_res[:, :, None] - x_res[:, None, :]) % np.array(
            self.factor_sizes
        ).reshape(self.rank, 1, 1)
        return np.ravel_multi_index(tuple(diff), self.factor_sizes)

    def __str__(self):
        return "x".join(f"Z{n}" for n in self.factor_sizes)


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    residues: tuple[int, ...]

    def __post_init__(self):
        for r, n in zip(self.residues, self.group.factor_sizes):
            if not 0 <= r < n:
                raise DomainError(f"residue {r} out of range for factor Z{n}")

    @property
    def index(self) -> int:
        return self.group.index_of(self.residues)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if other.group != self.group:
            raise GroupMismatchError("elements belong to different groups")
        return self.group.element(
            tuple(a + b for a, b in zip(self.residues, other.residues))
        )

    def __neg__(self) -> "GroupElement":
        return self.group.element(tuple(-r for r in self.residues))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def scale(self, m: int) -> "GroupElement":
        return self.group.element(tuple(m * r for r in self.residues))

    def order_of(self) -> int:
        orders = [
            n // math.gcd(n, r) for r, n in zip(self.residues, self.group.factor_sizes)
        ]
        return math.lcm(*orders) if orders else 1

    def __str__(self):
        return "(" + ",".join(str(r) for r in self.residues) + ")"


def elem_add(g: GroupElement, h: GroupElement) -> GroupElement:
    return g + h


@dataclass(frozen=True)
class GroupFunction:
    """Dense real-valued function on a finite Abelian group."""

    group: FiniteAbelianGroup
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.group.order,):
            raise DomainError(
                f"values length {vals.shape} != group order {self.group.order}"
            )
        if not np.all(np.isfinite(vals)):
            raise DomainError("values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, g: GroupElement) -> float:
        return float(self.values[g.index])

    def at_index(self, i: int) -> float:
        return float(self.values[i])

    def is_even(self, rel: float = REL_TOL) -> bool:
        neg = self.group.neg_index_table()
        return _close(self.values, self.values[neg], rel=rel)

    def reversed(self) -> "GroupFunction":
        """f(-g)."""
        return GroupFunction(self.group, self.values[self.group.neg_index_table()])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values), initial=0.0))

    def __add__(self, other: "GroupFunction") -> "GroupFunction":
        _same_group(self, other)
        return GroupFunction(self.group, self.values + other.values)

    def __sub__(self, other: "GroupFunction") -> "GroupFunction":
        _same_group(self, other)
        return GroupFunction(self.group, self.values - other.values)

    def __mul__(self, scalar: float) -> "GroupFunction":
        return GroupFunction(self.group, self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpectrumFunction:
    """Complex function on the character group, indexed like the group."""

    group: FiniteAbelianGroup
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.group.order,):
            raise DomainError("spectrum length != group order")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def _same_group(f, g):
    if f.group != g.group:
        raise GroupMismatchError("operands live on different groups")


def delta(group: FiniteAbelianGroup) -> GroupFunction:
    """Indicator of the identity; convolution identity."""
    v = np.zeros(group.order)
    v[0] = 1.0
    return GroupFunction(group, v)


def phi(group: FiniteAbelianGroup, g0: GroupElement) -> GroupFunction:
    """delta(.-g0) + delta(.+g0); value 2 at g0 when 2*g0 = 0."""
    v = np.zeros(group.order)
    v[g0.index] += 1.0
    v[(-g0).index] += 1.0
    return GroupFunction(group, v)


def dft(f: GroupFunction) -> SpectrumFunction:
    """Forward transform with conjugated characters.

    f_hat(k) = sum_g f(g) exp(-2*pi*i sum_j k_j g_j / n_j); this makes the
    convolution theorem a plain pointwise product.
    """
    shaped = f.values.reshape(f.group.factor_sizes)
    return SpectrumFunction(f.group, np.fft.fftn(shaped).ravel())


def idft(s: SpectrumFunction, imag_rel_tol: float = 1e-8) -> GroupFunction:
    """Inverse transform carrying the 1/|G| factor.

    Raises if the imaginary residue exceeds ``imag_rel_tol`` times the
    spectrum norm; below that it is discarded.
    """
    shaped = s.values.reshape(s.group.factor_sizes)
    out = np.fft.ifftn(shaped).ravel()
    norm = np.linalg.norm(s.values)
    imag = np.max(np.abs(out.imag), initial=0.0)
    if imag > imag_rel_tol * max(norm, ABS_TOL):
        raise NumericalConsistencyError(
            f"imaginary residue {imag:.3e} exceeds {imag_rel_tol:.1e} * ||s||"
        )
    return GroupFunction(s.group, out.real.copy())


def dft_direct(f: GroupFunction) -> SpectrumFunction:
    """O(|G|^2) character-sum transform; oracle for dft()."""
    G = f.group
    out = np.zeros(G.order, dtype=complex)
    for k in range(G.order):
        kr = G.residues_of(k)
        acc = 0.0 + 0.0j
        for g in range(G.order):
            gr = G.residues_of(g)
            ang = sum(
                ki * gi / n for ki, gi, n in zip(kr, gr, G.factor_sizes)
            )
            acc += f.values[g] * np.exp(-2j * np.pi * ang)
        out[k] = acc
    return SpectrumFunction(G, out)


def convolve(f: GroupFunction, g: GroupFunction, method: str = "spectral") -> GroupFunction:
    """(f*g)(x) = sum_y f(x-y) g(y)."""
    _same_group(f, g)
    if method == "direct":
        table = f.group.sub_index_table()
        return GroupFunction(f.group, f.values[table] @ g.values)
    if method == "spectral":
        prod = dft(f).values * dft(g).values
        return idft(SpectrumFunction(f.group, prod))
    raise DomainError(f"unknown convolution method {method!r}")


def cexp_spectral(upsilon: GroupFunction) -> GroupFunction:
    """Convolutional exponential via idft(exp(dft(upsilon)))."""
    return idft(SpectrumFunction(upsilon.group, np.exp(dft(upsilon).values)))


def cexp_series(upsilon: GroupFunction, tol: float = 1e-14) -> GroupFunction:
    """Convolutional exponential by partial sums of sum_n upsilon^{*n}/n!.

    Stops once the next term's sup norm falls below tol times the running
    sup norm.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    G = upsilon.group
    acc = delta(G)
    term = delta(G)
    l1 = float(np.sum(np.abs(upsilon.values)))
    cap = max(4, int(math.ceil(10 * (1 + l1))))
    for n in range(1, cap + 1):
        term = convolve(term, upsilon) * (1.0 / n)
        acc = acc + term
        if term.sup_norm() <= tol * max(acc.sup_norm(), ABS_TOL):
            return acc
    raise DivergenceError(f"cexp series did not converge in {cap} terms")


def phi_basis_decompose(upsilon: GroupFunction) -> list[tuple[float, GroupElement]]:
    """Write an even nonnegative function as sum alpha_i * phi(g0_i).

    One representative per {g0, -g0} orbit; the identity orbit contributes
    upsilon(0)/2 since phi(0) = 2*delta.  Zero-weight orbits are skipped.
    """
    G = upsilon.group
    neg = G.neg_index_table()
    vals = upsilon.values
    if np.any(vals < -ABS_TOL):
        raise DomainError("decomposition requires a nonnegative function")
    if not _close(vals, vals[neg]):
        raise DomainError("decomposition requires an even function")
    out: list[tuple[float, GroupElement]] = []
    for i in range(G.order):
        j = int(neg[i])
        if j < i:
            continue  # orbit already handled at its smaller index
        v = float(vals[i])
        if v <= 0.0:
            continue
        alpha = v / 2.0 if i == j else v  # phi doubles on self-inverse orbits
        out.append((alpha, G.from_index(i)))
    return out


def recompose(group: FiniteAbelianGroup, terms: list[tuple[float, GroupElement]]) -> GroupFunction:
    acc = np.zeros(group.order)
    for alpha, g0 in terms:
        acc += alpha * phi(group, g0).values
    return GroupFunction(group, acc)


_GROUP_RE = re.compile(r"^z(\d+)$", re.IGNORECASE)


def parse_group(spec: str, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteAbelianGroup:
    """Parse "Zn1xZn2x..." (case-insensitive), e.g. "Z12xZ2"."""
    parts = re.split("x", spec.strip(), flags=re.IGNORECASE)
    sizes = []
    for p in parts:
        m = _GROUP_RE.match(p.strip())
        if not m:
            raise DomainError(f"bad group spec {spec!r}: cannot parse {p!r}")
        sizes.append(int(m.group(1)))
    return FiniteAbelianGroup(tuple(sizes), order_cap=order_cap)
