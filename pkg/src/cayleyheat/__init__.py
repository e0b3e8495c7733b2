"""Heat kernels on finite Abelian Cayley graphs as convolutional
exponentials, lattice Gaussian pushforwards, and numerical checkers for
the associated diffusion inequalities."""

__version__ = "0.1.0"

from .groups import (
    FiniteAbelianGroup,
    GroupElement,
    GroupFunction,
    SpectrumFunction,
    cexp_series,
    cexp_spectral,
    convolve,
    delta,
    dft,
    idft,
    parse_group,
    phi,
    phi_basis_decompose,
)
from .lattices import (
    Lattice,
    LatticeHom,
    PushforwardResult,
    direct_sum,
    fiber_product,
    gaussian_mass,
    pushforward,
    rho_point,
)
from .checks import CheckReport, check_convolve_even, check_mean_ineq, check_rsd
from .heat import (
    CayleyWeights,
    GeneralGraph,
    HeatRow,
    ctrw_simulate,
    heat_matrix_general,
    heat_row_cayley,
    monotone_check_cayley,
    monotone_violation_search,
    tau_from_weights,
)

__all__ = [
    "FiniteAbelianGroup",
    "GroupElement",
    "GroupFunction",
    "SpectrumFunction",
    "cexp_series",
    "cexp_spectral",
    "convolve",
    "delta",
    "dft",
    "idft",
    "parse_group",
    "phi",
    "phi_basis_decompose",
    "Lattice",
    "LatticeHom",
    "PushforwardResult",
    "direct_sum",
    "fiber_product",
    "gaussian_mass",
    "pushforward",
    "rho_point",
    "CheckReport",
    "check_convolve_even",
    "check_mean_ineq",
    "check_rsd",
    "CayleyWeights",
    "GeneralGraph",
    "HeatRow",
    "ctrw_simulate",
    "heat_matrix_general",
    "heat_row_cayley",
    "monotone_check_cayley",
    "monotone_violation_search",
    "tau_from_weights",
]
