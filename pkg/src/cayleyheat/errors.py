"""Shared exception types."""


class CayleyHeatError(Exception):
    """Base class for all library errors."""


class GroupMismatchError(CayleyHeatError):
    """Operands live on different groups."""


class DomainError(CayleyHeatError):
    """Input violates a documented precondition."""


class NumericalConsistencyError(CayleyHeatError):
    """A numerical invariant (e.g. negligible imaginary part) was violated."""


class DivergenceError(CayleyHeatError):
    """An iterative computation hit its term cap without converging."""


class EnumerationBudgetError(CayleyHeatError):
    """Lattice enumeration would exceed the configured point budget."""
