"""Shared exception types."""


class ContractError(ValueError):
    """An operation was called outside its documented contract."""


class OptimizerError(RuntimeError):
    """A numerical search failed to converge within its iteration budget."""
