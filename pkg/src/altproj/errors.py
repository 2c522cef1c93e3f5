"""Exception types shared across the package.

The CLI maps these onto process exit codes: bad input or malformed
instance files exit 2, violated numerical contracts exit 3, and
capacity limits (iteration caps, infeasible constructions) exit 4.
"""

__all__ = ["ParseError", "NumericalContractError", "CapacityError"]


class ParseError(ValueError):
    """Malformed instance file or inconsistent configuration."""


class NumericalContractError(RuntimeError):
    """A computed quantity violated a stated numerical guarantee."""


class CapacityError(RuntimeError):
    """A documented resource cap was reached before the target accuracy."""
