"""Numerical checks for spherically symmetric Finsler metrics."""

from ._core import (
    ConfigError,
    ConvexityError,
    DomainError,
    Metric,
    ParseError,
    builtin,
    builtin_names,
    from_phi,
    run_json,
    sample_domain,
)

__all__ = [
    "ConfigError",
    "ConvexityError",
    "DomainError",
    "Metric",
    "ParseError",
    "builtin",
    "builtin_names",
    "from_phi",
    "run_json",
    "sample_domain",
]
