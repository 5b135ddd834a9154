"""Permutation arrays under the Kendall-tau metric: construction, search, certification."""

__version__ = "0.1.0"

from .perm import (  # noqa: E402
    DomainError,
    Permutation,
    bfs_distance_oracle,
    compose,
    inverse,
    kendall_distance,
    parity,
)
from .verify import CertReport, PermArray, certify, min_pairwise_distance  # noqa: E402

__all__ = [
    "CertReport",
    "DomainError",
    "PermArray",
    "Permutation",
    "bfs_distance_oracle",
    "certify",
    "compose",
    "inverse",
    "kendall_distance",
    "min_pairwise_distance",
    "parity",
]
