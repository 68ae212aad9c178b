"""Finitary combinatorics of dendrite homeomorphism groups."""

from .median import (
    END,
    INF,
    REGULAR,
    BetweennessRel,
    FiniteTree,
    canonical_code,
    count_orbit_types,
    iso_labeled,
    labeled_tree_of,
    realize_tree,
    verify_positive_type,
)
from .universe import ComponentRef, Universe

__all__ = [
    "BetweennessRel",
    "ComponentRef",
    "END",
    "FiniteTree",
    "INF",
    "REGULAR",
    "Universe",
    "canonical_code",
    "count_orbit_types",
    "iso_labeled",
    "labeled_tree_of",
    "realize_tree",
    "verify_positive_type",
]
