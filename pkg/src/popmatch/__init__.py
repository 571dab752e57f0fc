"""Two-sided popular matchings in bipartite preference systems."""

from .core import (
    ConstraintSet,
    Matching,
    PreferenceSystem,
    defeats,
    is_more_popular,
    parse_instance,
    phi,
    rank,
    render_instance,
)
from .popularity import is_dominant, is_popular, label_edges

__all__ = [
    "ConstraintSet",
    "Matching",
    "PreferenceSystem",
    "defeats",
    "is_dominant",
    "is_more_popular",
    "is_popular",
    "label_edges",
    "parse_instance",
    "phi",
    "rank",
    "render_instance",
]
