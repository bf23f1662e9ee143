"""Menger duality for ends of finitely presented infinite digraphs."""
from .presentation import (CofiniteVertexSet, Presentation, Query, delete_vertices, reverse,
                           truncate, validate)
from .instance import load_instance, parse_instance, serialize_instance
from .ends import closure, dominating, end_leq, end_width, ends, is_dispersed
from .tracks import (max_disjoint_tracks, min_separator, track_exists, verify_duality,
                     verify_separator)
from .degree import combined_degree, d_minus, is_omega_separating

__all__ = [
    "CofiniteVertexSet", "Presentation", "Query", "delete_vertices", "reverse", "truncate",
    "validate", "load_instance", "parse_instance", "serialize_instance", "closure",
    "dominating", "end_leq", "end_width", "ends", "is_dispersed", "max_disjoint_tracks",
    "min_separator", "track_exists", "verify_duality", "verify_separator",
    "combined_degree", "d_minus", "is_omega_separating",
]
__version__ = "0.1.0"
