"""Geometric TSP local-search laboratory built around X-opt (tour uncrossing)."""
from .geometry import Orientation, Point, Segment, dist, orientation, segments_cross
from .search import Heuristic, SearchConfig, SearchReport, random_tour, run_twoopt, run_xopt
from .tour import (
    CrossingPair,
    Instance,
    Tour,
    count_crossings,
    exchange_gain,
    find_crossing_from,
    tour_length,
    two_exchange,
)

__version__ = "0.1.0"

__all__ = [
    "CrossingPair",
    "Heuristic",
    "Instance",
    "Orientation",
    "Point",
    "SearchConfig",
    "SearchReport",
    "Segment",
    "Tour",
    "count_crossings",
    "dist",
    "exchange_gain",
    "find_crossing_from",
    "orientation",
    "random_tour",
    "run_twoopt",
    "run_xopt",
    "segments_cross",
    "tour_length",
    "two_exchange",
]
