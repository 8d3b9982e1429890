from .config import assemble_config
from .demand import (
    DEFAULT_RATE_COEFFICIENTS,
    DemandSpec,
    DepartureSplit,
    ODPair,
    TrafficCondition,
    gen_random_trips,
    od_to_trips,
    scale_demand,
    split_counts,
    zone_od_to_trips,
)
from .geo import BoundingBox, RegionSpec, compute_bbox_from_center, compute_bbox_from_od
from .geocode import Geocoder
from .network import NetworkStats, build_grid_network, build_network, fetch_osm, network_stats
from .routing import route

__all__ = [
    "BoundingBox",
    "DEFAULT_RATE_COEFFICIENTS",
    "DemandSpec",
    "DepartureSplit",
    "Geocoder",
    "NetworkStats",
    "ODPair",
    "RegionSpec",
    "TrafficCondition",
    "assemble_config",
    "build_grid_network",
    "build_network",
    "compute_bbox_from_center",
    "compute_bbox_from_od",
    "fetch_osm",
    "gen_random_trips",
    "network_stats",
    "od_to_trips",
    "route",
    "scale_demand",
    "split_counts",
    "zone_od_to_trips",
]
