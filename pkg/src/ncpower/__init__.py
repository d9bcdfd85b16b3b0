"""Energy accounting for XOR network coding in IP-over-WDM core networks."""

__version__ = "0.1.0"

from ncpower.analytics import (
    BoundSet,
    asymptotic_savings,
    avg_hop_formula,
    bounds,
    bounds_partition,
    bounds_zero_pad,
    conventional_power_closed,
    nc_power_equal_closed,
    savings_equal,
)
from ncpower.netmodel import Link, Node, Topology, build_regular, hop_metrics, load_topology, nsfnet, usnet
from ncpower.power import (
    TABLE4,
    TABLE5_GREENTOUCH,
    DeviceParams,
    PowerBreakdown,
    load_params,
    network_power,
    port_ratio_crossover,
    savings,
)
from ncpower.routing import CodingTriple, RoutePlan, route_all, simulate_coded_exchange
from ncpower.traffic import DemandMatrix, equal_matrix, generate_matrix

__all__ = [
    "__version__",
    "BoundSet", "asymptotic_savings", "avg_hop_formula", "bounds", "bounds_partition",
    "bounds_zero_pad", "conventional_power_closed", "nc_power_equal_closed", "savings_equal",
    "Link", "Node", "Topology", "build_regular", "hop_metrics", "load_topology", "nsfnet", "usnet",
    "TABLE4", "TABLE5_GREENTOUCH", "DeviceParams", "PowerBreakdown", "load_params",
    "network_power", "port_ratio_crossover", "savings",
    "CodingTriple", "RoutePlan", "route_all", "simulate_coded_exchange",
    "DemandMatrix", "equal_matrix", "generate_matrix",
]
