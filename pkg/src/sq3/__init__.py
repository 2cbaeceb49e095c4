"""Lower bounds for diameters of spherical 3-orbifolds S^3 / G, G finite in O(4)."""

from .goursat import instantiate, parse_spec
from .orbit_cell import cell_statistics, diameter_lower_bound, orbit_of_one, prefundamental_domain

__version__ = "0.1.0"

__all__ = [
    "instantiate",
    "parse_spec",
    "orbit_of_one",
    "prefundamental_domain",
    "diameter_lower_bound",
    "cell_statistics",
]
