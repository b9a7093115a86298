"""Domains, grids, nodal-line length and vortex counting."""
from .domains import (
    DISK_VERTICES, Disk, Domain, Polygon, Rectangle, area, boundary_quadrature,
    covariogram, diam, dilation_area, domain_from_dict, eroded, eroded_overlap_area,
    erosion_area, intersection_area, union_bbox,
)
from .lattice import DEFAULT_GRID_FACTOR, MIN_GRID_FACTOR, Grid, grid_covering, nodes_per_unit
from .nodal import NodalResult, clipped_lengths, nodal_length, nodal_segments
from .vortex import VortexResult, locate_vortices, vortex_count
