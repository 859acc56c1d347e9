"""Exact equidecomposability of rational polygons under affine-unimodular maps."""

from .dynamics import (
    PseudoTriangulation,
    dynamics_equal,
    dynamics_reachable,
    enumerate_triangle_weight_classes,
    find_flip_path,
    pseudo_flip,
    pseudo_flip_pairings,
    weight_class_graph,
)
from .ehrhart import (
    QuasiPolynomial,
    count_lattice_points,
    ehrhart_quasipolynomial,
    map_primitive_point,
    primitive_census,
    vertex_compatible,
)
from .equidecompose import Verdict, decide_equidecomposable, extend_facet_map
from .geometry import GMap, OrientedSegment, Point, Polygon, Triangle, point, polygon
from .relation import Piece, Relation, Report, verify_relation
from .synthesize import synthesize_equidecomposable_pair
from .triangulation import Triangulation, classical_flip, face_sets, minimal_triangulation
from .weights import (
    PolygonWeight,
    WeightTriple,
    edge_weight,
    edge_weight_class,
    map_equal_weight_edges,
    map_primitive_segments,
    polygon_weight,
    triangle_weight,
)

__version__ = "0.1.0"
