"""Computations on square-tiled half-translation surfaces and their Teichmüller discs."""
from .errors import (
    BallCapExceeded,
    BasepointInHoroball,
    BoundTooLarge,
    CapExceeded,
    Disconnected,
    ElementaryGroup,
    EmptyClassList,
    EmptyGrid,
    EmptyParabolics,
    InputError,
    NoParabolics,
    NonPermutation,
    NonPrimitive,
    NonUnimodular,
    NotASubgroup,
    NotClosed,
    OrbitCapExceeded,
    ParseError,
    PointInsideHoroball,
    SameCusp,
    TeichcoreError,
    ZeroVector,
)
from .vectors import Holonomy, IntMatrix, primitive_direction, st_word, to_e1
from .origami import Origami, build_origami, l_origami, parse_origami, torus, vertex_data
from .chart import DiscPoint, apply_matrix, geodesic_flow, length_at, unipotent_flow
from .flat import (
    cylinder_decomposition,
    enumerate_saddle_connections,
    intersection_number,
    saddle_connections_in_direction,
    systole,
)
from .veech import (
    FuchsianSubgroup,
    VeechGroup,
    act,
    classify_element,
    cusp_classes,
    group_ball,
    modular_group,
    parabolic_constants,
    veech_group,
)
from .disc import (
    HoroFamily,
    Horodisc,
    cusp_winding,
    electrified_distance,
    horoball_gap,
    hyp_distance,
    nielsen_core,
    numeric_horoball_gap,
    overlap_diameter,
    truncated_distance,
)
from .coarse import (
    QIReport,
    SpectrumReport,
    choose_epsilon,
    compute_W,
    cutoff,
    distance_formula_rhs,
    hempel_estimate,
    horo_overlap_report,
    make_family,
    pvt_spectrum,
    sample_thick_pairs,
    systole_qi_experiment,
    twisting_interval,
    undistortion_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BallCapExceeded",
    "BasepointInHoroball",
    "BoundTooLarge",
    "CapExceeded",
    "Disconnected",
    "ElementaryGroup",
    "EmptyClassList",
    "EmptyGrid",
    "EmptyParabolics",
    "InputError",
    "NoParabolics",
    "NonPermutation",
    "NonPrimitive",
    "NonUnimodular",
    "NotASubgroup",
    "NotClosed",
    "OrbitCapExceeded",
    "ParseError",
    "PointInsideHoroball",
    "SameCusp",
    "TeichcoreError",
    "ZeroVector",
    "Holonomy",
    "IntMatrix",
    "primitive_direction",
    "st_word",
    "to_e1",
    "Origami",
    "build_origami",
    "l_origami",
    "parse_origami",
    "torus",
    "vertex_data",
    "DiscPoint",
    "apply_matrix",
    "geodesic_flow",
    "length_at",
    "unipotent_flow",
    "cylinder_decomposition",
    "enumerate_saddle_connections",
    "intersection_number",
    "saddle_connections_in_direction",
    "systole",
    "FuchsianSubgroup",
    "VeechGroup",
    "act",
    "classify_element",
    "cusp_classes",
    "group_ball",
    "modular_group",
    "parabolic_constants",
    "veech_group",
    "HoroFamily",
    "Horodisc",
    "cusp_winding",
    "electrified_distance",
    "horoball_gap",
    "hyp_distance",
    "nielsen_core",
    "numeric_horoball_gap",
    "overlap_diameter",
    "truncated_distance",
    "QIReport",
    "SpectrumReport",
    "choose_epsilon",
    "compute_W",
    "cutoff",
    "distance_formula_rhs",
    "hempel_estimate",
    "horo_overlap_report",
    "make_family",
    "pvt_spectrum",
    "sample_thick_pairs",
    "systole_qi_experiment",
    "twisting_interval",
    "undistortion_experiment",
]
