"""Exact shadowing experiments for piecewise-linear maps on finite metric graphs.

All arithmetic is exact (rationals via gmpy2).  The main entry points are
:func:`certify_perturbation`, which builds a perturbation ``g`` of a map with a
certified radius ``gamma``, and :func:`verify_ball`, which samples maps in that
ball and checks that their pseudo-orbits are shadowed.
"""

from .cover import TautCover, build_taut_cover, core_set, core_sets, lebesgue_number
from .errors import (
    CertificateError,
    ConstructionError,
    FormatError,
    GraphShadowError,
    InputError,
    PreconditionError,
)
from .genericity import (
    ShadowingCertificate,
    build_skeleton,
    certify_perturbation,
    compute_gamma,
    compute_lambda,
    extend_surjective,
    select_eta_lambda,
    verify_ball,
)
from .io import SystemDescription, dumps, load, loads, save
from .metric_graph import (
    GraphPoint,
    MetricGraph,
    Region,
    ball,
    graph_distance,
    region_diameter,
    region_intersects,
)
from .pl_map import (
    PLMap,
    Retraction,
    compose,
    evaluate,
    image_region,
    inverse_modulus,
    is_surjective,
    lipschitz_modulus,
    preimage_region,
    sup_distance,
)
from .rational import Q, fmt
from .shadowing import (
    PseudoOrbit,
    assign_pattern,
    check_shadowing,
    generate_pseudo_orbit,
    grid_oracle,
    realize_pattern,
)
from .symbolic import TransitionRelation, compute_transition, count_walks, enumerate_patterns

__version__ = "0.1.0"
