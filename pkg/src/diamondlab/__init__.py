"""Diamond graphs, L_p distortion certificates, and exact l1 embeddings."""

__version__ = "0.1.0"

from .errors import CapacityError  # noqa: E402
from .diamond import (  # noqa: E402
    AntiEdge,
    DiamondGraph,
    LeveledEdge,
    anti_edges,
    build_diamond,
    edge_length,
    level_for_points,
    num_vertices,
)
from .metric import MetricMatrix, shortest_path_metric, verify_metric  # noqa: E402
from .lp_geometry import diamond_gap, lp_norm, smoothness_gap  # noqa: E402
from .certificate import (  # noqa: E402
    Certificate,
    Embedding,
    certified_lower_bound,
    corollary_dimension_bound,
    poincare_sides,
)
from .optimizer import (  # noqa: E402
    DistortionReport,
    OptimizerConfig,
    evaluate_distortion,
    optimize_embedding,
)
from .cut_cone import (  # noqa: E402
    Cut,
    CutSolution,
    cuts_to_embedding,
    enumerate_cuts,
    l1_lp_isomorphism_constant,
    min_distortion_l1,
)

__all__ = [
    "AntiEdge",
    "CapacityError",
    "Certificate",
    "Cut",
    "CutSolution",
    "DiamondGraph",
    "DistortionReport",
    "Embedding",
    "LeveledEdge",
    "MetricMatrix",
    "OptimizerConfig",
    "anti_edges",
    "build_diamond",
    "certified_lower_bound",
    "corollary_dimension_bound",
    "cuts_to_embedding",
    "diamond_gap",
    "edge_length",
    "enumerate_cuts",
    "evaluate_distortion",
    "l1_lp_isomorphism_constant",
    "level_for_points",
    "lp_norm",
    "min_distortion_l1",
    "num_vertices",
    "optimize_embedding",
    "poincare_sides",
    "shortest_path_metric",
    "smoothness_gap",
    "verify_metric",
]
