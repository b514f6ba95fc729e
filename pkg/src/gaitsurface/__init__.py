"""Attitude-robust gait surfaces for a four-rotor tilt-rotor."""

__version__ = "0.1.0"

from .attitude import (  # noqa: E402
    AttitudeGrid,
    ContourSet,
    RobustnessMargin,
    compare_gaits,
    gait_singular_union,
    robustness_margin,
    singular_locus,
)
from .colormap import (  # noqa: E402
    PathSample,
    ValidationReport,
    continue_branch,
    label_adjacency_allowed,
    type_adjacency_allowed,
    validate_gait_path,
)
from .estimators import GaitBias, LinearizedCoefficients, RearAngleSolver, SingularAttitudeAnalyzer  # noqa: E402
from .planner import Gait, RectangleSpec, bias_gait, gait_vertices, reference_gait, rectangle_gait  # noqa: E402
from .singularity import (  # noqa: E402
    Attitude,
    GaitPoint,
    LinearizedTriple,
    eval_full_condition,
    eval_linearized,
    eval_r,
    eval_r_phi,
    eval_r_theta,
    eval_zero_attitude,
)
from .solver import (  # noqa: E402
    Color,
    LabeledRoot,
    PlaneLabel,
    SolverConfig,
    SurfaceAtlas,
    classify_root,
    paint_map,
    solve_rear_angles,
    sweep_grid,
)
