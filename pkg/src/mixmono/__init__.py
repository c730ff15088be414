"""Interval over-approximation of nonsmooth nonlinear maps and systems.

Decomposition-based inclusion functions, reachability via embedding systems,
interval set inversion, and measurement-driven interval observers.
"""

from .decomp import (
    Branch,
    SupportingVector,
    TimeSemantics,
    supporting_vectors,
    t_l_inclusion,
    t_o_vertex_inclusion,
    t_r_inclusion,
)
from .errors import MixmonoError
from .expr import (
    ClarkeInterval,
    Expr,
    JacobianBounds,
    clarke_jacobian_bounds,
    eval_interval,
    eval_point,
    eval_vec,
    parse_expr,
    to_string,
)
from .inclusion import (
    CENTERED,
    JACOBIAN_SIGN,
    MIXED_CENTERED,
    NATURAL,
    REMAINDER,
    TIGHT_VERTEX,
    ErrorBounds,
    MethodId,
    apply_method,
    best_of,
    best_of_method,
    default_jac_provider,
    error_bounds,
    sampled_range,
    subdivide_apply,
    t_c_inclusion,
    t_m_inclusion,
    t_n_inclusion,
)
from .interval import Box, Interval, hausdorff_q, set_inflate_mode
from .model import (
    load_bundled,
    load_measurements,
    load_model,
    model_to_text,
    parse_model,
    read_tube_json,
    write_measurements,
    write_plot,
    write_tube,
)
from .observer import ConstraintInterval, Measurement, measurement_to_constraint, observe
from .reach import (
    Constraint,
    Observation,
    ReachTube,
    StepRecord,
    SystemModel,
    embed_integrate_continuous,
    embed_step_discrete,
    reach_tube,
)
from .setinv import InversionConfig, set_invert

__version__ = "0.1.0"

__all__ = [
    "Box",
    "Branch",
    "CENTERED",
    "ClarkeInterval",
    "Constraint",
    "ConstraintInterval",
    "ErrorBounds",
    "Expr",
    "InversionConfig",
    "Interval",
    "JACOBIAN_SIGN",
    "JacobianBounds",
    "MIXED_CENTERED",
    "Measurement",
    "MethodId",
    "MixmonoError",
    "NATURAL",
    "Observation",
    "REMAINDER",
    "ReachTube",
    "StepRecord",
    "SupportingVector",
    "SystemModel",
    "TIGHT_VERTEX",
    "TimeSemantics",
    "apply_method",
    "best_of",
    "best_of_method",
    "clarke_jacobian_bounds",
    "default_jac_provider",
    "embed_integrate_continuous",
    "embed_step_discrete",
    "error_bounds",
    "eval_interval",
    "eval_point",
    "eval_vec",
    "hausdorff_q",
    "load_bundled",
    "load_measurements",
    "load_model",
    "measurement_to_constraint",
    "model_to_text",
    "observe",
    "parse_expr",
    "parse_model",
    "reach_tube",
    "read_tube_json",
    "sampled_range",
    "set_inflate_mode",
    "set_invert",
    "subdivide_apply",
    "supporting_vectors",
    "t_c_inclusion",
    "t_l_inclusion",
    "t_m_inclusion",
    "t_n_inclusion",
    "t_o_vertex_inclusion",
    "t_r_inclusion",
    "to_string",
    "write_measurements",
    "write_plot",
    "write_tube",
]
