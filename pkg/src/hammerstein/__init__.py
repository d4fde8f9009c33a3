"""Regularized coupled iteration for Hammerstein equations ``u + KFu = 0``."""

from .functionals import (
    FunctionalReport,
    check_lemma_ball_bound,
    check_lemma_three_point,
    check_lemma_vp_descent,
    check_phi_bounds,
    phi_p,
    v_p,
    wedge_p,
)
from .operators import (
    IntegralOperator,
    MatrixOperator,
    NemytskiiOperator,
    ProductOperator,
    apply,
    apply_product,
    estimate_monotonicity_constant,
    symmetric_part_min_eig,
    verify_product_monotonicity,
)
from .schedules import Schedule, ScheduleReport, make_schedule, validate_schedule
from .solver import (
    DivergenceError,
    IterationTrace,
    SolveConfig,
    direct_linear_solution,
    residual,
    solve_hammerstein,
)
from .spaces import (
    ConjugatePair,
    GridVector,
    ProductVector,
    duality_map,
    inverse_duality_map,
    norm_p,
    product_duality,
    product_norm,
)

# matrices of the two-dimensional experiment
EXPERIMENT_F = ((7.0, 9.0), (-9.0, 25.0))
EXPERIMENT_K = ((3.0, -2.0), (2.0, 5.0))
EXPERIMENT_STARTS = (
    ((1.0, 1.0), (1.0, 1.0)),
    ((1.0, 0.5), (0.25, 1.0)),
    ((4.0, -5.0), (-7.0, 3.0)),
)

__version__ = "0.1.0"
