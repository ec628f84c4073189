"""Networked nonlinear opinion dynamics: simulation, bifurcation analysis,
and adaptive control of pitchfork-organized collective decision-making."""

from .bifurcation import (
    Branch,
    ContinuationConfig,
    ContinuationProblem,
    Equilibrium,
    SingularPoint,
    ata_problem,
    branch_switch,
    classify_singularity,
    continue_branch,
    find_equilibrium,
    hetero_problem,
    jacobian,
    normalized_problem,
    reduced3_jacobian,
    reduced3_problem,
    ubar_star,
    us_star_hat,
    ustar_numeric,
    ustar_series,
    y_s,
    ystar_root,
    ystar_series,
)
from .dynamics import (
    TANH,
    AdaptiveConfig,
    Decision,
    DecisionConfig,
    EstimatorState,
    ModelParams,
    Sigmoid,
    adaptive_field,
    ata_reduced3_field,
    beta_vector,
    classify_decision,
    disagreement,
    estimator_field,
    full_field,
    group_opinion,
    hetero_field,
    normalized_field,
    reduced3_field,
    scalar_consensus_field,
)
from .graphs import (
    Graph,
    PopulationSpec,
    build_graph,
    complete_graph,
    directed_ring,
    graph_from_json,
    graph_to_json,
    is_strongly_connected,
    is_z2_symmetric,
    lambda2,
    left_null_eigenvector,
    path_graph,
    three_population_graph,
)
from .solver import (
    EstimatorRun,
    EventHit,
    IntegratorConfig,
    SolverError,
    Trajectory,
    integrate,
    integrate_nonsmooth,
    integrate_to_equilibrium,
    integrate_with_events,
)

__version__ = "0.1.0"
