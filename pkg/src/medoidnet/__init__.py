"""medoidnet: metric-valued regression via medoid relabeling of greedy nets,
with compression-bound scale selection.

Instance and label spaces are arbitrary metric (or general-loss) spaces.
Learners sweep every candidate scale drawn from the sample's pairwise
instance distances, relabel each net center with the empirical medoid of its
Voronoi cell, and return the 1-NN predictor at the scale minimizing a
closed-form generalization bound.
"""

from .bounds import (
    BoundParams,
    Schedules,
    compression_deviation_bound,
    default_schedules,
    empirical_bernstein_bound,
    q_bound,
    q_monotone_check,
)
from .engine import BACKEND_1D, KERNEL_AVAILABLE
from .errors import (
    InvalidElementError,
    MedoidNetError,
    PreconditionError,
    UnsupportedOperationError,
)
from .harness import (
    ExperimentResult,
    ExperimentRow,
    MonteCarloRisk,
    SyntheticDistribution,
    convergence_experiment,
    estimate_missing_mass,
    exact_risk,
    majority_vote_baseline,
    make_distribution,
    monte_carlo_risk,
    true_medoid_oracle,
)
from .learners import (
    MedoidModel,
    countable_med_net,
    ctbl_unbdd,
    empirical_risk,
    fin_med_net,
    medoid_net,
    project_labels,
    select_scale,
    truncate_labels,
)
from .medoid import RelabeledNet, empirical_medoid, relabel_net
from .netting import (
    DistanceCache,
    GammaNet,
    ScaleSet,
    VoronoiAssignment,
    assign_voronoi,
    build_gamma_net,
    candidate_scales,
    nn_predict,
)
from .spaces import (
    FiniteSpace,
    IntegerSpace,
    LabeledSample,
    NetSpace,
    RealLine,
    RealVector,
    SpaceDescriptor,
    diameter_truncate,
    discrete_space,
    enumerate_labels,
    evaluate_loss,
    finite_space_from_csv,
    get_space,
    project_to_eps_net,
    register_space,
    validate_metric_axioms,
)

__version__ = "0.1.0"
