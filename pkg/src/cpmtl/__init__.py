"""Preference-conditioned Pareto solution generator toolkit.

Train a single generator that maps any trade-off preference to the matching
Pareto-optimal solution of a multi-task problem, sweep it into a front,
score the front, and serve live preference-conditioned inference.
"""

from .numerics import MLPSpec, ParamVector, finite_diff_grad, mlp_forward, mlp_grad
from .objectives import ProblemDescriptor, RegressionProblem, SyntheticProblem
from .preferences import (
    EmbeddingTable,
    PreferenceVector,
    ReferenceSet,
    RegionSpec,
    SamplerConfig,
    constraint_values,
    embed,
    in_region,
    sample_preference,
)
from .descent import (
    DescentDirection,
    DualSolution,
    batched_direction,
    constrained_direction,
    lemma1_check,
    linear_direction,
    min_norm_dual,
)
from .hypergen import (
    ChunkingSpec,
    GeneratorSpec,
    default_generator_spec,
    generate,
    init_generator_params,
    pullback_grad,
)
from .trainer import TrainingConfig, train
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .evaluation import (
    FrontMetrics,
    FrontSample,
    compute_metrics,
    dominance_filter,
    front_distance,
    hypervolume_2d,
    region_compliance,
    sweep_front,
)

__version__ = "0.1.0"
