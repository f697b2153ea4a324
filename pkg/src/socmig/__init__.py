"""Seeded simulator of coupled opinion dynamics and community migration
on social graphs, with Monte Carlo checks of its closed-form predictions."""

from .graphs import (
    GraphGenerationError,
    GraphParameterError,
    SocialGraph,
    all_pairs_distance,
    community_distance,
    gen_small_world,
    gen_star,
    graph_from_edges,
    graph_from_json,
)
from .metrics import fluctuation_range, ngr, nmr, windowed_rates
from .migration import (
    CommunityAssignment,
    MigrationParams,
    Trajectory,
    avg_expressed,
    init_assignment,
    migration_probabilities,
    run_compound,
    step_migration,
)
from .opinions import (
    OpinionParams,
    OpinionState,
    consensus_time,
    init_opinions,
    neighborhood,
    run_opinions,
    spread,
    step_opinions,
)
from .rng import ReplicateStreams, make_streams
from .theorems import (
    check_theorem1,
    check_theorem2,
    leader_expectation_binomial,
    leader_expectation_nocoeff,
    theorem1_bound,
)

__version__ = "0.1.0"
