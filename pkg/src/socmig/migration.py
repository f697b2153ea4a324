"""Community migration: per-step softmax choice between two communities.

Each agent weighs a community by its mean hop distance (social distance)
and by the gap between the agent's expressed opinion and the community's
mean expressed opinion:

    u_j = sign * (delta * d(i, Q_j) + (1 - delta) * |x_hat_i - avg(x_hat_Q_j)|)

and picks a community with probability softmax(u). The default sign (+1)
follows the utility exactly as written for the star-graph closed form;
sign=-1 gives the gravity-style variant where nearer/likelier communities
attract. Empty communities either stay empty forever (zero-probability)
or re-enter the softmax with utility 0 (uniform-fallback).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import SocialGraph
from .opinions import (
    OpinionParams,
    OpinionState,
    init_opinions,
    spread,
    step_opinions,
)

N_COMMUNITIES = 2

SIGN_PAPER_LITERAL = "paper-literal"
SIGN_ATTRACTIVE = "attractive"

EMPTY_ZERO_PROB = "zero-probability"
EMPTY_UNIFORM_FALLBACK = "uniform-fallback"


@dataclass(frozen=True)
class MigrationParams:
    delta: float = 0.3
    utility_sign: str = SIGN_PAPER_LITERAL
    pinned_agents: dict[int, int] | None = None
    empty_community_rule: str = EMPTY_ZERO_PROB

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")
        if self.utility_sign not in (SIGN_PAPER_LITERAL, SIGN_ATTRACTIVE):
            raise ValueError(f"unknown utility_sign {self.utility_sign!r}")
        if self.empty_community_rule not in (EMPTY_ZERO_PROB, EMPTY_UNIFORM_FALLBACK):
            raise ValueError(
                f"unknown empty_community_rule {self.empty_community_rule!r}"
            )
        if self.pinned_agents:
            for agent, comm in self.pinned_agents.items():
                if comm not in range(N_COMMUNITIES):
                    raise ValueError(f"pinned agent {agent} to bad community {comm}")

    @property
    def sign(self) -> float:
        return 1.0 if self.utility_sign == SIGN_PAPER_LITERAL else -1.0


@dataclass
class CommunityAssignment:
    t: int
    assign: np.ndarray  # agent id -> community id in {0, 1}

    @property
    def n(self) -> int:
        return len(self.assign)

    def populations(self) -> np.ndarray:
        return np.bincount(self.assign, minlength=N_COMMUNITIES)[:N_COMMUNITIES]


def init_assignment(
    n: int, rng: np.random.Generator | None = None, split: int | str = "random"
) -> CommunityAssignment:
    """Initial membership: i.i.d. fair coin per agent, or agents 0..split-1
    into community 0 when split is an integer."""
    if split == "random":
        assign = rng.integers(0, N_COMMUNITIES, size=n).astype(np.int64)
    else:
        m = int(split)
        if not 0 <= m <= n:
            raise ValueError(f"split must be in [0, {n}], got {m}")
        assign = np.array([0] * m + [1] * (n - m), dtype=np.int64)
    return CommunityAssignment(t=0, assign=assign)


def avg_expressed(state: OpinionState, members) -> float | None:
    """Mean expressed opinion over a community; None when it is empty."""
    members = list(members)
    if not members:
        return None
    return float(state.expressed[members].mean())


def community_utilities(
    state: OpinionState,
    assignment: CommunityAssignment,
    dist: np.ndarray,
    params: MigrationParams,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-agent utility of each community, with empty-community handling.

    Returns (utilities, nonempty): utilities is an n x 2 array (rows are
    agents), nonempty marks which communities currently have members.
    Utilities of empty communities are 0 and only participate under the
    uniform-fallback rule.
    """
    n = assignment.n
    utilities = np.zeros((n, N_COMMUNITIES))
    nonempty = np.zeros(N_COMMUNITIES, dtype=bool)
    for c in range(N_COMMUNITIES):
        members = np.nonzero(assignment.assign == c)[0]
        if len(members) == 0:
            continue
        nonempty[c] = True
        social = dist[:, members].mean(axis=1)
        opinion_gap = np.abs(state.expressed - state.expressed[members].mean())
        utilities[:, c] = params.sign * (
            params.delta * social + (1.0 - params.delta) * opinion_gap
        )
    if not nonempty.any():
        raise RuntimeError("invariant violated: every community is empty")
    return utilities, nonempty


def _softmax_rows(utilities: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Row-wise softmax over the active communities, max-shifted for stability."""
    masked = np.where(active[None, :], utilities, -np.inf)
    shift = masked.max(axis=1, keepdims=True)
    expd = np.where(active[None, :], np.exp(masked - shift), 0.0)
    return expd / expd.sum(axis=1, keepdims=True)


def all_migration_probabilities(
    state: OpinionState,
    assignment: CommunityAssignment,
    dist: np.ndarray,
    params: MigrationParams,
) -> np.ndarray:
    """n x 2 matrix of community-choice probabilities for every agent."""
    utilities, nonempty = community_utilities(state, assignment, dist, params)
    if params.empty_community_rule == EMPTY_ZERO_PROB:
        active = nonempty
    else:
        active = np.ones(N_COMMUNITIES, dtype=bool)
    return _softmax_rows(utilities, active)


def migration_probabilities(
    i: int,
    state: OpinionState,
    assignment: CommunityAssignment,
    dist: np.ndarray,
    params: MigrationParams,
) -> np.ndarray:
    """Probability vector over the two communities for agent i."""
    return all_migration_probabilities(state, assignment, dist, params)[i]


def step_migration(
    state: OpinionState,
    assignment: CommunityAssignment,
    dist: np.ndarray,
    params: MigrationParams,
    rng: np.random.Generator,
    probs: np.ndarray | None = None,
) -> CommunityAssignment:
    """Synchronous re-decision of every agent against the time-t assignment.

    One uniform draw is consumed per agent in agent-id order (pinned
    agents' draws are drawn but unused). Agent i stays in its current
    community when its draw falls below that community's probability,
    otherwise it moves; this stay/leave rule has the softmax marginal
    and makes community relabeling an exact symmetry of the trajectory.
    `probs` short-circuits the probability computation when the caller
    already holds this step's matrix.
    """
    if probs is None:
        probs = all_migration_probabilities(state, assignment, dist, params)
    n = assignment.n
    draws = rng.random(n)
    current = assignment.assign
    p_stay = probs[np.arange(n), current]
    new_assign = np.where(draws < p_stay, current, 1 - current).astype(np.int64)
    if params.pinned_agents:
        for agent, comm in params.pinned_agents.items():
            new_assign[agent] = comm
    return CommunityAssignment(t=assignment.t + 1, assign=new_assign)


@dataclass
class Trajectory:
    """Per-step record of one compound run (opinions + migration)."""

    graph: SocialGraph
    states: list[OpinionState]
    assignments: list[CommunityAssignment]
    populations: np.ndarray  # (horizon+1, 2)
    spreads: np.ndarray  # (horizon+1,)
    diagnostics: dict = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return len(self.states) - 1


def run_compound(
    graph: SocialGraph,
    opinion_params: OpinionParams,
    migration_params: MigrationParams,
    horizon: int,
    streams,
    initial_split: int | str = "random",
) -> Trajectory:
    """Run the compound model for `horizon` steps on a prebuilt graph.

    Each step first advances opinions, then lets every agent re-choose its
    community against the new opinion state. Records states, assignments
    and populations for t = 0..horizon; fully determined by `streams`.
    """
    n = graph.n
    state = init_opinions(n, opinion_params.sigma, streams.init_opinions)
    assignment = init_assignment(n, streams.init_assign, initial_split)
    if migration_params.pinned_agents:
        fixed = assignment.assign.copy()
        for agent, comm in migration_params.pinned_agents.items():
            fixed[agent] = comm
        assignment = CommunityAssignment(t=0, assign=fixed)

    states = [state]
    assignments = [assignment]
    diagnostics: dict = {}
    for _ in range(horizon):
        state = step_opinions(
            state, opinion_params, g=graph, rng=streams.noise, diag=diagnostics
        )
        assignment = step_migration(
            state, assignment, graph.dist, migration_params, streams.migration
        )
        states.append(state)
        assignments.append(assignment)

    populations = np.stack([a.populations() for a in assignments])
    spreads = np.array([spread(s) for s in states])
    return Trajectory(
        graph=graph,
        states=states,
        assignments=assignments,
        populations=populations,
        spreads=spreads,
        diagnostics=diagnostics,
    )
