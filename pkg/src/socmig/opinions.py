"""Opinion dynamics: synchronous bounded-confidence updates with disturbance.

Each agent carries a private opinion x and an expressed opinion
x_hat = sigma * x. Per step, every agent averages the expressed-opinion
differences over its confidence neighborhood and mixes the result with a
uniform disturbance drawn from the current private-opinion range:

    x_i(t+1) = phi * (x_i(t) + mean_{j in N_i}(x_hat_j - x_hat_i))
               + (1 - phi) * eps_i(t)

All neighborhoods and the disturbance interval are evaluated against the
time-t state, so the update is order-free.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPINION_ONLY = "opinion-only"
GRAPH_AND_OPINION = "graph-and-opinion"

NOISE_SHARED = "shared"
NOISE_PER_AGENT = "per-agent"


@dataclass(frozen=True)
class OpinionParams:
    d: float = 1.0
    phi: float = 0.5
    sigma: float = 0.9
    neighborhood_mode: str = OPINION_ONLY
    include_self: bool = True
    # One public disturbance per step ("shared") reads the update's eps(t)
    # as a single broadcast draw; "per-agent" draws independently per agent.
    noise_mode: str = NOISE_SHARED

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"d must be > 0, got {self.d}")
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi must be in [0, 1], got {self.phi}")
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError(f"sigma must be in [0, 1], got {self.sigma}")
        if self.neighborhood_mode not in (OPINION_ONLY, GRAPH_AND_OPINION):
            raise ValueError(f"unknown neighborhood_mode {self.neighborhood_mode!r}")
        if self.noise_mode not in (NOISE_SHARED, NOISE_PER_AGENT):
            raise ValueError(f"unknown noise_mode {self.noise_mode!r}")


@dataclass
class OpinionState:
    t: int
    private: np.ndarray
    expressed: np.ndarray

    @property
    def n(self) -> int:
        return len(self.private)


def init_opinions(n: int, sigma: float, rng: np.random.Generator) -> OpinionState:
    """Initial state: private opinions i.i.d. Uniform(0,1), expressed scaled."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    private = rng.uniform(0.0, 1.0, size=n)
    return OpinionState(t=0, private=private, expressed=sigma * private)


def neighborhood_mask(
    state: OpinionState, params: OpinionParams, g=None
) -> np.ndarray:
    """Boolean n x n matrix; row i marks the members of N_i at time t."""
    xh = state.expressed
    mask = np.abs(xh[:, None] - xh[None, :]) < params.d
    if params.neighborhood_mode == GRAPH_AND_OPINION:
        if g is None:
            raise ValueError("graph-and-opinion mode needs a graph")
        mask &= g.adj
    np.fill_diagonal(mask, params.include_self)
    return mask


def neighborhood(state: OpinionState, i: int, params: OpinionParams, g=None) -> set[int]:
    """Agents within the confidence threshold of agent i (set of ids)."""
    return set(np.nonzero(neighborhood_mask(state, params, g)[i])[0].tolist())


def draw_noise(state: OpinionState, params: OpinionParams, rng: np.random.Generator) -> np.ndarray:
    """Disturbance vector eps(t) ~ U(min private, max private) at time t."""
    lo = float(state.private.min())
    hi = float(state.private.max())
    if params.noise_mode == NOISE_SHARED:
        return np.full(state.n, rng.uniform(lo, hi))
    return rng.uniform(lo, hi, size=state.n)


def step_opinions(
    state: OpinionState,
    params: OpinionParams,
    g=None,
    rng: np.random.Generator | None = None,
    noise: np.ndarray | None = None,
    diag: dict | None = None,
) -> OpinionState:
    """One synchronous update of every agent; returns the time t+1 state.

    `noise` overrides the RNG draw with an explicit per-agent vector
    (used by tests that replay or permute draws). Agents with an empty
    neighborhood (possible only with include_self=False) take a zero
    averaging term; their count is added to diag["empty_neighborhoods"].
    """
    mask = neighborhood_mask(state, params, g)
    counts = mask.sum(axis=1)
    sums = mask.astype(np.float64) @ state.expressed
    safe = np.maximum(counts, 1)
    term = np.where(counts > 0, sums / safe - state.expressed, 0.0)
    if diag is not None:
        diag["empty_neighborhoods"] = diag.get("empty_neighborhoods", 0) + int(
            (counts == 0).sum()
        )
    if noise is None:
        if params.phi == 1.0:
            eps = np.zeros(state.n)  # weight 1-phi is zero; skip the draw
        else:
            eps = draw_noise(state, params, rng)
    else:
        eps = np.asarray(noise, dtype=np.float64)
    new_private = params.phi * (state.private + term) + (1.0 - params.phi) * eps
    return OpinionState(
        t=state.t + 1, private=new_private, expressed=params.sigma * new_private
    )


def spread(state: OpinionState) -> float:
    """Largest pairwise expressed-opinion gap: max(x_hat) - min(x_hat)."""
    return float(state.expressed.max() - state.expressed.min())


def consensus_time(spreads, eps: float = 0.01, window: int = 10) -> int | None:
    """First t with spread < eps sustained for `window` consecutive steps.

    Returns None when no such t exists within the sequence (a window must
    fit entirely inside the recorded spreads).
    """
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    below = [s < eps for s in spreads]
    run = 0
    for t, ok in enumerate(below):
        run = run + 1 if ok else 0
        if run >= window:
            return t - window + 1
    return None


def run_opinions(
    n: int,
    params: OpinionParams,
    horizon: int,
    rng_init: np.random.Generator,
    rng_noise: np.random.Generator,
    g=None,
    diag: dict | None = None,
    stop_eps: float | None = None,
    stop_window: int = 10,
) -> list[OpinionState]:
    """Simulate `horizon` steps; returns states for t = 0..horizon.

    With stop_eps set, stops early once the expressed spread has stayed
    below stop_eps for stop_window consecutive steps (consensus sweeps).
    """
    state = init_opinions(n, params.sigma, rng_init)
    states = [state]
    below = 0
    for _ in range(horizon):
        state = step_opinions(state, params, g=g, rng=rng_noise, diag=diag)
        states.append(state)
        if stop_eps is not None:
            below = below + 1 if spread(state) < stop_eps else 0
            if below >= stop_window:
                break
    return states
