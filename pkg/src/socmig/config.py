"""Run configuration: strict JSON schema, defaults, and scenario presets.

A config file may name a preset (`{"preset": "fig5a"}`) and override any
of its fields. Unknown keys are rejected with the offending key named;
range violations name the offending field.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .migration import (
    EMPTY_UNIFORM_FALLBACK,
    EMPTY_ZERO_PROB,
    SIGN_ATTRACTIVE,
    SIGN_PAPER_LITERAL,
    MigrationParams,
)
from .opinions import (
    GRAPH_AND_OPINION,
    NOISE_PER_AGENT,
    NOISE_SHARED,
    OPINION_ONLY,
    OpinionParams,
)

SMALL_WORLD = "small-world"
STAR = "star"

DEFAULT_SEED = 1


class ConfigError(ValueError):
    """Bad configuration; the message names the offending key or field."""


@dataclass(frozen=True)
class GraphSpec:
    type: str = SMALL_WORLD
    n: int = 50
    k: int = 4
    p_rewire: float = 0.3

    def __post_init__(self):
        if self.type not in (SMALL_WORLD, STAR):
            raise ConfigError(f"graph.type must be small-world or star, got {self.type!r}")
        if self.n < 2:
            raise ConfigError(f"graph.n must be >= 2, got {self.n}")
        if self.type == SMALL_WORLD:
            if self.n < 3:
                raise ConfigError(f"graph.n must be >= 3 for small-world, got {self.n}")
            if self.k % 2 != 0 or not 2 <= self.k < self.n:
                raise ConfigError(f"graph.k must be even with 2 <= k < n, got {self.k}")
            if not 0.0 <= self.p_rewire <= 1.0:
                raise ConfigError(f"graph.p_rewire must be in [0, 1], got {self.p_rewire}")


@dataclass(frozen=True)
class SimConfig:
    scenario: str | None = None
    graph: GraphSpec = field(default_factory=GraphSpec)
    opinion: OpinionParams = field(default_factory=OpinionParams)
    migration: MigrationParams = field(default_factory=MigrationParams)
    initial_split: int | str = "random"
    horizon: int = 75
    record_stride: int = 1
    seed: int = DEFAULT_SEED
    replicates: int = 1
    consensus_eps: float = 0.01
    consensus_window: int = 10
    rate_window: int = 5
    burn_in: int | None = None  # None -> horizon // 2
    write_assignments: bool = False
    out_dir: str | None = None

    def __post_init__(self):
        if self.horizon < 0:
            raise ConfigError(f"horizon must be >= 0, got {self.horizon}")
        if self.record_stride < 1:
            raise ConfigError(f"record_stride must be >= 1, got {self.record_stride}")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if self.consensus_eps <= 0:
            raise ConfigError(f"consensus_eps must be > 0, got {self.consensus_eps}")
        if self.consensus_window < 1:
            raise ConfigError(f"consensus_window must be >= 1, got {self.consensus_window}")
        if self.rate_window < 1:
            raise ConfigError(f"rate_window must be >= 1, got {self.rate_window}")
        if self.burn_in is not None and self.burn_in < 0:
            raise ConfigError(f"burn_in must be >= 0, got {self.burn_in}")
        if isinstance(self.initial_split, str) and self.initial_split != "random":
            raise ConfigError(
                f'initial_split must be "random" or an agent count, got {self.initial_split!r}'
            )

    @property
    def effective_burn_in(self) -> int:
        return self.horizon // 2 if self.burn_in is None else self.burn_in

    def to_json_dict(self) -> dict:
        pinned = self.migration.pinned_agents
        return {
            "scenario": self.scenario,
            "graph": {
                "type": self.graph.type,
                "n": self.graph.n,
                "k": self.graph.k,
                "p_rewire": self.graph.p_rewire,
            },
            "opinion": {
                "d": self.opinion.d,
                "phi": self.opinion.phi,
                "sigma": self.opinion.sigma,
                "neighborhood_mode": self.opinion.neighborhood_mode,
                "include_self": self.opinion.include_self,
                "noise_mode": self.opinion.noise_mode,
            },
            "migration": {
                "delta": self.migration.delta,
                "utility_sign": self.migration.utility_sign,
                "pinned_agents": (
                    None
                    if not pinned
                    else {str(a): c for a, c in sorted(pinned.items())}
                ),
                "empty_community_rule": self.migration.empty_community_rule,
            },
            "initial_split": self.initial_split,
            "horizon": self.horizon,
            "record_stride": self.record_stride,
            "seed": self.seed,
            "replicates": self.replicates,
            "consensus_eps": self.consensus_eps,
            "consensus_window": self.consensus_window,
            "rate_window": self.rate_window,
            "burn_in": self.burn_in,
            "write_assignments": self.write_assignments,
            "out_dir": self.out_dir,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def _reject_unknown(obj: dict, allowed: set[str], prefix: str = "") -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown config key: {prefix}{key}")


def _require_range(name: str, value, lo, hi) -> None:
    if not lo <= value <= hi:
        raise ConfigError(f"{name} must be in [{lo}, {hi}], got {value}")


_GRAPH_KEYS = {"type", "n", "k", "p_rewire"}
_OPINION_KEYS = {"d", "phi", "sigma", "neighborhood_mode", "include_self", "noise_mode"}
_MIGRATION_KEYS = {"delta", "utility_sign", "pinned_agents", "empty_community_rule"}
_TOP_KEYS = {
    "preset",
    "scenario",
    "graph",
    "opinion",
    "migration",
    "initial_split",
    "horizon",
    "record_stride",
    "seed",
    "replicates",
    "consensus_eps",
    "consensus_window",
    "rate_window",
    "burn_in",
    "write_assignments",
    "out_dir",
}


def config_from_dict(obj: dict) -> SimConfig:
    """Validate and build a SimConfig from parsed JSON (strict schema)."""
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown(obj, _TOP_KEYS)

    base = get_preset(obj["preset"]) if "preset" in obj else SimConfig()
    merged = base.to_json_dict()

    graph_obj = dict(obj.get("graph", {}))
    _reject_unknown(graph_obj, _GRAPH_KEYS, "graph.")
    merged["graph"].update(graph_obj)

    opinion_obj = dict(obj.get("opinion", {}))
    _reject_unknown(opinion_obj, _OPINION_KEYS, "opinion.")
    merged["opinion"].update(opinion_obj)

    migration_obj = dict(obj.get("migration", {}))
    _reject_unknown(migration_obj, _MIGRATION_KEYS, "migration.")
    merged["migration"].update(migration_obj)

    for key in _TOP_KEYS - {"preset", "graph", "opinion", "migration"}:
        if key in obj:
            merged[key] = obj[key]

    op = merged["opinion"]
    _require_range("phi", op["phi"], 0.0, 1.0)
    _require_range("sigma", op["sigma"], 0.0, 1.0)
    if not op["d"] > 0:
        raise ConfigError(f"d must be > 0, got {op['d']}")
    if op["neighborhood_mode"] not in (OPINION_ONLY, GRAPH_AND_OPINION):
        raise ConfigError(
            f"opinion.neighborhood_mode must be {OPINION_ONLY!r} or "
            f"{GRAPH_AND_OPINION!r}, got {op['neighborhood_mode']!r}"
        )
    if op["noise_mode"] not in (NOISE_SHARED, NOISE_PER_AGENT):
        raise ConfigError(
            f"opinion.noise_mode must be {NOISE_SHARED!r} or {NOISE_PER_AGENT!r}, "
            f"got {op['noise_mode']!r}"
        )

    mig = merged["migration"]
    _require_range("delta", mig["delta"], 0.0, 1.0)
    if mig["utility_sign"] not in (SIGN_PAPER_LITERAL, SIGN_ATTRACTIVE):
        raise ConfigError(
            f"migration.utility_sign must be {SIGN_PAPER_LITERAL!r} or "
            f"{SIGN_ATTRACTIVE!r}, got {mig['utility_sign']!r}"
        )
    if mig["empty_community_rule"] not in (EMPTY_ZERO_PROB, EMPTY_UNIFORM_FALLBACK):
        raise ConfigError(
            f"migration.empty_community_rule must be {EMPTY_ZERO_PROB!r} or "
            f"{EMPTY_UNIFORM_FALLBACK!r}, got {mig['empty_community_rule']!r}"
        )
    pinned = mig["pinned_agents"]
    if pinned is not None:
        try:
            pinned = {int(a): int(c) for a, c in pinned.items()}
        except (AttributeError, TypeError, ValueError) as exc:
            raise ConfigError(f"migration.pinned_agents must map agent -> community: {exc}")
        for agent, comm in pinned.items():
            if comm not in (0, 1):
                raise ConfigError(
                    f"migration.pinned_agents[{agent}] must be 0 or 1, got {comm}"
                )
            if not 0 <= agent < merged["graph"]["n"]:
                raise ConfigError(f"migration.pinned_agents names agent {agent} outside 0..n-1")

    try:
        return SimConfig(
            scenario=merged["scenario"],
            graph=GraphSpec(**merged["graph"]),
            opinion=OpinionParams(**merged["opinion"]),
            migration=MigrationParams(
                delta=mig["delta"],
                utility_sign=mig["utility_sign"],
                pinned_agents=pinned,
                empty_community_rule=mig["empty_community_rule"],
            ),
            initial_split=merged["initial_split"],
            horizon=merged["horizon"],
            record_stride=merged["record_stride"],
            seed=merged["seed"],
            replicates=merged["replicates"],
            consensus_eps=merged["consensus_eps"],
            consensus_window=merged["consensus_window"],
            rate_window=merged["rate_window"],
            burn_in=merged["burn_in"],
            write_assignments=merged["write_assignments"],
            out_dir=merged["out_dir"],
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def load_config(path) -> SimConfig:
    """Load and validate a JSON config file."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    return config_from_dict(obj)


def _ws_preset(name, d, phi, sigma, delta=0.3, n=50, horizon=200) -> SimConfig:
    return SimConfig(
        scenario=name,
        graph=GraphSpec(type=SMALL_WORLD, n=n, k=4, p_rewire=0.3),
        opinion=OpinionParams(d=d, phi=phi, sigma=sigma),
        migration=MigrationParams(delta=delta),
        horizon=horizon,
    )


def _build_presets() -> dict[str, SimConfig]:
    presets = {
        # small-network consensus runs
        "fig1a": _ws_preset("fig1a", d=1.0, phi=0.5, sigma=0.4, horizon=60),
        "fig1b": _ws_preset("fig1b", d=1.0, phi=0.4, sigma=0.5, horizon=60),
        "fig1c": _ws_preset("fig1c", d=0.8, phi=0.09, sigma=0.9, horizon=60),
        # exploratory runs outside the contraction regime
        "fig2a": _ws_preset("fig2a", d=1.0, phi=0.5, sigma=0.9),
        "fig2b": _ws_preset("fig2b", d=0.3, phi=1.0, sigma=0.9),
        "fig2c": _ws_preset("fig2c", d=0.3, phi=1.0, sigma=0.8),
        # boundary sweep around the all-ones parameter point
        "fig3a": _ws_preset("fig3a", d=1.0, phi=1.0, sigma=1.0),
        "fig3b": _ws_preset("fig3b", d=1.0, phi=1.0, sigma=0.99),
        "fig3c": _ws_preset("fig3c", d=1.0, phi=0.99, sigma=1.0),
        "fig3d": _ws_preset("fig3d", d=0.99, phi=1.0, sigma=1.0),
        "fig3e": _ws_preset("fig3e", d=0.5, phi=1.0, sigma=1.0),
        "fig3f": _ws_preset("fig3f", d=0.1, phi=1.0, sigma=1.0),
        # large-network rerun of the fig2 parameter sets
        "fig4a": _ws_preset("fig4a", d=1.0, phi=0.5, sigma=0.9, n=500),
        "fig4b": _ws_preset("fig4b", d=0.3, phi=1.0, sigma=0.9, n=500),
        "fig4c": _ws_preset("fig4c", d=0.3, phi=1.0, sigma=0.8, n=500),
        # migration under consensus opinions
        "fig5a": _ws_preset("fig5a", d=1.0, phi=0.5, sigma=0.9, delta=0.3, horizon=75),
        "fig5b": _ws_preset("fig5b", d=1.0, phi=0.5, sigma=0.9, delta=0.8, horizon=75),
        "fig6": _ws_preset("fig6", d=1.0, phi=0.5, sigma=0.9, delta=0.0, horizon=75),
        # migration under the all-ones opinion point
        "fig7a": _ws_preset("fig7a", d=1.0, phi=1.0, sigma=1.0, delta=0.8),
        "fig7b": _ws_preset("fig7b", d=1.0, phi=1.0, sigma=1.0, delta=0.3),
    }
    return presets


_PRESETS = _build_presets()


def list_presets() -> dict[str, SimConfig]:
    """Catalog of the immutable named scenario bundles."""
    return dict(_PRESETS)


def get_preset(name: str) -> SimConfig:
    try:
        return _PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(_PRESETS))
        raise ConfigError(f"unknown preset {name!r}; known presets: {known}")


def with_overrides(config: SimConfig, **kwargs) -> SimConfig:
    """Functional update helper (used by the CLI for --seed/--out etc.)."""
    return replace(config, **kwargs)
