"""Population rate indices and fluctuation statistics.

NGR uses the symmetric mean of the two endpoint populations as its
denominator; NMR uses the start population. Growing from zero has no
defined NMR and is reported as None (null in CSV output).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RateRecord:
    window_start: int
    community_id: int
    ngr: float
    nmr: float | None


def ngr(p0: float, p1: float) -> float:
    """Net growth rate: (p1 - p0) / (0.5 * (p1 + p0)); 0 when both are 0."""
    if p0 < 0 or p1 < 0:
        raise ValueError("populations must be nonnegative")
    if p0 == 0 and p1 == 0:
        return 0.0
    return (p1 - p0) / (0.5 * (p1 + p0))


def nmr(p0: float, p1: float) -> float | None:
    """Net migration rate: (p1 - p0) / p0; 0 for 0->0, None for 0->positive."""
    if p0 < 0 or p1 < 0:
        raise ValueError("populations must be nonnegative")
    if p0 == 0:
        return 0.0 if p1 == 0 else None
    return (p1 - p0) / p0


def windowed_rates(populations: np.ndarray, window: int = 5) -> list[RateRecord]:
    """Rates between populations `window` steps apart, per community.

    `populations` has one row per time step and one column per community.
    Window starts are 0, window, 2*window, ... while a full window fits;
    a series shorter than one window yields no records.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    populations = np.asarray(populations)
    steps = populations.shape[0]
    records = []
    for start in range(0, steps - window, window):
        for c in range(populations.shape[1]):
            p0 = float(populations[start, c])
            p1 = float(populations[start + window, c])
            records.append(
                RateRecord(
                    window_start=start, community_id=c, ngr=ngr(p0, p1), nmr=nmr(p0, p1)
                )
            )
    return records


def fluctuation_range(values, burn_in: int = 0) -> float:
    """Max minus min of the values after dropping the first burn_in entries."""
    values = np.asarray(list(values), dtype=np.float64).ravel()
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    if len(values) <= burn_in:
        raise ValueError(
            f"need more than burn_in={burn_in} values, got {len(values)}"
        )
    tail = values[burn_in:]
    return float(tail.max() - tail.min())


def opinion_band_width(states, burn_in: int) -> float:
    """Width of the expressed-opinion band over all agents and steps after
    burn-in: the d-sweep's per-run fluctuation measure."""
    flat = np.concatenate([s.expressed for s in states[burn_in:]])
    return fluctuation_range(flat)
