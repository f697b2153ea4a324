"""Render simulator artifacts into figures and tables.

Inputs are the CSV files a `socmig run` writes (opinions.csv,
populations.csv, rates.csv); nothing here imports the simulator. Input
files are never modified and re-rendering the same inputs draws the same
colors (series colors come from a stable hash of the agent/community id).
"""
from __future__ import annotations

import csv
import zlib
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

OPINIONS = "opinions"
POPULATIONS = "populations"
RATES_TABLE = "rates-table"

# tab20 without the near-white entries; indexed by hashed id
_PALETTE = [plt.get_cmap("tab20")(i) for i in range(20)]

NULL_CELL = "—"  # em dash rendered for undefined rates


class SchemaError(ValueError):
    """Input CSV does not match the schema the simulator emits."""


class NoDataError(ValueError):
    """Input CSV has a valid header but no rows."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str  # opinions | populations | rates-table
    source: Path
    output: Path
    title: str | None = None
    xlabel: str = "t"
    ylabel: str | None = None

    def __post_init__(self):
        if self.kind not in (OPINIONS, POPULATIONS, RATES_TABLE):
            raise ValueError(f"unknown figure kind {self.kind!r}")


def color_for(series_id) -> tuple:
    """Stable color per id: same id, same color, every render."""
    return _PALETTE[zlib.crc32(str(series_id).encode()) % len(_PALETTE)]


def read_csv_columns(path, expected: list[str], numeric: dict[str, type]) -> dict[str, list]:
    """Read a CSV with an exact expected header; errors name the column."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} is empty (no header)")
        for col in expected:
            if col not in header:
                raise SchemaError(f"{path} is missing column {col!r}")
        for col in header:
            if col not in expected:
                raise SchemaError(f"{path} has unexpected column {col!r}")
        index = {col: header.index(col) for col in expected}
        columns: dict[str, list] = {col: [] for col in expected}
        for row in reader:
            if not row:
                continue
            for col in expected:
                raw = row[index[col]]
                caster = numeric.get(col)
                if caster is None:
                    columns[col].append(raw)
                elif raw == "":
                    columns[col].append(None)
                else:
                    try:
                        columns[col].append(caster(raw))
                    except ValueError:
                        raise SchemaError(
                            f"{path} column {col!r} has non-numeric value {raw!r}"
                        )
    if not columns[expected[0]]:
        raise NoDataError(f"no data rows in {path}")
    return columns


def _series_by_id(columns, id_col, x_col, y_col):
    series: dict = {}
    for sid, x, y in zip(columns[id_col], columns[x_col], columns[y_col]):
        series.setdefault(sid, ([], []))
        series[sid][0].append(x)
        series[sid][1].append(y)
    return series


def plot_opinions(spec: FigureSpec) -> Path:
    """One line per agent: expressed opinion against time."""
    columns = read_csv_columns(
        spec.source,
        ["t", "agent_id", "private", "expressed"],
        {"t": int, "agent_id": int, "private": float, "expressed": float},
    )
    series = _series_by_id(columns, "agent_id", "t", "expressed")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for agent_id in sorted(series):
        xs, ys = series[agent_id]
        ax.plot(xs, ys, color=color_for(agent_id), linewidth=0.8)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel or "expressed opinion")
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=120)
    plt.close(fig)
    return Path(spec.output)


def plot_populations(spec: FigureSpec) -> Path:
    """One line per community: population against time."""
    columns = read_csv_columns(
        spec.source,
        ["t", "community_id", "population"],
        {"t": int, "community_id": int, "population": int},
    )
    series = _series_by_id(columns, "community_id", "t", "population")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for community_id in sorted(series):
        xs, ys = series[community_id]
        ax.plot(
            xs, ys,
            color=color_for(f"community-{community_id}"),
            label=f"community {community_id}",
        )
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel or "population")
    ax.legend(loc="best")
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=120)
    plt.close(fig)
    return Path(spec.output)


def render_rates(spec: FigureSpec) -> str:
    """Markdown table of per-window NGR/NMR per community; null -> em dash.

    Returns the table and writes it to spec.output.
    """
    columns = read_csv_columns(
        spec.source,
        ["window_start", "community_id", "ngr", "nmr"],
        {"window_start": int, "community_id": int, "ngr": float, "nmr": float},
    )
    communities = sorted(set(columns["community_id"]))
    rows: dict[int, dict[int, tuple]] = {}
    for start, cid, g, m in zip(
        columns["window_start"], columns["community_id"], columns["ngr"], columns["nmr"]
    ):
        rows.setdefault(start, {})[cid] = (g, m)

    def cell(value) -> str:
        return NULL_CELL if value is None else f"{value:.3f}"

    header = ["window"]
    for cid in communities:
        header += [f"NGR {cid}", f"NMR {cid}"]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(["---"] * len(header)) + "|",
    ]
    for start in sorted(rows):
        cells = [str(start)]
        for cid in communities:
            g, m = rows[start].get(cid, (None, None))
            cells += [cell(g), cell(m)]
        lines.append("| " + " | ".join(cells) + " |")
    table = "\n".join(lines) + "\n"
    if spec.title:
        table = f"## {spec.title}\n\n{table}"
    Path(spec.output).write_text(table)
    return table


def render(spec: FigureSpec):
    if spec.kind == OPINIONS:
        return plot_opinions(spec)
    if spec.kind == POPULATIONS:
        return plot_populations(spec)
    return render_rates(spec)
