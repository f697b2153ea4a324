"""Figure rendering for socmig artifact bundles (CSV in, PNG/markdown out)."""

from .figures import (
    FigureSpec,
    NoDataError,
    SchemaError,
    color_for,
    plot_opinions,
    plot_populations,
    render,
    render_rates,
)

__version__ = "0.1.0"
