"""Presentation artifacts from experiment harness outputs: MEI trace figures
and Markdown quartile tables."""

from .loader import load_mei_series, load_summary, select_configs
from .render import (
    Figure,
    PlotSpec,
    format_triple,
    render,
    render_mei_trace,
    render_quartile_table,
    trace_series,
)

__version__ = "0.1.0"
