"""Rendering of harness results: MEI-vs-generation traces and Markdown
quartile tables. Pure functions of the input files; statistics are taken from
summary.json as-is."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "meiplots"

import matplotlib.pyplot as plt

from .loader import load_mei_series, load_summary, select_configs


class Figure(str, enum.Enum):
    MEI_TRACE = "mei-trace"
    QUARTILE_TABLE = "quartile-table"


@dataclass(frozen=True)
class PlotSpec:
    input_dir: Path
    figure: Figure
    output: Path
    series: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_dir", Path(self.input_dir))
        object.__setattr__(self, "output", Path(self.output))
        object.__setattr__(self, "figure", Figure(self.figure))


def format_number(value: float) -> str:
    """Integers without decimals, fractions kept: 9.0 -> '9', 33.25 -> '33.25'."""
    return f"{value:g}"


def format_triple(quartiles: list[float]) -> str:
    return "(" + ",".join(format_number(v) for v in quartiles) + ")"


def render_quartile_table(spec: PlotSpec) -> Path:
    """Markdown table with one row per configuration and one quartile triple
    per measurement window; byte-identical across repeated invocations."""
    summary = load_summary(spec.input_dir)
    configs = select_configs(summary, spec.series)
    windows = summary.windows or sorted({w for c in configs for w in c.quartiles})
    lines = [
        "| Configuration | " + " | ".join(f"[{w}]" for w in windows) + " |",
        "|" + " --- |" * (len(windows) + 1),
    ]
    for cfg in configs:
        cells = [format_triple(cfg.quartiles[w]) for w in windows]
        lines.append("| " + cfg.label + " | " + " | ".join(cells) + " |")
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    spec.output.write_text("\n".join(lines) + "\n")
    return spec.output


def trace_series(spec: PlotSpec) -> dict[str, tuple[list[int], list[int]]]:
    """One exemplary (first-listed) run per configuration: label ->
    (generation offsets from the resolved start, MEI values)."""
    summary = load_summary(spec.input_dir)
    configs = select_configs(summary, spec.series)
    series = {}
    for cfg in configs:
        if not cfg.runs:
            raise ValueError(f"{cfg.label}: no runs listed in summary.json")
        series[cfg.label] = load_mei_series(spec.input_dir, cfg.runs[0])
    return series


def render_mei_trace(spec: PlotSpec) -> Path:
    """Line chart of MEI against the generation offset from the measurement
    start, one line per configuration."""
    series = trace_series(spec)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for label, (offsets, values) in series.items():
        ax.plot(offsets, values, label=label, linewidth=1.0)
    ax.set_xlabel("generations after measurement start")
    ax.set_ylabel("maximum empty interval")
    ax.legend(fontsize=7)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, metadata=_deterministic_metadata(spec.output))
    plt.close(fig)
    return spec.output


def _deterministic_metadata(output: Path) -> dict | None:
    suffix = output.suffix.lower()
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".png":
        return {"Software": None}
    return None


def render(spec: PlotSpec) -> Path:
    if spec.figure is Figure.QUARTILE_TABLE:
        return render_quartile_table(spec)
    return render_mei_trace(spec)
