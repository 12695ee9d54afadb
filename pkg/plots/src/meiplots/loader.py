"""Readers for the experiment harness output files (summary.json, run CSVs).

The harness file schemas are consumed verbatim; nothing is recomputed here.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

CSV_COLUMNS = (
    "run_id",
    "seed",
    "generation",
    "mei",
    "covers_0n",
    "covers_1n",
    "active_refpoints",
    "evaluations",
)


@dataclass(frozen=True)
class ConfigEntry:
    label: str
    quartiles: dict[str, list[float]]
    runs: list[dict]


@dataclass(frozen=True)
class Summary:
    windows: list[str]
    configs: list[ConfigEntry]
    raw: dict


def load_summary(input_dir: str | Path) -> Summary:
    path = Path(input_dir) / "summary.json"
    if not path.exists():
        raise FileNotFoundError(f"no summary.json in {input_dir}")
    raw = json.loads(path.read_text())
    configs = [
        ConfigEntry(label=c["label"], quartiles=c["quartiles"], runs=c["runs"])
        for group in raw.get("groups", [])
        for c in group.get("configs", [])
    ]
    if not configs:
        raise ValueError(f"{path}: summary contains no configurations")
    windows = [f"{a}..{b}" for a, b in raw.get("windows", [])]
    return Summary(windows=windows, configs=configs, raw=raw)


def select_configs(summary: Summary, series: list[str] | None) -> list[ConfigEntry]:
    """Filter configs by label; an empty filter selects everything."""
    if not series:
        return list(summary.configs)
    by_label = {c.label: c for c in summary.configs}
    missing = [label for label in series if label not in by_label]
    if missing:
        raise ValueError(f"series labels not present in summary.json: {missing}")
    return [by_label[label] for label in series]


def load_mei_series(input_dir: str | Path, run: dict) -> tuple[list[int], list[int]]:
    """(generation offsets from the resolved start, MEI values) of one run."""
    path = Path(input_dir) / run["csv"]
    if not path.exists():
        raise FileNotFoundError(f"run CSV missing: {path}")
    start = run["resolved_t_start"]
    offsets: list[int] = []
    values: list[int] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {header}")
        for row_number, row in enumerate(reader, start=2):
            try:
                generation = int(row[2])
                mei = int(row[3])
            except (IndexError, ValueError) as exc:
                raise ValueError(f"{path}: malformed row {row_number}: {row}") from exc
            offset = generation - start
            if offset >= 1:
                offsets.append(offset)
                values.append(mei)
    return offsets, values
