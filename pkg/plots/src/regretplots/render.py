"""Chart rendering from experiment summary CSVs.

Plots mean regret lines with shaded 95% confidence bands, either against
time or against a numeric sweep value. Values are taken verbatim from the
CSV; nothing is recomputed beyond pixel placement.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

SUMMARY_HEADER = ["algorithm", "alpha", "sweep_value", "t", "mean_regret",
                  "ci_half_width"]
REFERENCE_HEADER = ["quantity", "agent", "value"]


class RenderError(ValueError):
    """Input problem; the CLI reports it and exits nonzero."""


@dataclass(frozen=True)
class FigureSpec:
    summary_paths: tuple[str, ...]
    mode: str  # "time" or "sweep"
    out_path: str
    constants_path: Optional[str] = None
    logx: bool = False
    title: Optional[str] = None

    def __post_init__(self):
        if self.mode not in ("time", "sweep"):
            raise RenderError(f"unknown mode {self.mode!r}")
        if not self.summary_paths:
            raise RenderError("at least one summary CSV is required")


@dataclass
class Series:
    label: str
    x: list = field(default_factory=list)
    mean: list = field(default_factory=list)
    half: list = field(default_factory=list)


def _read_summary(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SUMMARY_HEADER:
            raise RenderError(
                f"{path}: bad summary header {header}; "
                f"expected columns {','.join(SUMMARY_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(SUMMARY_HEADER):
                raise RenderError(f"{path}:{lineno}: expected "
                                  f"{len(SUMMARY_HEADER)} columns")
            try:
                rows.append((row[0], row[1], row[2], int(row[3]),
                             float(row[4]), float(row[5])))
            except ValueError as exc:
                raise RenderError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise RenderError(f"{path}: no data rows")
    return rows


def _series_label(algorithm, alpha, sweep_value, varying):
    parts = [algorithm]
    if "alpha" in varying:
        parts.append(f"alpha={alpha}")
    if "sweep" in varying and sweep_value != "-":
        parts.append(sweep_value)
    return ", ".join(parts)


def _collect_time_series(rows):
    keys = []
    grouped = {}
    for algorithm, alpha, sweep, t, mean, half in rows:
        key = (algorithm, alpha, sweep)
        if key not in grouped:
            grouped[key] = []
            keys.append(key)
        grouped[key].append((t, mean, half))
    varying = set()
    if len({k[1] for k in keys}) > 1:
        varying.add("alpha")
    if len({k[2] for k in keys}) > 1 or any(k[2] != "-" for k in keys):
        varying.add("sweep")
    series = []
    for key in keys:
        points = sorted(grouped[key])
        if len(points) < 2:
            raise RenderError(
                f"series {key} has {len(points)} point(s); time mode needs "
                "at least 2 per series (column t)")
        s = Series(_series_label(*key, varying))
        for t, mean, half in points:
            s.x.append(t)
            s.mean.append(mean)
            s.half.append(half)
        series.append(s)
    return series


def _collect_sweep_series(rows):
    """Final-time regret against the numeric sweep value, one series per
    algorithm (the sweep value itself may be alpha, so alpha is not part of
    the grouping key)."""
    finals = {}
    order = []
    last_t = {}
    for algorithm, alpha, sweep, t, mean, half in rows:
        try:
            x = float(sweep)
        except ValueError:
            raise RenderError(
                f"sweep mode needs numeric sweep_value, got {sweep!r} "
                "(column sweep_value)") from None
        if algorithm not in finals:
            finals[algorithm] = {}
            order.append(algorithm)
        if x not in finals[algorithm] or t >= last_t[(algorithm, x)]:
            finals[algorithm][x] = (mean, half)
            last_t[(algorithm, x)] = t
    series = []
    for algorithm in order:
        s = Series(algorithm)
        for x in sorted(finals[algorithm]):
            mean, half = finals[algorithm][x]
            s.x.append(x)
            s.mean.append(mean)
            s.half.append(half)
        series.append(s)
    return series


def _read_reference_constant(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != REFERENCE_HEADER:
            raise RenderError(
                f"{path}: bad reference header {header}; "
                f"expected columns {','.join(REFERENCE_HEADER)}")
        for row in reader:
            if row and row[0] == "lai_robbins_constant":
                return float(row[2])
    raise RenderError(f"{path}: no lai_robbins_constant row (column quantity)")


def render(spec: FigureSpec):
    """Render the figure and write it to spec.out_path.

    Returns the matplotlib figure so callers (and tests) can inspect the
    plotted values.
    """
    rows = []
    for path in spec.summary_paths:
        rows.extend(_read_summary(path))
    if spec.mode == "time":
        series = _collect_time_series(rows)
    else:
        series = _collect_sweep_series(rows)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for s in series:
        lower = [m - h for m, h in zip(s.mean, s.half)]
        upper = [m + h for m, h in zip(s.mean, s.half)]
        line, = ax.plot(s.x, s.mean, label=s.label)
        ax.fill_between(s.x, lower, upper, alpha=0.2,
                        color=line.get_color(), linewidth=0)
    if spec.constants_path is not None and spec.mode == "time":
        constant = _read_reference_constant(spec.constants_path)
        xs = series[0].x
        ax.plot(xs, [constant * math.log(t) for t in xs], linestyle="--",
                color="black", label="lower bound const * ln t")
    if spec.logx:
        ax.set_xscale("log")
    ax.set_xlabel("t" if spec.mode == "time" else "sweep value")
    ax.set_ylabel("regret")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out_path)
    return fig
