"""Experiment configuration, Monte Carlo orchestration and CSV emission."""
from __future__ import annotations

import csv
import math
import multiprocessing
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .agent import PolicyKind
from .confidence import IndexKind
from .core import (RewardStream, agent_asymptotic_constant, build_instance,
                   lai_robbins_constant, uniform_grid_means)
from .network import GossipMatrix, complete_graph, cycle_graph, load_matrix_csv, star_graph
from .simulator import PhaseSchedule, default_grid, partition_sticky_sets, run_single

TRACE_HEADER = ["algorithm", "alpha", "sweep_value", "run", "t", "node_avg_regret"]
SUMMARY_HEADER = ["algorithm", "alpha", "sweep_value", "t", "mean_regret", "ci_half_width"]
REFERENCE_HEADER = ["quantity", "agent", "value"]

ALGORITHM_LABELS = {
    "AOGB-KL": ("aogb", "kl"),
    "AOGB-Hoeffding": ("aogb", "hoeffding"),
    "GosInE-KL": ("gosine", "kl"),
    "GosInE-Hoeffding": ("gosine", "hoeffding"),
}

_TOPOLOGIES = ("complete", "cycle", "star", "custom")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    agents: int
    arms: int
    horizon: int
    runs: int
    algorithms: tuple[str, ...]
    mu_star: float = 0.9
    grid_lo: float = 0.2
    grid_hi: float = 0.8
    means: Optional[tuple[float, ...]] = None
    alpha: float = 1.0
    alphas: tuple[float, ...] = (0.5, 1.0, 2.0)
    delta_mins: tuple[float, ...] = (0.05, 0.1, 0.2)
    topology: str = "complete"
    topologies: tuple[str, ...] = ("complete", "cycle", "star")
    matrix_file: Optional[str] = None
    star_center: int = 0
    theta: float = 2.0
    seed: int = 0
    out_dir: str = "out"
    grid_stride: Optional[int] = None
    gosine_cap: int = 2

    def __post_init__(self):
        if self.agents < 2:
            raise ConfigError("agents must be at least 2")
        if self.arms < self.agents:
            raise ConfigError("arms must be at least the agent count")
        if self.horizon < 1:
            raise ConfigError("horizon must be positive")
        if self.runs < 1:
            raise ConfigError("runs must be positive")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        for label in self.algorithms:
            if label not in ALGORITHM_LABELS:
                raise ConfigError(f"unknown algorithm {label!r}")
        for a in (self.alpha, *self.alphas):
            if a <= 0:
                raise ConfigError("alpha values must be positive")
        for d in self.delta_mins:
            if not 0 < d < self.mu_star:
                raise ConfigError("delta_min values must lie in (0, mu_star)")
        if self.topology not in _TOPOLOGIES:
            raise ConfigError(f"unknown topology {self.topology!r}")
        for t in self.topologies:
            if t not in _TOPOLOGIES:
                raise ConfigError(f"unknown topology {t!r}")
        if self.topology == "custom" and not self.matrix_file:
            raise ConfigError("custom topology requires matrix_file")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.gosine_cap < 1:
            raise ConfigError("gosine_cap must be positive")
        if self.theta <= 0:
            raise ConfigError("theta must be positive")


_SCHEMA = {
    "agents": int,
    "arms": int,
    "horizon": int,
    "runs": int,
    "seed": int,
    "star_center": int,
    "gosine_cap": int,
    "grid_stride": int,
    "mu_star": float,
    "grid_lo": float,
    "grid_hi": float,
    "alpha": float,
    "theta": float,
    "topology": str,
    "matrix_file": str,
    "out_dir": str,
    "means": "float_list",
    "alphas": "float_list",
    "delta_mins": "float_list",
    "algorithms": "str_list",
    "topologies": "str_list",
}


def parse_config(path) -> ExperimentConfig:
    """Strict flat key = value parser; unknown keys and bad values fail with
    a line diagnostic."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            kind = _SCHEMA[key]
            try:
                if kind is int:
                    values[key] = int(value)
                elif kind is float:
                    values[key] = float(value)
                elif kind is str:
                    values[key] = value
                elif kind == "float_list":
                    values[key] = tuple(float(v) for v in value.split(","))
                else:
                    values[key] = tuple(v.strip() for v in value.split(","))
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
    for required in ("agents", "arms", "horizon", "runs", "algorithms"):
        if required not in values:
            raise ConfigError(f"{path}: missing required key {required!r}")
    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def default_means(config: ExperimentConfig) -> tuple[float, ...]:
    if config.means is not None:
        return config.means
    return tuple(uniform_grid_means(config.mu_star, config.grid_lo,
                                    config.grid_hi, config.arms))


def build_topology(name: str, N: int, star_center: int = 0,
                   matrix_file: Optional[str] = None) -> GossipMatrix:
    if name == "complete":
        return complete_graph(N)
    if name == "cycle":
        return cycle_graph(N)
    if name == "star":
        return star_graph(N, star_center)
    if name == "custom":
        if not matrix_file:
            raise ConfigError("custom topology requires matrix_file")
        return load_matrix_csv(matrix_file)
    raise ConfigError(f"unknown topology {name!r}")


@dataclass(frozen=True)
class _Series:
    """One (algorithm, alpha, sweep point) line of an experiment."""
    label: str
    alpha: float
    sweep_value: str
    means: tuple[float, ...]
    topology: str


def _series_for_mode(config: ExperimentConfig, mode: str) -> list[_Series]:
    series = []
    if mode == "run":
        means = default_means(config)
        for label in config.algorithms:
            series.append(_Series(label, config.alpha, "-", means, config.topology))
    elif mode == "alpha":
        means = default_means(config)
        for alpha in config.alphas:
            for label in config.algorithms:
                series.append(_Series(label, alpha, _fmt(alpha), means, config.topology))
    elif mode == "delta":
        for delta in config.delta_mins:
            means = tuple(uniform_grid_means(config.mu_star, config.grid_lo,
                                             config.mu_star - delta, config.arms))
            for label in config.algorithms:
                series.append(_Series(label, config.alpha, _fmt(delta), means, config.topology))
    elif mode == "topology":
        means = default_means(config)
        for name in config.topologies:
            for label in config.algorithms:
                series.append(_Series(label, config.alpha, name, means, name))
    else:
        raise ConfigError(f"unknown experiment mode {mode!r}")
    return series


def _execute_task(task) -> np.ndarray:
    (means, agents, topology, star_center, matrix_file, theta, horizon,
     run_id, seed, update_rule, index_kind, alpha, cap, grid) = task
    instance = build_instance(means, agents)
    P = build_topology(topology, agents, star_center, matrix_file)
    policy = PolicyKind(update_rule, IndexKind(index_kind, alpha), cap)
    stream = RewardStream.for_instance(instance, seed)
    trace = run_single(instance, P, policy, PhaseSchedule(theta), horizon,
                       run_id, stream, np.asarray(grid, dtype=np.int64))
    return trace.regret_grid.mean(axis=0)


def summarize(curves: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean over runs and 95% normal-interval half-width per grid point."""
    curves = np.asarray(curves, dtype=np.float64)
    if curves.ndim != 2 or curves.shape[0] < 1:
        raise ValueError("need at least one run")
    mean = curves.mean(axis=0)
    runs = curves.shape[0]
    if runs == 1:
        half = np.zeros_like(mean)
    else:
        sd = curves.std(axis=0, ddof=1)
        half = 1.96 * sd / math.sqrt(runs)
    return mean, half


def _grid_for(config: ExperimentConfig) -> np.ndarray:
    T = config.horizon
    if config.grid_stride is None:
        return default_grid(T)
    stride = config.grid_stride
    if stride < 1:
        raise ConfigError("grid_stride must be positive")
    times = list(range(stride, T + 1, stride))
    if not times or times[-1] != T:
        times.append(T)
    return np.asarray(times, dtype=np.int64)


def run_experiment(config: ExperimentConfig, mode: str = "run",
                   out_dir: Optional[str] = None, workers: int = 1) -> dict:
    """Run the configured Monte Carlo study and emit trace + summary CSVs.

    Every algorithm and sweep point shares the same master seed, so run r of
    every series sees identical reward bits.  Output is written in series /
    run-id order regardless of worker scheduling.
    """
    series = _series_for_mode(config, mode)
    grid = _grid_for(config)
    grid_list = tuple(int(t) for t in grid)
    tasks = []
    for s in series:
        rule, kind = ALGORITHM_LABELS[s.label]
        for run_id in range(config.runs):
            tasks.append((s.means, config.agents, s.topology, config.star_center,
                          config.matrix_file, config.theta, config.horizon,
                          run_id, config.seed, rule, kind, s.alpha,
                          config.gosine_cap, grid_list))
    if workers <= 1:
        results = [_execute_task(t) for t in tasks]
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            results = pool.map(_execute_task, tasks, chunksize=1)

    out_path = Path(out_dir if out_dir is not None else config.out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    trace_path = out_path / "trace.csv"
    summary_path = out_path / "summary.csv"
    try:
        with open(trace_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_HEADER)
            idx = 0
            for s in series:
                for run_id in range(config.runs):
                    curve = results[idx]
                    idx += 1
                    for g, t in enumerate(grid_list):
                        writer.writerow([s.label, _fmt(s.alpha), s.sweep_value,
                                         run_id, t, _fmt(curve[g])])
        with open(summary_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SUMMARY_HEADER)
            idx = 0
            for s in series:
                curves = np.stack(results[idx:idx + config.runs])
                idx += config.runs
                mean, half = summarize(curves)
                for g, t in enumerate(grid_list):
                    writer.writerow([s.label, _fmt(s.alpha), s.sweep_value,
                                     t, _fmt(mean[g]), _fmt(half[g])])
    except BaseException:
        trace_path.unlink(missing_ok=True)
        summary_path.unlink(missing_ok=True)
        raise
    return {"trace": trace_path, "summary": summary_path}


def summarize_trace_file(trace_path) -> list[list[str]]:
    """Recompute summary rows from an emitted trace CSV (formatted strings,
    directly comparable to summary.csv rows)."""
    groups: dict = {}
    order = []
    with open(trace_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRACE_HEADER:
            raise ValueError(f"unexpected trace header {header}")
        for label, alpha, sweep, run, t, value in reader:
            key = (label, alpha, sweep)
            if key not in groups:
                groups[key] = {}
                order.append(key)
            groups[key].setdefault(int(run), []).append((int(t), float(value)))
    rows = []
    for key in order:
        runs = sorted(groups[key])
        times = [t for t, _ in groups[key][runs[0]]]
        curves = np.array([[v for _, v in groups[key][r]] for r in runs])
        mean, half = summarize(curves)
        for g, t in enumerate(times):
            rows.append([key[0], key[1], key[2], str(t), _fmt(mean[g]), _fmt(half[g])])
    return rows


def emit_reference_constants(config: ExperimentConfig,
                             out_dir: Optional[str] = None) -> Path:
    """Write the Lai-Robbins constant and each agent's asymptotic constant."""
    instance = build_instance(default_means(config), config.agents)
    sticky = partition_sticky_sets(instance.num_arms, instance.num_agents)
    out_path = Path(out_dir if out_dir is not None else config.out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    ref_path = out_path / "reference.csv"
    try:
        with open(ref_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(REFERENCE_HEADER)
            writer.writerow(["lai_robbins_constant", "all",
                             _fmt(lai_robbins_constant(instance))])
            for n in range(instance.num_agents):
                writer.writerow(["agent_asymptotic_constant", n,
                                 _fmt(agent_asymptotic_constant(instance, sticky[n]))])
    except BaseException:
        ref_path.unlink(missing_ok=True)
        raise
    return ref_path
