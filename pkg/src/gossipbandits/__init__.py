"""Deterministic simulator for gossip-constrained multi-agent bandits."""

from .agent import (AgentState, PolicyKind, end_phase_update,
                    most_played_in_phase, observe, select_arm)
from .confidence import (BISECTION_MAX_ITER, BISECTION_TOL, IndexKind, f_alpha,
                         hoeffding_index, kl_bernoulli, kl_ucb_index)
from .core import (ProblemInstance, RewardStream, agent_asymptotic_constant,
                   build_instance, lai_robbins_constant, uniform_grid_means)
from .experiments import (ALGORITHM_LABELS, ConfigError, ExperimentConfig,
                          emit_reference_constants, parse_config,
                          run_experiment, summarize, summarize_trace_file)
from .network import (GossipMatrix, complete_graph, cycle_graph, diameter,
                      is_strongly_connected, load_matrix_csv, p_min,
                      sample_neighbor, star_graph)
from .simulator import (PhaseSchedule, RunTrace, default_grid,
                        detect_first_spread, detect_stabilization,
                        partition_sticky_sets, phase_boundary, run_single,
                        run_single_reference)

__version__ = "0.1.0"

__all__ = [
    "AgentState", "PolicyKind", "end_phase_update", "most_played_in_phase",
    "observe", "select_arm",
    "BISECTION_MAX_ITER", "BISECTION_TOL", "IndexKind", "f_alpha",
    "hoeffding_index", "kl_bernoulli", "kl_ucb_index",
    "ProblemInstance", "RewardStream", "agent_asymptotic_constant",
    "build_instance", "lai_robbins_constant", "uniform_grid_means",
    "ALGORITHM_LABELS", "ConfigError", "ExperimentConfig",
    "emit_reference_constants", "parse_config", "run_experiment",
    "summarize", "summarize_trace_file",
    "GossipMatrix", "complete_graph", "cycle_graph", "diameter",
    "is_strongly_connected", "load_matrix_csv", "p_min", "sample_neighbor",
    "star_graph",
    "PhaseSchedule", "RunTrace", "default_grid", "detect_first_spread",
    "detect_stabilization", "partition_sticky_sets", "phase_boundary",
    "run_single", "run_single_reference",
]
