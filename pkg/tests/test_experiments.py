"""Unit tests for config parsing, orchestration and CSV emission."""
import csv
import math

import numpy as np
import pytest

from gossipbandits import (ConfigError, ExperimentConfig, RewardStream,
                           build_instance, emit_reference_constants,
                           lai_robbins_constant, parse_config, run_experiment,
                           summarize, summarize_trace_file,
                           uniform_grid_means)
from gossipbandits.experiments import (REFERENCE_HEADER, SUMMARY_HEADER,
                                       TRACE_HEADER, default_means)


def write_config(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


BASE = """\
agents = 3
arms = 6
horizon = 400
runs = 2
algorithms = AOGB-KL, GosInE-Hoeffding
topology = cycle
seed = 7
out_dir = out
"""


class TestParseConfig:
    def test_round_trip(self, tmp_path):
        config = parse_config(write_config(tmp_path, BASE))
        assert config.agents == 3
        assert config.arms == 6
        assert config.algorithms == ("AOGB-KL", "GosInE-Hoeffding")
        assert config.topology == "cycle"
        assert config.alpha == 1.0  # default

    def test_comments_and_blanks(self, tmp_path):
        text = "# header comment\n\n" + BASE + "alpha = 2.0  # inline\n"
        config = parse_config(write_config(tmp_path, text))
        assert config.alpha == 2.0

    def test_unknown_key_names_line(self, tmp_path):
        path = write_config(tmp_path, BASE + "wibble = 3\n")
        with pytest.raises(ConfigError, match=r":9: unknown key 'wibble'"):
            parse_config(path)

    def test_bad_value_names_line_and_field(self, tmp_path):
        path = write_config(tmp_path, BASE.replace("horizon = 400",
                                                   "horizon = soon"))
        with pytest.raises(ConfigError, match=r":3: bad value for 'horizon'"):
            parse_config(path)

    def test_duplicate_key(self, tmp_path):
        path = write_config(tmp_path, BASE + "agents = 4\n")
        with pytest.raises(ConfigError, match="duplicate key 'agents'"):
            parse_config(path)

    def test_missing_required_key(self, tmp_path):
        path = write_config(tmp_path, BASE.replace("runs = 2\n", ""))
        with pytest.raises(ConfigError, match="missing required key 'runs'"):
            parse_config(path)

    def test_missing_equals(self, tmp_path):
        path = write_config(tmp_path, BASE + "justakey\n")
        with pytest.raises(ConfigError, match="expected 'key = value'"):
            parse_config(path)

    def test_unknown_algorithm(self, tmp_path):
        path = write_config(tmp_path, BASE.replace("GosInE-Hoeffding",
                                                   "ThompsonSampling"))
        with pytest.raises(ConfigError, match="unknown algorithm"):
            parse_config(path)

    def test_unknown_topology(self, tmp_path):
        path = write_config(tmp_path, BASE.replace("cycle", "torus"))
        with pytest.raises(ConfigError, match="unknown topology"):
            parse_config(path)

    def test_explicit_means(self, tmp_path):
        path = write_config(tmp_path, BASE + "means = 0.9, 0.5, 0.4, 0.3, 0.2, 0.1\n")
        config = parse_config(path)
        assert default_means(config) == (0.9, 0.5, 0.4, 0.3, 0.2, 0.1)

    def test_validation_errors(self):
        with pytest.raises(ConfigError, match="arms"):
            ExperimentConfig(agents=5, arms=3, horizon=10, runs=1,
                             algorithms=("AOGB-KL",))
        with pytest.raises(ConfigError, match="alpha"):
            ExperimentConfig(agents=2, arms=4, horizon=10, runs=1,
                             algorithms=("AOGB-KL",), alpha=-1.0)
        with pytest.raises(ConfigError, match="matrix_file"):
            ExperimentConfig(agents=2, arms=4, horizon=10, runs=1,
                             algorithms=("AOGB-KL",), topology="custom")


class TestSummarize:
    def test_identical_runs(self):
        curves = np.array([[3.0, 5.0], [3.0, 5.0], [3.0, 5.0]])
        mean, half = summarize(curves)
        assert mean.tolist() == [3.0, 5.0]
        assert half.tolist() == [0.0, 0.0]

    def test_two_runs(self):
        mean, half = summarize(np.array([[10.0], [20.0]]))
        assert mean[0] == 15.0
        assert half[0] == pytest.approx(1.96 * math.sqrt(50.0) / math.sqrt(2.0))
        assert half[0] == pytest.approx(9.80, abs=0.005)

    def test_single_run(self):
        mean, half = summarize(np.array([[4.0, 6.0]]))
        assert mean.tolist() == [4.0, 6.0]
        assert half.tolist() == [0.0, 0.0]

    def test_grand_mean(self):
        rng = np.random.default_rng(1)
        curves = rng.random((7, 5))
        mean, _ = summarize(curves)
        assert np.allclose(mean, curves.mean(axis=0))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            summarize(np.zeros((0, 3)))


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestRunExperiment:
    def test_headers_and_shape(self, tmp_path):
        config = parse_config(write_config(tmp_path, BASE))
        paths = run_experiment(config, "run", tmp_path / "out")
        trace = read_rows(paths["trace"])
        summary = read_rows(paths["summary"])
        assert trace[0] == TRACE_HEADER
        assert summary[0] == SUMMARY_HEADER
        grid_len = len({r[4] for r in trace[1:]})
        assert len(trace) == 1 + 2 * 2 * grid_len  # algorithms x runs x grid
        assert len(summary) == 1 + 2 * grid_len
        assert {r[2] for r in trace[1:]} == {"-"}

    def test_workers_byte_identical(self, tmp_path):
        config = parse_config(write_config(tmp_path, BASE))
        p1 = run_experiment(config, "run", tmp_path / "o1", workers=1)
        p2 = run_experiment(config, "run", tmp_path / "o2", workers=3)
        assert p1["trace"].read_bytes() == p2["trace"].read_bytes()
        assert p1["summary"].read_bytes() == p2["summary"].read_bytes()

    def test_summary_recompute_matches(self, tmp_path):
        config = parse_config(write_config(tmp_path, BASE))
        paths = run_experiment(config, "alpha", tmp_path / "out")
        recomputed = summarize_trace_file(paths["trace"])
        assert recomputed == read_rows(paths["summary"])[1:]

    def test_alpha_sweep_series(self, tmp_path):
        config = parse_config(write_config(tmp_path, BASE))
        paths = run_experiment(config, "alpha", tmp_path / "out")
        rows = read_rows(paths["summary"])[1:]
        series = {(r[0], r[1], r[2]) for r in rows}
        assert len(series) == len(config.alphas) * 2
        assert {r[2] for r in rows} == {"0.5", "1", "2"}

    def test_delta_sweep_means(self, tmp_path):
        config = parse_config(write_config(tmp_path, BASE))
        paths = run_experiment(config, "delta", tmp_path / "out")
        rows = read_rows(paths["summary"])[1:]
        sweep_values = sorted({float(r[2]) for r in rows})
        assert sweep_values == pytest.approx([0.05, 0.1, 0.2])

    def test_topology_sweep_series(self, tmp_path):
        config = parse_config(write_config(tmp_path, BASE))
        paths = run_experiment(config, "topology", tmp_path / "out")
        rows = read_rows(paths["summary"])[1:]
        assert {r[2] for r in rows} == {"complete", "cycle", "star"}

    def test_seventeen_digit_round_trip(self, tmp_path):
        config = parse_config(write_config(tmp_path, BASE))
        paths = run_experiment(config, "run", tmp_path / "out")
        for row in read_rows(paths["trace"])[1:5]:
            value = float(row[5])
            assert f"{value:.17g}" == row[5]

    def test_shared_reward_streams(self, tmp_path):
        # every algorithm sees the same reward bit for the same key
        config = parse_config(write_config(tmp_path, BASE))
        means = default_means(config)
        stream = RewardStream(config.seed, means)
        first = [stream.reward(0, 0, k, 1) for k in range(len(means))]
        again = [stream.reward(0, 0, k, 1) for k in range(len(means))]
        assert first == again

    def test_custom_matrix_file(self, tmp_path):
        matrix = tmp_path / "m.csv"
        np.savetxt(matrix, [[0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 1.0, 0.0]],
                   delimiter=",")
        text = BASE.replace("topology = cycle",
                            f"topology = custom\nmatrix_file = {matrix}")
        config = parse_config(write_config(tmp_path, text))
        paths = run_experiment(config, "run", tmp_path / "out")
        assert paths["summary"].exists()


class TestReferenceConstants:
    def test_contents(self, tmp_path):
        config = parse_config(write_config(tmp_path, BASE))
        path = emit_reference_constants(config, tmp_path / "out")
        rows = read_rows(path)
        assert rows[0] == REFERENCE_HEADER
        assert rows[1][0] == "lai_robbins_constant"
        inst = build_instance(uniform_grid_means(0.9, 0.2, 0.8, 6), 3)
        assert float(rows[1][2]) == pytest.approx(lai_robbins_constant(inst))
        agent_rows = rows[2:]
        assert [r[1] for r in agent_rows] == ["0", "1", "2"]
        total = sum(float(r[2]) for r in agent_rows)
        assert total == pytest.approx(float(rows[1][2]), abs=1e-10)

    def test_single_suboptimal_value(self, tmp_path):
        text = BASE.replace("arms = 6", "arms = 2").replace(
            "agents = 3", "agents = 2").replace("topology = cycle",
                                                "topology = complete")
        config = parse_config(write_config(tmp_path, text))
        path = emit_reference_constants(config, tmp_path / "out")
        rows = read_rows(path)
        assert float(rows[1][2]) == pytest.approx(2.2521, abs=5e-5)
