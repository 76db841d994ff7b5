"""Tests for chart rendering, including the plot-fidelity acceptance check."""
import csv
import subprocess
import sys

import numpy as np
import pytest

from regretplots import FigureSpec, RenderError, render

HEADER = ["algorithm", "alpha", "sweep_value", "t", "mean_regret",
          "ci_half_width"]


def write_csv(path, rows, header=HEADER):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def fixture_rows():
    rows = []
    for label, base in (("AOGB-KL", 3.0), ("GosInE-KL", 5.0)):
        for i, t in enumerate([10, 20, 40, 80]):
            rows.append([label, "1", "-", t, base * (i + 1) + 0.125,
                         0.25 * (i + 1)])
    return rows


def band_bounds(collection):
    """Recover (x, lower, upper) from a fill_between polygon."""
    vertices = collection.get_paths()[0].vertices
    bounds = {}
    for x, y in vertices:
        lo, hi = bounds.get(x, (y, y))
        bounds[x] = (min(lo, y), max(hi, y))
    xs = sorted(bounds)
    lower = [bounds[x][0] for x in xs]
    upper = [bounds[x][1] for x in xs]
    return xs, lower, upper


class TestTimeMode:
    def test_values_match_fixture(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_csv(path, fixture_rows())
        fig = render(FigureSpec((str(path),), "time", str(tmp_path / "o.png")))
        ax = fig.axes[0]
        lines = ax.get_lines()
        assert [ln.get_label() for ln in lines] == ["AOGB-KL", "GosInE-KL"]
        for line, collection, base in zip(lines, ax.collections, (3.0, 5.0)):
            expect_mean = [base * (i + 1) + 0.125 for i in range(4)]
            expect_half = [0.25 * (i + 1) for i in range(4)]
            assert np.allclose(line.get_xdata(), [10, 20, 40, 80], atol=0)
            assert np.max(np.abs(line.get_ydata() - np.array(expect_mean))) \
                <= 1e-9
            xs, lower, upper = band_bounds(collection)
            assert np.allclose(xs, [10, 20, 40, 80], atol=0)
            expect_lo = np.array(expect_mean) - np.array(expect_half)
            expect_hi = np.array(expect_mean) + np.array(expect_half)
            assert np.max(np.abs(np.array(lower) - expect_lo)) <= 1e-9
            assert np.max(np.abs(np.array(upper) - expect_hi)) <= 1e-9
        assert (tmp_path / "o.png").exists()

    def test_zero_regret_flat_line(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_csv(path, [["AOGB-KL", "1", "-", t, 0.0, 0.0] for t in (1, 2, 3)])
        fig = render(FigureSpec((str(path),), "time", str(tmp_path / "o.png")))
        line = fig.axes[0].get_lines()[0]
        assert np.all(line.get_ydata() == 0.0)
        xs, lower, upper = band_bounds(fig.axes[0].collections[0])
        assert lower == upper == [0.0, 0.0, 0.0]

    def test_topology_series_labels(self, tmp_path):
        path = tmp_path / "summary.csv"
        rows = []
        for topo in ("complete", "cycle", "star"):
            for t in (10, 20):
                rows.append(["AOGB-KL", "1", topo, t, 1.0, 0.1])
        write_csv(path, rows)
        fig = render(FigureSpec((str(path),), "time", str(tmp_path / "o.png")))
        labels = [ln.get_label() for ln in fig.axes[0].get_lines()]
        assert labels == ["AOGB-KL, complete", "AOGB-KL, cycle",
                          "AOGB-KL, star"]

    def test_rerun_idempotent(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_csv(path, fixture_rows())
        spec = FigureSpec((str(path),), "time", str(tmp_path / "o.png"))
        a = render(spec).axes[0].get_lines()[0].get_ydata()
        b = render(spec).axes[0].get_lines()[0].get_ydata()
        assert np.array_equal(a, b)

    def test_single_point_series_rejected(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_csv(path, [["AOGB-KL", "1", "-", 10, 1.0, 0.1]])
        with pytest.raises(RenderError, match="at least 2"):
            render(FigureSpec((str(path),), "time", str(tmp_path / "o.png")))

    def test_constants_guide_line(self, tmp_path):
        summary = tmp_path / "summary.csv"
        write_csv(summary, fixture_rows())
        constants = tmp_path / "reference.csv"
        write_csv(constants, [["lai_robbins_constant", "all", "2.5"],
                              ["agent_asymptotic_constant", "0", "2.5"]],
                  header=["quantity", "agent", "value"])
        fig = render(FigureSpec((str(summary),), "time",
                                str(tmp_path / "o.png"),
                                constants_path=str(constants), logx=True))
        guide = fig.axes[0].get_lines()[-1]
        assert np.allclose(guide.get_ydata(), 2.5 * np.log([10, 20, 40, 80]))
        assert fig.axes[0].get_xscale() == "log"


class TestSweepMode:
    def test_final_time_values(self, tmp_path):
        path = tmp_path / "summary.csv"
        rows = []
        for sweep, final in (("0.5", 10.0), ("1", 7.0), ("2", 9.0)):
            rows.append(["AOGB-KL", sweep, sweep, 50, final / 2, 0.3])
            rows.append(["AOGB-KL", sweep, sweep, 100, final, 0.5])
        write_csv(path, rows)
        fig = render(FigureSpec((str(path),), "sweep", str(tmp_path / "o.png")))
        line = fig.axes[0].get_lines()[0]
        assert np.allclose(line.get_xdata(), [0.5, 1.0, 2.0], atol=0)
        assert np.allclose(line.get_ydata(), [10.0, 7.0, 9.0], atol=1e-9)

    def test_non_numeric_sweep_rejected(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_csv(path, [["AOGB-KL", "1", "star", 10, 1.0, 0.1]])
        with pytest.raises(RenderError, match="sweep_value"):
            render(FigureSpec((str(path),), "sweep", str(tmp_path / "o.png")))


class TestValidation:
    def test_malformed_header(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_csv(path, fixture_rows(),
                  header=["algorithm", "alpha", "sweep", "t", "mean", "ci"])
        with pytest.raises(RenderError, match="summary.csv"):
            render(FigureSpec((str(path),), "time", str(tmp_path / "o.png")))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "summary.csv"
        path.write_text("")
        with pytest.raises(RenderError):
            render(FigureSpec((str(path),), "time", str(tmp_path / "o.png")))

    def test_no_data_rows(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_csv(path, [])
        with pytest.raises(RenderError, match="no data rows"):
            render(FigureSpec((str(path),), "time", str(tmp_path / "o.png")))

    def test_bad_mode(self):
        with pytest.raises(RenderError):
            FigureSpec(("x.csv",), "3d", "o.png")


class TestCli:
    def run_cli(self, *args):
        return subprocess.run([sys.executable, "-m", "regretplots", *args],
                              capture_output=True, text=True)

    def test_renders_image(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_csv(path, fixture_rows())
        out = tmp_path / "fig.png"
        result = self.run_cli("--summary", str(path), "--mode", "time",
                              "--out", str(out))
        assert result.returncode == 0, result.stderr
        assert out.exists()

    def test_malformed_header_nonzero_exit(self, tmp_path):
        path = tmp_path / "summary.csv"
        write_csv(path, fixture_rows(), header=["a", "b"])
        result = self.run_cli("--summary", str(path), "--mode", "time",
                              "--out", str(tmp_path / "fig.png"))
        assert result.returncode != 0
        assert "summary.csv" in result.stderr
        assert not (tmp_path / "fig.png").exists()

    def test_missing_file_nonzero_exit(self, tmp_path):
        result = self.run_cli("--summary", str(tmp_path / "nope.csv"),
                              "--mode", "time",
                              "--out", str(tmp_path / "fig.png"))
        assert result.returncode != 0
