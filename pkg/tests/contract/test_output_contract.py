"""Contract tests for the run directory: CSV layout, JSON summary schema, determinism."""
import csv
import json

import numpy as np
import pytest
from scipy.integrate import trapezoid

from src.main import main
from src.services.run_service import csv_cell
from src.services.time_series import (
    Series,
    dominant_frequency,
    global_maximum,
    local_maxima,
    time_average,
    time_std,
)

SUMMARY_KEYS = {
    "n_sites",
    "window",
    "beta",
    "n_ryd_mean",
    "short_time_ratio",
    "g2",
    "g2_bar",
    "g2_bar_argmax",
    "M_C",
    "M_C_class",
    "quantum_excess_fit",
    "C",
    "EOF",
    "diagnostics",
}
EVOLVE_ARGS = ("evolve", "--n", "10", "--t-end", "12", "--dt", "0.02", "--g2", "2", "3")


@pytest.fixture(scope="module")
def evolve_run(tmp_path_factory):
    """One evolution run shared by the contract checks."""
    directory = tmp_path_factory.mktemp("contract") / "run"
    assert main([*EVOLVE_ARGS, "--output-dir", str(directory)]) == 0
    return directory


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def read_columns(path):
    rows = read_rows(path)
    values = np.array([[float(cell) if cell else np.nan for cell in row] for row in rows[1:]])
    return {name: values[:, i] for i, name in enumerate(rows[0])}


@pytest.mark.contract
class TestSeriesContract:
    """Contract tests for series.csv."""

    def test_header(self, evolve_run):
        """Test the column order."""
        header = read_rows(evolve_run / "series.csv")[0]
        assert header == ["t", "beta", "N_Ryd", "g2_2", "g2_3", "M_C", "M_C_class", "C", "EOF"]

    def test_rows(self, evolve_run):
        """Test one row per grid time with at least 12 significant digits."""
        rows = read_rows(evolve_run / "series.csv")[1:]
        assert len(rows) == 601
        assert float(rows[-1][0]) == pytest.approx(12.0)
        digits = rows[100][1].split("e")[0].replace(".", "").lstrip("0")
        assert len(digits) >= 12

    def test_undefined_g2_is_empty(self, evolve_run):
        """Test that g₂ is written as an empty field while β = 0."""
        first = read_rows(evolve_run / "series.csv")[1]
        assert first[0] == "0"
        assert first[3] == "" and first[4] == ""
        assert float(first[2]) == 0.0

    def test_n_ryd_is_n_beta(self, evolve_run):
        """Test N_Ryd = N β in every row."""
        for row in read_rows(evolve_run / "series.csv")[1:]:
            assert float(row[2]) == pytest.approx(10 * float(row[1]), abs=1e-13)


@pytest.mark.contract
class TestSummaryContract:
    """Contract tests for summary.json and config.json."""

    def test_keys(self, evolve_run):
        """Test the top-level schema."""
        with open(evolve_run / "summary.json") as handle:
            summary = json.load(handle)
        assert set(summary) == SUMMARY_KEYS
        assert set(summary["beta"]) == {
            "mean", "std", "global_peak", "first_peak", "dominant_frequency"
        }
        assert set(summary["g2"]) == {"2", "3"}
        assert set(summary["g2_bar"]) == {str(k) for k in range(1, 10)}
        assert set(summary["diagnostics"]) == {
            "max_trace_error",
            "min_dm_eigenvalue",
            "max_concurrence_mismatch",
            "beta_delta_violations",
            "max_pair_sum_gap",
            "max_energy_drift",
        }

    def test_window_mean_matches_series(self, evolve_run):
        """Test that the reported mean of β is the trapezoidal mean of the CSV column."""
        with open(evolve_run / "summary.json") as handle:
            summary = json.load(handle)
        rows = np.array(
            [[float(r[0]), float(r[1])] for r in read_rows(evolve_run / "series.csv")[1:]]
        )
        t0, t1 = summary["window"]
        inside = (rows[:, 0] >= t0 - 1e-9) & (rows[:, 0] <= t1 + 1e-9)
        mean = trapezoid(rows[inside, 1], rows[inside, 0]) / (t1 - t0)
        assert summary["beta"]["mean"] == pytest.approx(mean, abs=1e-9)

    def test_config_echo(self, evolve_run):
        """Test that config.json records the effective settings."""
        with open(evolve_run / "config.json") as handle:
            config = json.load(handle)
        assert config["mode"] == "evolve"
        assert config["n_sites"] == 10
        assert config["delta"] == "infinite"
        assert config["g2_distances"] == [2, 3]
        assert config["output_dir"] == str(evolve_run)

    def test_repeat_run_is_identical(self, evolve_run, tmp_path):
        """Test that a second run reproduces the files byte for byte."""
        repeat = tmp_path / "repeat"
        assert main([*EVOLVE_ARGS, "--output-dir", str(repeat)]) == 0
        for name in ("series.csv", "correlations.csv", "summary.json"):
            assert (repeat / name).read_bytes() == (evolve_run / name).read_bytes()


@pytest.mark.contract
class TestSummaryRoundTrip:
    """Contract tests recomputing summary.json from the emitted CSV files."""

    @pytest.fixture(scope="class")
    def emitted(self, evolve_run):
        with open(evolve_run / "summary.json") as handle:
            summary = json.load(handle)
        columns = read_columns(evolve_run / "series.csv")
        correlations = read_columns(evolve_run / "correlations.csv")
        series = {name: Series(columns["t"], values, name) for name, values in columns.items()}
        return summary, series, correlations

    def test_correlations_header(self, evolve_run):
        """Test that correlations.csv holds g₂ at every distance."""
        header = read_rows(evolve_run / "correlations.csv")[0]
        assert header == ["t"] + [f"g2_{k}" for k in range(1, 10)]

    def test_beta_statistics(self, emitted):
        """Test the window mean, std, peaks and frequency of β."""
        summary, series, _ = emitted
        window = tuple(summary["window"])
        beta = series["beta"]
        assert summary["beta"]["mean"] == pytest.approx(time_average(beta, window), abs=1e-9)
        assert summary["beta"]["std"] == pytest.approx(time_std(beta, window), abs=1e-9)
        t, value = global_maximum(beta)
        assert summary["beta"]["global_peak"]["t"] == pytest.approx(t, abs=1e-9)
        assert summary["beta"]["global_peak"]["value"] == pytest.approx(value, abs=1e-9)
        first_t, first_value = local_maxima(beta.restrict((0.0, 3.0)))[0]
        assert summary["beta"]["first_peak"]["t"] == pytest.approx(first_t, abs=1e-9)
        assert summary["beta"]["first_peak"]["value"] == pytest.approx(first_value, abs=1e-9)
        frequency = summary["beta"]["dominant_frequency"]
        if frequency is not None:
            assert frequency == pytest.approx(dominant_frequency(beta, window), abs=1e-9)
        assert summary["n_ryd_mean"] == pytest.approx(
            time_average(series["N_Ryd"], window), abs=1e-9
        )

    def test_correlation_means(self, emitted):
        """Test g₂ means and the g2_bar table with its argmax."""
        summary, series, correlations = emitted
        window = tuple(summary["window"])
        for k in ("2", "3"):
            assert summary["g2"][k]["mean"] == pytest.approx(
                time_average(series[f"g2_{k}"], window), abs=1e-9
            )
        recomputed = {
            k: time_average(Series(correlations["t"], correlations[f"g2_{k}"]), window)
            for k in range(1, 10)
        }
        for k, value in recomputed.items():
            assert summary["g2_bar"][str(k)] == pytest.approx(value, abs=1e-9)
        # g₂(k) = g₂(N − k), so the argmax is only defined up to its mirror distance
        assert recomputed[summary["g2_bar_argmax"]] == pytest.approx(
            max(recomputed.values()), abs=1e-9
        )

    def test_entanglement_statistics(self, emitted):
        """Test M_C mean, C peak and EOF spread."""
        summary, series, _ = emitted
        window = tuple(summary["window"])
        assert summary["M_C"]["mean"] == pytest.approx(
            time_average(series["M_C"], window), abs=1e-9
        )
        assert summary["C"]["global_peak"]["value"] == pytest.approx(
            global_maximum(series["C"])[1], abs=1e-9
        )
        assert summary["EOF"]["std"] == pytest.approx(time_std(series["EOF"], window), abs=1e-9)

    def test_integer_cells(self):
        """Test that integer columns keep every digit."""
        assert csv_cell(np.int64(2**60 + 1)) == str(2**60 + 1)
        assert csv_cell(np.float64(0.25)) == "0.25"


@pytest.mark.contract
class TestErrorContract:
    """Contract tests for the error document."""

    def test_error_document(self, tmp_path, capsys):
        """Test the JSON error line and exit code."""
        assert main(["evolve", "--n", "10", "--g2", "12", "--output-dir", str(tmp_path)]) == 2
        lines = [line for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
        document = json.loads(lines[-1])
        assert set(document) == {"detail", "code", "errors"}
        assert document["code"] == "VALIDATION_ERROR"
