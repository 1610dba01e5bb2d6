"""Run orchestration: one output directory per run with config echo, CSV series,
JSON summary and optional DOT graph."""
import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from src.cli.schemas.run_config import RunConfig, RunMode
from src.core.errors import NumericalException, SimulationException
from src.services.coupling_graph import export_coupling_graph
from src.services.effective import build_effective, compare_dynamics, validity_check
from src.services.hamiltonian import (
    HermitianMatrix,
    full_hamiltonian,
    h0_block,
    perfect_blockade_hamiltonian,
)
from src.services.observables import ObservableSeries, evaluator_for
from src.services.oracle import verify
from src.services.propagator import Propagator, vacuum
from src.services.spectrum import analyze_manifolds, dos_histogram
from src.services.symmetric_basis import build_basis, count_blockaded_configs, generate_bracelets
from src.services.time_series import (
    Series,
    dominant_frequency,
    envelope_exponential_fit,
    global_maximum,
    local_maxima,
    time_average,
    time_std,
)

logger = logging.getLogger(__name__)

SHORT_TIME_WINDOW = (0.02, 0.05)
SHORT_TIME_PEAK_HORIZON = 3.0


def format_value(value: Any) -> str:
    """CSV cell: 15 significant digits, empty for undefined values."""
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return ""
    return f"{value:.15g}"


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars and non-finite floats for JSON output."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value) if math.isfinite(value) else None
    return value


def csv_cell(value: Any) -> str:
    """format_value for numpy scalars, keeping integers exact."""
    return format_value(value.item() if isinstance(value, np.generic) else value)


def _peak(point) -> Dict[str, float]:
    return {"t": point[0], "value": point[1]}


class RunService:
    """Service executing one configured run and writing its files."""

    def __init__(self, config: RunConfig):
        """Initialize the run service.

        Args:
            config: Validated run configuration
        """
        self.config = config
        self.directory = config.run_directory
        self.written: List[Path] = []

    def _write_csv(self, name: str, columns: Dict[str, np.ndarray]) -> Path:
        path = self.directory / name
        rows = zip(*columns.values())
        with open(path, "w", newline="") as handle:
            self.written.append(path)
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns.keys())
            for row in rows:
                writer.writerow(csv_cell(value) for value in row)
        return path

    def _write_json(self, name: str, data: Dict[str, Any]) -> Path:
        path = self.directory / name
        with open(path, "w") as handle:
            self.written.append(path)
            json.dump(to_jsonable(data), handle, indent=2)
            handle.write("\n")
        return path

    def _write_text(self, name: str, text: str) -> Path:
        path = self.directory / name
        with open(path, "w") as handle:
            self.written.append(path)
            handle.write(text)
        return path

    def _cleanup(self) -> None:
        for path in self.written:
            path.unlink(missing_ok=True)
        logger.warning(f"Removed {len(self.written)} partial files from {self.directory}")
        self.written = []

    def execute(self) -> Dict[str, Any]:
        """Run the configured mode.

        Returns:
            The summary document that was written

        Raises:
            SimulationException: On invalid parameters or numerical failure; files written
                so far are removed for numerical and unexpected failures
        """
        handlers: Dict[RunMode, Callable[[], Dict[str, Any]]] = {
            RunMode.BASIS: self.run_basis,
            RunMode.EVOLVE: self.run_evolve,
            RunMode.COMPARE: self.run_compare,
            RunMode.SPECTRUM: self.run_spectrum,
            RunMode.VERIFY: self.run_verify,
            RunMode.GRAPH: self.run_graph,
        }
        self.directory.mkdir(parents=True, exist_ok=True)
        try:
            self._write_json("config.json", self.config.echo())
            summary = handlers[self.config.mode]()
            self._write_json("summary.json", summary)
        except NumericalException:
            self._cleanup()
            raise
        except np.linalg.LinAlgError as exc:
            self._cleanup()
            raise NumericalException(f"linear algebra failure: {exc}") from exc
        except SimulationException:
            raise
        except Exception:
            self._cleanup()
            raise
        logger.info(f"Run {self.config.mode.value} finished, files in {self.directory}")
        return summary

    def run_basis(self) -> Dict[str, Any]:
        params = self.config.params
        basis = build_basis(params, self.config.selected_sector)
        bracelets = generate_bracelets(params.n_sites, self.config.bracelet_method)
        blockaded = build_basis(params)
        self._write_csv(
            "basis.csv",
            {
                "rep": basis.reps,
                "orbit_size": basis.orbit_sizes,
                "excitations": basis.excitation_counts,
            },
        )
        return {
            "n_sites": params.n_sites,
            "m": params.m,
            "bracelets": len(bracelets),
            "blockaded_dim": len(blockaded),
            "blockaded_configs": count_blockaded_configs(params.n_sites, params.m),
            "sector": str(self.config.selected_sector),
            "sector_dim": len(basis),
        }

    def _evolve_series(self, g2_distances) -> ObservableSeries:
        params = self.config.params
        if params.is_perfect_blockade:
            hamiltonian = perfect_blockade_hamiltonian(params)
        else:
            validity_check(params)
            hamiltonian = build_effective(params).h_eff
        basis = hamiltonian.basis
        propagator = Propagator(hamiltonian, self.config.propagation)
        return evaluator_for(basis).series(
            propagator, vacuum(basis), self.config.grid, g2_distances
        )

    def run_evolve(self) -> Dict[str, Any]:
        config = self.config
        all_distances = list(range(1, config.n_sites))
        series = self._evolve_series(all_distances)
        columns = series.columns()
        requested = {f"g2_{k}" for k in config.g2_distances}
        self._write_csv(
            "series.csv",
            {
                name: values
                for name, values in columns.items()
                if not name.startswith("g2_") or name in requested
            },
        )
        # g₂ at every distance k = 1 .. N-1, the input of g2_bar
        self._write_csv(
            "correlations.csv",
            {
                name: values
                for name, values in columns.items()
                if name == "t" or name.startswith("g2_")
            },
        )
        return self.summarize(series, config.g2_distances)

    def summarize(self, series: ObservableSeries, g2_distances) -> Dict[str, Any]:
        """Acceptance-relevant scalars of an evolution run."""
        window = self.config.averaging_window
        times = series.times
        horizon = (times[0], min(times[-1], SHORT_TIME_PEAK_HORIZON))
        make = {name: Series(times, values, name) for name, values in series.columns().items()}

        def short_peaks(name: str) -> List[Dict[str, float]]:
            if horizon[1] <= horizon[0]:
                return []
            return [_peak(p) for p in local_maxima(make[name].restrict(horizon))]

        beta = make["beta"]
        summary: Dict[str, Any] = {
            "n_sites": series.n_sites,
            "window": list(window),
            "beta": {
                "mean": time_average(beta, window),
                "std": time_std(beta, window),
                "global_peak": _peak(global_maximum(beta)),
                "first_peak": next(iter(short_peaks("beta")), None),
                "dominant_frequency": _optional(lambda: dominant_frequency(beta, window)),
            },
            "n_ryd_mean": time_average(make["N_Ryd"], window),
        }
        in_short = (times >= SHORT_TIME_WINDOW[0]) & (times <= SHORT_TIME_WINDOW[1])
        if np.any(in_short):
            summary["short_time_ratio"] = float(
                np.mean(series.beta[in_short] / times[in_short] ** 2)
            )

        g2_bar = {
            k: _optional(lambda k=k: time_average(make[f"g2_{k}"], window)) for k in series.g2
        }
        summary["g2"] = {
            str(k): {
                "mean": g2_bar[k],
                "first_peak": next(iter(short_peaks(f"g2_{k}")), None) if k > 1 else None,
            }
            for k in g2_distances
        }
        defined = {k: v for k, v in g2_bar.items() if v is not None}
        summary["g2_bar"] = {str(k): v for k, v in g2_bar.items()}
        summary["g2_bar_argmax"] = max(defined, key=defined.get) if defined else None

        excess = Series(times, series.mc - series.mc_class, "M_C - M_C_class")
        fit = _optional(lambda: envelope_exponential_fit(excess))
        summary["M_C"] = {
            "mean": time_average(make["M_C"], window),
            "short_time_peaks": short_peaks("M_C"),
        }
        summary["M_C_class"] = {"short_time_peaks": short_peaks("M_C_class")}
        summary["quantum_excess_fit"] = (
            None
            if fit is None
            else {"amplitude": fit.amplitude, "rate": fit.rate, "n_maxima": fit.n_maxima}
        )
        summary["C"] = {"global_peak": _peak(global_maximum(make["C"]))}
        eof_peaks = short_peaks("EOF")
        summary["EOF"] = {
            "global_peak": _peak(global_maximum(make["EOF"])),
            "short_time_peaks": eof_peaks,
            "second_peak_reduction": (
                1.0 - eof_peaks[1]["value"] / eof_peaks[0]["value"] if len(eof_peaks) > 1 else None
            ),
            "std": time_std(make["EOF"], window),
        }
        summary["diagnostics"] = series.diagnostics
        return summary

    def run_compare(self) -> Dict[str, Any]:
        config = self.config
        validity = validity_check(config.params)
        report = compare_dynamics(
            config.params, config.grid, config.observables, config.g2_distances
        )
        perfect, effective = report.perfect.columns(), report.effective.columns()
        columns = {"t": report.perfect.times}
        for name in ["beta"] + [f"g2_{k}" for k in config.g2_distances]:
            columns[f"{name}_perfect"] = perfect[name]
            columns[f"{name}_effective"] = effective[name]
        self._write_csv("comparison.csv", columns)
        return {
            "n_sites": config.n_sites,
            "delta": config.delta,
            "max_relative_deviation": report.deviations,
            "validity": {
                "width_nu0": validity.width_nu0,
                "width_nu1": validity.width_nu1,
                "manifolds_separated": validity.manifolds_separated,
            },
        }

    def run_spectrum(self) -> Dict[str, Any]:
        params = self.config.params
        hamiltonian = full_hamiltonian(params)
        dos = dos_histogram(hamiltonian, self.config.bin_width)
        self._write_csv(
            "dos.csv", {"lower": dos.edges[:-1], "upper": dos.edges[1:], "count": dos.counts}
        )
        summary: Dict[str, Any] = {"dim": hamiltonian.dim, "n_bins": int(dos.counts.size)}
        if params.m == 2:
            manifolds = analyze_manifolds(params)
            summary["manifolds"] = [manifold.as_dict() for manifold in manifolds]
            summary["n_manifolds"] = len(manifolds)
            summary["label_span"] = manifolds[-1].nu - manifolds[0].nu + 1
        return summary

    def run_verify(self) -> Dict[str, Any]:
        report = verify(self.config.params, self.config.grid, self.config.g2_distances)
        summary = {
            "n_sites": report.n_sites,
            "deviations": report.deviations,
            "projection_norm_deficit": report.projection_norm_deficit,
            "passed": report.passed(),
        }
        if not report.passed():
            raise NumericalException(f"oracle deviations exceed tolerance: {report.deviations}")
        return summary

    def run_graph(self) -> Dict[str, Any]:
        basis = build_basis(self.config.params, self.config.selected_sector)
        block = h0_block(basis, basis)
        document = export_coupling_graph(basis, HermitianMatrix(block.entries, basis=basis))
        self._write_text("graph.dot", document)
        return {
            "nodes": len(basis),
            "edges": int(np.count_nonzero(np.triu(np.abs(block.entries) > 1e-12, k=1))),
        }


def _optional(compute: Callable[[], Any]) -> Optional[Any]:
    """Value of an optional statistic, None when it cannot be formed on this grid."""
    try:
        return compute()
    except SimulationException as exc:
        logger.warning(f"Skipped statistic: {exc.detail}")
        return None
