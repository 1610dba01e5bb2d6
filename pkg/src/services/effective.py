"""Finite-Δ dynamics by adiabatic elimination of the ν = 1, 2 subspaces."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.core.config import settings
from src.core.errors import InvalidParameterException
from src.models.params import ModelParams, Sector, TimeGrid
from src.services.hamiltonian import (
    HermitianMatrix,
    SectorBlock,
    h0_block,
    perfect_blockade_hamiltonian,
)
from src.services.observables import ObservableSeries, evaluator_for
from src.services.propagator import Propagator, vacuum
from src.services.symmetric_basis import SymmetricBasis, build_basis

logger = logging.getLogger(__name__)

COMPARISON_SETTLE_TIME = 5.0


@dataclass(frozen=True, eq=False)
class EffectiveModel:
    """H_eff/ε = H₀⁽⁰⁰⁾ − Ω₀₁Ω₀₁ᵀ/Δ − Ω₀₂Ω₀₂ᵀ/(2Δ) on the ν = 0 symmetric sector."""

    params: ModelParams
    h_eff: HermitianMatrix
    blocks: Dict[str, SectorBlock]
    basis: SymmetricBasis

    def corrections(self) -> Tuple[np.ndarray, np.ndarray]:
        """The two second-order terms; both are negative semidefinite."""
        omega01 = self.blocks["01"].entries
        omega02 = self.blocks["02"].entries
        delta = self.params.delta
        return -(omega01 @ omega01.T) / delta, -(omega02 @ omega02.T) / (2 * delta)


def _check_finite(params: ModelParams) -> None:
    if params.m != 2:
        raise InvalidParameterException("adiabatic elimination is defined for m = 2 only")
    if params.is_perfect_blockade:
        raise InvalidParameterException("adiabatic elimination needs a finite delta")


def build_effective(params: ModelParams) -> EffectiveModel:
    """Effective Hamiltonian on the ν = 0 sector up to order 1/Δ.

    Args:
        params: Model parameters with m = 2 and finite Δ

    Returns:
        The effective model together with its coupling blocks

    Raises:
        InvalidParameterException: If m != 2 or Δ is infinite
    """
    _check_finite(params)
    nu0, nu1, nu2 = (build_basis(params, Sector.nu_equals(nu)) for nu in range(3))
    h00 = h0_block(nu0, nu0)
    blocks = {"00": h00, "01": h0_block(nu0, nu1), "02": h0_block(nu0, nu2)}
    model = EffectiveModel(params, HermitianMatrix(h00.entries, basis=nu0), blocks, nu0)
    first, second = model.corrections()
    h_eff = h00.entries + first + second
    logger.info(
        f"Built effective Hamiltonian N={params.n_sites} delta={params.delta}: "
        f"dims nu0={len(nu0)} nu1={len(nu1)} nu2={len(nu2)}"
    )
    return EffectiveModel(params, HermitianMatrix(0.5 * (h_eff + h_eff.T), basis=nu0), blocks, nu0)


@dataclass(frozen=True)
class ValidityReport:
    """Spectral widths of the intra-sector laser coupling against the manifold spacing Δ."""

    width_nu0: float
    width_nu1: float
    delta: float

    @property
    def manifolds_separated(self) -> bool:
        return (self.width_nu0 + self.width_nu1) / 2 < self.delta


def validity_check(params: ModelParams) -> ValidityReport:
    """Warn when the ν = 0 and ν = 1 manifolds are expected to overlap."""
    _check_finite(params)
    widths = []
    for nu in (0, 1):
        basis = build_basis(params, Sector.nu_equals(nu))
        if len(basis) == 0:
            widths.append(0.0)
            continue
        energies = scipy.linalg.eigvalsh(h0_block(basis, basis).entries)
        widths.append(float(energies[-1] - energies[0]))
    report = ValidityReport(width_nu0=widths[0], width_nu1=widths[1], delta=params.delta)
    if not report.manifolds_separated:
        logger.warning(
            f"Manifolds nu=0 and nu=1 overlap at N={params.n_sites}: widths "
            f"{report.width_nu0:.3g}, {report.width_nu1:.3g} vs delta={params.delta}"
        )
    return report


@dataclass
class ComparisonReport:
    """Perfect-blockade and effective series on one grid, with their deviations."""

    perfect: ObservableSeries
    effective: ObservableSeries
    deviations: Dict[str, float] = field(default_factory=dict)


def _run(hamiltonian: HermitianMatrix, grid: TimeGrid, g2_distances: Sequence[int]):
    evaluator = evaluator_for(hamiltonian.basis)
    return evaluator.series(Propagator(hamiltonian), vacuum(hamiltonian.basis), grid, g2_distances)


def relative_deviation(times: np.ndarray, perfect: np.ndarray, effective: np.ndarray) -> float:
    """max |x_eff − x_perf| normalized by the long-time mean of the perfect series."""
    settled = times >= COMPARISON_SETTLE_TIME
    if np.count_nonzero(settled) < 2:
        settled = np.ones_like(times, dtype=bool)
    scale = abs(float(np.nanmean(perfect[settled])))
    if scale == 0.0:
        scale = 1.0
    return float(np.nanmax(np.abs(effective - perfect)) / scale)


def compare_dynamics(
    params: ModelParams,
    grid: TimeGrid,
    observables: Sequence[str] = ("beta",),
    g2_distances: Sequence[int] = (2,),
) -> ComparisonReport:
    """Evolve the perfect-blockade and the effective model side by side.

    Args:
        params: Model parameters with finite Δ
        grid: Common time grid
        observables: CSV column names to compare, e.g. ``beta``, ``g2_2``, ``M_C``
        g2_distances: Distances evaluated for g₂

    Returns:
        Both series and the maximal relative deviation per observable

    Raises:
        InvalidParameterException: If an observable name is unknown
    """
    perfect_h = perfect_blockade_hamiltonian(params)
    effective_h = build_effective(params).h_eff
    with ThreadPoolExecutor(max_workers=settings.max_workers) as executor:
        perfect_run = executor.submit(_run, perfect_h, grid, g2_distances)
        effective_run = executor.submit(_run, effective_h, grid, g2_distances)
        perfect, effective = perfect_run.result(), effective_run.result()

    perfect_columns, effective_columns = perfect.columns(), effective.columns()
    report = ComparisonReport(perfect=perfect, effective=effective)
    for name in observables:
        if name not in perfect_columns or name == "t":
            raise InvalidParameterException(f"unknown observable '{name}'")
        report.deviations[name] = relative_deviation(
            perfect.times, perfect_columns[name], effective_columns[name]
        )
    logger.info(f"Compared dynamics N={params.n_sites} delta={params.delta}: {report.deviations}")
    return report
