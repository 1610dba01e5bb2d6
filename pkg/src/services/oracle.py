"""Brute-force reference: dense propagation over all 2^N configurations, no symmetry."""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from src.core.config import settings
from src.core.errors import InvalidParameterException, ProblemTooLargeException
from src.models.params import ModelParams, Sector, TimeGrid
from src.models.ring_config import canonical_array
from src.services.hamiltonian import (
    HermitianMatrix,
    full_hamiltonian,
    perfect_blockade_hamiltonian,
    projected_blockade_hamiltonian,
)
from src.services.observables import (
    entanglements_of_formation,
    evaluator_for,
    wootters_concurrences,
)
from src.services.propagator import Propagator, Wavefunction, full_space_vacuum, vacuum
from src.services.symmetric_basis import SymmetricBasis, sector_configurations

logger = logging.getLogger(__name__)


def _check_size(params: ModelParams) -> None:
    if params.n_sites > settings.oracle_max_sites:
        raise ProblemTooLargeException(
            f"oracle limited to N <= {settings.oracle_max_sites}, got {params.n_sites}"
        )


def _full_space_batches(
    params: ModelParams, times: np.ndarray
) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield (times, amplitudes) with one row of 2^N amplitudes per sample."""
    _check_size(params)
    dim = 1 << params.n_sites
    if params.is_perfect_blockade:
        configs = np.asarray(sector_configurations(params.n_sites, Sector.blockaded(params.m)))
        hamiltonian = HermitianMatrix(projected_blockade_hamiltonian(params.n_sites, params.m))
        start = np.zeros(configs.size, dtype=complex)
        start[0] = 1.0
        propagator = Propagator(hamiltonian, method="spectral")
        for batch_times, amps in propagator.iter_amplitudes(
            Wavefunction(start, params.n_sites), times
        ):
            embedded = np.zeros((amps.shape[0], dim), dtype=complex)
            embedded[:, configs] = amps
            yield batch_times, embedded
    else:
        propagator = Propagator(full_hamiltonian(params), method="spectral")
        yield from propagator.iter_amplitudes(full_space_vacuum(params.n_sites), times)


def full_space_evolve(params: ModelParams, grid: TimeGrid) -> List[Wavefunction]:
    """Full-space wavefunctions from the vacuum on every grid time.

    Perfect blockade is realized as the projected dynamics P H₀ P over the blockaded
    configurations; finite Δ uses the complete Hamiltonian.

    Raises:
        ProblemTooLargeException: If N exceeds the oracle range
    """
    samples = []
    for _, amps in _full_space_batches(params, grid.times):
        samples.extend(Wavefunction(row, params.n_sites) for row in amps)
    return samples


def _symmetrizer(n_sites: int, basis: SymmetricBasis) -> sp.csr_matrix:
    """S with S[a, c] = 1/√|O_a| for every configuration c in orbit a."""
    configs = np.arange(1 << n_sites, dtype=np.int64)
    reps, _ = canonical_array(configs, n_sites)
    positions = basis.positions(reps)
    inside = positions >= 0
    weights = 1.0 / np.sqrt(basis.orbit_sizes[positions[inside]])
    return sp.csr_matrix(
        (weights, (positions[inside], configs[inside])), shape=(len(basis), configs.size)
    )


def symmetrize(full_psi: Wavefunction, basis: SymmetricBasis) -> Tuple[Wavefunction, float]:
    """Project a full-space state onto the symmetric states of a basis.

    Returns:
        The projected wavefunction and the norm deficit 1 − ‖P ψ‖²/‖ψ‖²
    """
    if full_psi.dim != 1 << basis.n_sites:
        raise InvalidParameterException("wavefunction is not over the full configuration space")
    amps = _symmetrizer(basis.n_sites, basis) @ full_psi.amps
    deficit = 1.0 - float(np.vdot(amps, amps).real) / full_psi.norm() ** 2
    return Wavefunction(amps, basis.n_sites, basis), deficit


def _two_site_tensors(amps: np.ndarray, n_sites: int) -> np.ndarray:
    # axis j of the reshaped tensor holds site N-1-j
    tensor = amps.reshape((amps.shape[0],) + (2,) * n_sites)
    rest = [1 + j for j in range(n_sites - 2)]
    tensor = np.transpose(tensor, [0, n_sites, n_sites - 1] + rest)
    kept = tensor.reshape(amps.shape[0], 4, -1)
    return np.einsum("tar,tbr->tab", kept, np.conj(kept))


def full_space_two_site_dm(psi: Wavefunction) -> np.ndarray:
    """ρ of sites 0 and 1 by tracing the amplitude tensor, basis {gg, gr, rg, rr}."""
    return _two_site_tensors(psi.amps[None, :], psi.n_sites)[0]


def _pair_weights(n_sites: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
    configs = np.arange(1 << n_sites, dtype=np.int64)
    site0 = (configs & 1).astype(float)
    return site0, site0 * ((configs >> k) & 1)


def full_space_g2(psi: Wavefunction, k: int) -> Optional[float]:
    """⟨n₀ n_k⟩/β² from the configuration probabilities; None while β ≈ 0."""
    if not 1 <= k <= psi.n_sites - 1:
        raise InvalidParameterException(f"distance k must lie in [1, {psi.n_sites - 1}]")
    site0, pair = _pair_weights(psi.n_sites, k)
    probabilities = np.abs(psi.amps) ** 2
    beta = float(probabilities @ site0)
    if beta < settings.g2_undefined_below:
        return None
    return float(probabilities @ pair) / beta**2


def _two_party_correlations(rho: np.ndarray) -> np.ndarray:
    blocks = rho.reshape(-1, 2, 2, 2, 2)
    rho1 = np.einsum("tajbj->tab", blocks)
    rho2 = np.einsum("tjajb->tab", blocks)
    product = np.einsum("tij,tkl->tikjl", rho1, rho2).reshape(-1, 4, 4)
    return (2.0 / 3.0) * np.abs(np.linalg.eigvalsh(rho - product)).sum(axis=1)


@dataclass
class VerificationReport:
    """Largest deviation per observable between the symmetric and the brute-force paths."""

    n_sites: int
    deviations: Dict[str, float] = field(default_factory=dict)
    projection_norm_deficit: float = 0.0

    def passed(self, tolerance: float = 1e-8) -> bool:
        return (
            all(value <= tolerance for value in self.deviations.values())
            and self.projection_norm_deficit <= 1e-10
        )


def _max_gap(reference: np.ndarray, values: np.ndarray) -> float:
    both = np.isfinite(reference) & np.isfinite(values)
    if np.any(np.isfinite(reference) != np.isfinite(values)):
        return float("inf")
    return float(np.max(np.abs(reference[both] - values[both]), initial=0.0))


def verify(
    params: ModelParams, grid: TimeGrid, g2_distances: Sequence[int] = (1, 2, 3)
) -> VerificationReport:
    """Compare every observable of the perfect-blockade run against the oracle.

    Raises:
        InvalidParameterException: If Δ is finite (the symmetric path is perfect blockade)
        ProblemTooLargeException: If N exceeds the oracle range
    """
    if not params.is_perfect_blockade:
        raise InvalidParameterException("verification compares perfect-blockade dynamics")
    _check_size(params)
    hamiltonian = perfect_blockade_hamiltonian(params)
    basis = hamiltonian.basis
    reduced = evaluator_for(basis).series(
        Propagator(hamiltonian), vacuum(basis), grid, g2_distances
    )
    symmetrizer = _symmetrizer(params.n_sites, basis)
    site0 = _pair_weights(params.n_sites, 1)[0]
    pair_weights = {k: _pair_weights(params.n_sites, k)[1] for k in g2_distances}

    report = VerificationReport(n_sites=params.n_sites)
    gaps: Dict[str, List[float]] = {}
    offset = 0
    for batch_times, amps in _full_space_batches(params, grid.times):
        rows = slice(offset, offset + batch_times.size)
        offset += batch_times.size
        probabilities = np.abs(amps) ** 2
        beta = probabilities @ site0
        rho = _two_site_tensors(amps, params.n_sites)
        concurrences = wootters_concurrences(rho)
        oracle = {
            "beta": beta,
            "M_C": _two_party_correlations(rho),
            "C": concurrences,
            "EOF": entanglements_of_formation(concurrences),
        }
        defined = beta >= settings.g2_undefined_below
        for k, weights in pair_weights.items():
            values = np.full(beta.size, np.nan)
            values[defined] = (probabilities @ weights)[defined] / beta[defined] ** 2
            oracle[f"g2_{k}"] = values
        reference = reduced.columns()
        for name, values in oracle.items():
            gaps.setdefault(name, []).append(_max_gap(reference[name][rows], values))

        projected = (symmetrizer @ amps.T).T
        deficit = 1.0 - np.sum(np.abs(projected) ** 2, axis=1) / probabilities.sum(axis=1)
        report.projection_norm_deficit = max(
            report.projection_norm_deficit, float(np.max(np.abs(deficit)))
        )

    report.deviations = {name: max(values) for name, values in gaps.items()}
    logger.info(
        f"Verified N={params.n_sites}: max deviation "
        f"{max(report.deviations.values()):.3e}, deficit {report.projection_norm_deficit:.3e}"
    )
    return report
