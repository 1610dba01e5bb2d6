"""Local observables of the evolving ring: two-site density matrix, Rydberg density, g₂,
two-party correlation, concurrence and entanglement of formation.

Sites 0 and 1 are the representative adjacent pair. The two-site basis is
{gg, gr, rg, rr} with the first letter referring to site 0.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from src.core.config import settings
from src.core.errors import InvalidParameterException, NumericalException
from src.models.params import SectorKind, TimeGrid
from src.models.ring_config import canonical_array, popcount_array
from src.services.propagator import Propagator, Wavefunction
from src.services.symmetric_basis import SymmetricBasis, sector_configurations

logger = logging.getLogger(__name__)

_SIGMA_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex
)
_EIGENVALUE_FLOOR = 1e-12


@dataclass(frozen=True)
class TwoSiteDM:
    """Parameters (α, β, γ, δ) of the blockaded two-site reduced density matrix."""

    alpha: float
    beta: float
    gamma: complex
    delta: complex

    def matrix(self) -> np.ndarray:
        return two_site_matrices(
            np.array([self.alpha]), np.array([self.beta]),
            np.array([self.gamma]), np.array([self.delta]),
        )[0]

    def single_site(self) -> np.ndarray:
        return single_site_matrices(
            np.array([self.alpha]), np.array([self.beta]), np.array([self.gamma])
        )[0]

    def violations(self, tol: float = 1e-9) -> List[str]:
        """Broken density-matrix invariants (empty when the state is physical)."""
        problems = []
        if abs(self.alpha + 2 * self.beta - 1.0) > 1e-10:
            problems.append(f"alpha + 2 beta = {self.alpha + 2 * self.beta}")
        rho = self.matrix()
        if not np.allclose(rho, rho.conj().T, atol=1e-14):
            problems.append("matrix not Hermitian")
        if np.linalg.eigvalsh(rho).min() < -tol:
            problems.append("matrix not positive semidefinite")
        return problems


def two_site_matrices(alpha, beta, gamma, delta) -> np.ndarray:
    """Stack of 4×4 two-site matrices, one per sample."""
    rho = np.zeros((np.size(alpha), 4, 4), dtype=complex)
    rho[:, 0, 0] = alpha
    rho[:, 1, 1] = beta
    rho[:, 2, 2] = beta
    rho[:, 0, 1] = rho[:, 0, 2] = gamma
    rho[:, 1, 0] = rho[:, 2, 0] = np.conj(gamma)
    rho[:, 1, 2] = delta
    rho[:, 2, 1] = np.conj(delta)
    return rho


def single_site_matrices(alpha, beta, gamma) -> np.ndarray:
    """Stack of single-site matrices [[α + β, γ], [γ*, β]]."""
    rho = np.zeros((np.size(alpha), 2, 2), dtype=complex)
    rho[:, 0, 0] = np.asarray(alpha) + np.asarray(beta)
    rho[:, 1, 1] = beta
    rho[:, 0, 1] = gamma
    rho[:, 1, 0] = np.conj(gamma)
    return rho


def _two_party_correlations(alpha, beta, gamma, delta) -> np.ndarray:
    rho12 = two_site_matrices(alpha, beta, gamma, delta)
    rho1 = single_site_matrices(alpha, beta, gamma)
    product = np.einsum("tij,tkl->tikjl", rho1, rho1).reshape(-1, 4, 4)
    return (2.0 / 3.0) * np.abs(np.linalg.eigvalsh(rho12 - product)).sum(axis=1)


def _structured_concurrences(beta, delta) -> np.ndarray:
    lambda1 = beta + np.abs(delta)
    lambda2 = np.abs(beta - np.abs(delta))
    return np.maximum(0.0, lambda1 - lambda2)


def wootters_concurrences(rho: np.ndarray) -> np.ndarray:
    # λ_i are the singular values of √ρ (σy⊗σy) √ρ*, i.e. square roots of eig(ρ ρ̃)
    weights, vectors = np.linalg.eigh(rho)
    # rounding noise on null eigenvalues would otherwise enter λ at O(√eps)
    weights = np.where(weights > _EIGENVALUE_FLOOR, weights, 0.0)
    roots = np.sqrt(weights)
    sqrt_rho = (vectors * roots[:, None, :]) @ np.conj(np.swapaxes(vectors, 1, 2))
    lambdas = np.linalg.svd(sqrt_rho @ _SIGMA_YY @ np.conj(sqrt_rho), compute_uv=False)
    return np.maximum(0.0, lambdas[:, 0] - lambdas[:, 1:].sum(axis=1))


def _binary_entropy(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    return np.nan_to_num(h, nan=0.0)


def entanglements_of_formation(concurrences: np.ndarray) -> np.ndarray:
    c = np.clip(concurrences, 0.0, 1.0)
    return _binary_entropy((1 + np.sqrt(1 - c**2)) / 2)


def single_site_dm(dm: TwoSiteDM) -> np.ndarray:
    """ρ¹ = ρ², the reduced state of one site."""
    return dm.single_site()


def rydberg_density(dm: TwoSiteDM) -> float:
    """⟨n_k⟩ = β; the total number of excitations is N β."""
    return dm.beta


def two_party_correlation(dm: TwoSiteDM) -> float:
    """M_C = (2/3) Tr|ρ¹² − ρ¹⊗ρ²|."""
    return float(_two_party_correlations(dm.alpha, dm.beta, dm.gamma, dm.delta)[0])


def kolmogorov_distance(dm: TwoSiteDM) -> float:
    """(2/3) Σ|d¹²ᵢ − d¹⊗²ᵢ| over the diagonals of ρ¹² and ρ¹⊗ρ²."""
    rho1 = dm.single_site()
    product = np.kron(rho1, rho1)
    return float((2.0 / 3.0) * np.abs(np.diag(dm.matrix()) - np.diag(product)).sum())


def two_party_correlation_classical(dm: TwoSiteDM) -> float:
    """M_C^class = (8/3) β²."""
    return 8.0 / 3.0 * dm.beta**2


def wootters_concurrence(rho: np.ndarray) -> float:
    """Concurrence of an arbitrary two-qubit density matrix."""
    return float(wootters_concurrences(np.asarray(rho, dtype=complex)[None, :, :])[0])


def concurrence_regime(dm: TwoSiteDM) -> str:
    return "2|delta|" if dm.beta > abs(dm.delta) else "2beta"


def concurrence(dm: TwoSiteDM) -> float:
    """C = max{0, λ₁ − λ₂} with λ₁ = β + |δ|, λ₂ = |β − |δ||.

    Raises:
        NumericalException: If the general Wootters evaluation disagrees
    """
    structured = float(_structured_concurrences(dm.beta, dm.delta))
    general = wootters_concurrence(dm.matrix())
    if abs(structured - general) > settings.concurrence_tolerance:
        raise NumericalException(
            f"concurrence mismatch: structured {structured} vs Wootters {general}"
        )
    return structured


def entanglement_of_formation(dm: TwoSiteDM) -> float:
    """E = h((1 + √(1 − C²))/2) with the binary entropy h."""
    return float(entanglements_of_formation(np.array([concurrence(dm)]))[0])


@dataclass(frozen=True, eq=False)
class ConfigurationExpansion:
    """Map from a symmetric basis to the raw configurations of its sector.

    A symmetric amplitude a spreads as a/√|O| over every member of its orbit.
    """

    basis: SymmetricBasis
    configs: np.ndarray
    positions: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_basis(cls, basis: SymmetricBasis) -> "ConfigurationExpansion":
        n_sites = basis.n_sites
        if basis.sector.kind == SectorKind.ALL:
            configs = np.arange(1 << n_sites, dtype=np.int64)
        else:
            configs = np.asarray(sector_configurations(n_sites, basis.sector))
        reps, _ = canonical_array(configs, n_sites)
        positions = basis.positions(reps)
        weights = 1.0 / np.sqrt(basis.orbit_sizes[positions])
        return cls(basis, configs, positions, weights)

    def expand(self, amps: np.ndarray) -> np.ndarray:
        """Configuration amplitudes ψ(c), for one state or a batch of rows."""
        return amps[..., self.positions] * self.weights

    def lookup(self, configs: np.ndarray) -> np.ndarray:
        """Indices into ``self.configs``, -1 where a configuration is not in the sector."""
        slot = np.minimum(np.searchsorted(self.configs, configs), self.configs.size - 1)
        return np.where(self.configs[slot] == configs, slot, -1)

    def diagonal_weights(self, selected: np.ndarray, values: Optional[np.ndarray] = None):
        """Per-state weights w_a with Σ_{c selected} v(c)|ψ(c)|² = Σ_a w_a |amp_a|²."""
        contribution = self.weights[selected] ** 2
        if values is not None:
            contribution = contribution * values[selected]
        return np.bincount(
            self.positions[selected], weights=contribution, minlength=len(self.basis)
        )

    def coherence_operator(self, selected: np.ndarray, partners: np.ndarray) -> sp.csr_matrix:
        """G with Σ_{c selected} ψ(c) ψ*(partner(c)) = amp · G · conj(amp)."""
        source = np.nonzero(selected)[0]
        target = self.lookup(partners[selected])
        keep = target >= 0
        source, target = source[keep], target[keep]
        dim = len(self.basis)
        return sp.csr_matrix(
            (
                self.weights[source] * self.weights[target],
                (self.positions[source], self.positions[target]),
            ),
            shape=(dim, dim),
        )


@dataclass
class ObservableSeries:
    """Observables sampled on a time grid, plus invariant diagnostics."""

    times: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    g2: Dict[int, np.ndarray]
    mc: np.ndarray
    mc_class: np.ndarray
    concurrence: np.ndarray
    eof: np.ndarray
    n_sites: int
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def n_ryd(self) -> np.ndarray:
        return self.n_sites * self.beta

    def columns(self) -> Dict[str, np.ndarray]:
        """CSV columns in output order."""
        columns = {"t": self.times, "beta": self.beta, "N_Ryd": self.n_ryd}
        columns.update({f"g2_{k}": values for k, values in self.g2.items()})
        columns.update(
            {"M_C": self.mc, "M_C_class": self.mc_class, "C": self.concurrence, "EOF": self.eof}
        )
        return columns


class ObservableEvaluator:
    """Precomputed reduced operators for the observables of one symmetric basis."""

    def __init__(self, basis: SymmetricBasis):
        """Initialize the evaluator.

        Args:
            basis: Symmetric basis the wavefunctions live in
        """
        self.basis = basis
        self.n_sites = basis.n_sites
        self.expansion = ConfigurationExpansion.from_basis(basis)
        self.has_blockaded_pairs = basis.sector.excludes_adjacent_pairs

        configs = self.expansion.configs
        site0 = (configs & 1).astype(bool)
        site1 = ((configs >> 1) & 1).astype(bool)
        self._w_beta = self.expansion.diagonal_weights(site0)
        self._w_alpha = self.expansion.diagonal_weights(~site0 & ~site1)
        self._w_site0_count = self.expansion.diagonal_weights(site0, popcount_array(configs))
        self._w_pairs = np.stack(
            [
                self.expansion.diagonal_weights(site0 & ((configs >> k) & 1).astype(bool))
                for k in range(1, self.n_sites)
            ],
            axis=1,
        )
        self._gamma_op = self.expansion.coherence_operator(~site0 & ~site1, configs | 2)
        self._delta_op = self.expansion.coherence_operator(~site0 & site1, configs ^ 3)

    def _check_blockaded(self) -> None:
        if not self.has_blockaded_pairs:
            raise InvalidParameterException(
                f"two-site density matrix needs a blockaded basis, got sector {self.basis.sector}"
            )

    def _check_distance(self, k: int) -> None:
        if not 1 <= k <= self.n_sites - 1:
            raise InvalidParameterException(f"distance k must lie in [1, {self.n_sites - 1}]")

    @staticmethod
    def _coherence(amps: np.ndarray, operator: sp.csr_matrix) -> np.ndarray:
        return np.sum((operator.T @ amps.T).T * np.conj(amps), axis=1)

    def two_site_parameters(self, amps: np.ndarray) -> Dict[str, np.ndarray]:
        """α, β, γ, δ for a batch of wavefunction rows."""
        self._check_blockaded()
        probabilities = np.abs(amps) ** 2
        return {
            "alpha": probabilities @ self._w_alpha,
            "beta": probabilities @ self._w_beta,
            "gamma": self._coherence(amps, self._gamma_op),
            "delta": self._coherence(amps, self._delta_op),
        }

    def pair_correlations(self, amps: np.ndarray) -> np.ndarray:
        """⟨n₀ n_k⟩ for k = 1 .. N-1, one row per sample."""
        return (np.abs(amps) ** 2) @ self._w_pairs

    def two_site_dm(self, psi: Wavefunction) -> TwoSiteDM:
        params = self.two_site_parameters(psi.amps[None, :])
        return TwoSiteDM(
            alpha=float(params["alpha"][0]),
            beta=float(params["beta"][0]),
            gamma=complex(params["gamma"][0]),
            delta=complex(params["delta"][0]),
        )

    def g2(self, psi: Wavefunction, k: int) -> Optional[float]:
        """⟨n₀ n_k⟩/β², or None while β is below the undefined threshold."""
        self._check_distance(k)
        probabilities = np.abs(psi.amps) ** 2
        beta = float(probabilities @ self._w_beta)
        if beta < settings.g2_undefined_below:
            return None
        return float(probabilities @ self._w_pairs[:, k - 1]) / beta**2

    def series(
        self,
        propagator: Propagator,
        psi0: Wavefunction,
        grid: TimeGrid,
        g2_distances: Sequence[int] = (1, 2, 3),
    ) -> ObservableSeries:
        """Evolve from ``psi0`` and evaluate every observable on the grid.

        Raises:
            NumericalException: If propagation breaks norm or energy conservation, or a
                decomposition of the two-site states fails
        """
        self._check_blockaded()
        for k in g2_distances:
            self._check_distance(k)
        times = grid.times
        rows: Dict[str, List[np.ndarray]] = {
            name: [] for name in ("alpha", "beta", "gamma", "delta", "pairs", "pair_sum_gap")
        }
        energy0: Optional[float] = None
        max_drift = 0.0
        for batch_times, amps in propagator.iter_amplitudes(psi0, times):
            params = self.two_site_parameters(amps)
            for name, values in params.items():
                rows[name].append(values)
            pairs = self.pair_correlations(amps)
            rows["pairs"].append(pairs)
            two_ways = np.abs(
                params["beta"] + pairs.sum(axis=1) - (np.abs(amps) ** 2) @ self._w_site0_count
            )
            rows["pair_sum_gap"].append(two_ways)
            energies = propagator.energies(amps)
            if energy0 is None:
                energy0 = float(energies[0])
            drift = float(np.max(np.abs(energies - energy0))) / max(1.0, abs(energy0))
            if drift > settings.energy_tolerance:
                raise NumericalException(f"energy conservation violated by {drift:.3e}")
            max_drift = max(max_drift, drift)

        alpha, beta = np.concatenate(rows["alpha"]), np.concatenate(rows["beta"])
        gamma, delta = np.concatenate(rows["gamma"]), np.concatenate(rows["delta"])
        pairs = np.concatenate(rows["pairs"])

        defined = beta >= settings.g2_undefined_below
        g2 = {}
        for k in g2_distances:
            values = np.full(times.size, np.nan)
            values[defined] = pairs[defined, k - 1] / beta[defined] ** 2
            g2[k] = values

        rho = two_site_matrices(alpha, beta, gamma, delta)
        structured = _structured_concurrences(beta, delta)
        try:
            general = wootters_concurrences(rho)
            mc = _two_party_correlations(alpha, beta, gamma, delta)
            min_eigenvalue = float(np.linalg.eigvalsh(rho).min())
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise NumericalException(f"two-site decomposition failed: {exc}") from exc
        violations = int(np.count_nonzero(np.abs(delta) - beta > 1e-12))
        if violations:
            logger.warning(f"beta > |delta| violated at {violations} samples")

        series = ObservableSeries(
            times=times,
            alpha=alpha,
            beta=beta,
            gamma=gamma,
            delta=delta,
            g2=g2,
            mc=mc,
            mc_class=8.0 / 3.0 * beta**2,
            concurrence=structured,
            eof=entanglements_of_formation(structured),
            n_sites=self.n_sites,
        )
        series.diagnostics = {
            "max_trace_error": float(np.max(np.abs(alpha + 2 * beta - 1.0))),
            "min_dm_eigenvalue": min_eigenvalue,
            "max_concurrence_mismatch": float(np.max(np.abs(structured - general))),
            "beta_delta_violations": violations,
            "max_pair_sum_gap": float(np.max(np.concatenate(rows["pair_sum_gap"]))),
            "max_energy_drift": max_drift,
        }
        return series


@lru_cache(maxsize=8)
def evaluator_for(basis: SymmetricBasis) -> ObservableEvaluator:
    """Shared evaluator per basis object."""
    return ObservableEvaluator(basis)


def two_site_dm(psi: Wavefunction) -> TwoSiteDM:
    """Two-site reduced density matrix of sites 0 and 1.

    Raises:
        InvalidParameterException: If ``psi`` is not over a blockaded symmetric basis
    """
    if psi.basis is None:
        raise InvalidParameterException("two_site_dm needs a symmetric-basis wavefunction")
    return evaluator_for(psi.basis).two_site_dm(psi)


def g2(psi: Wavefunction, k: int) -> Optional[float]:
    """Density-density correlation g₂(k) = ⟨n₀ n_k⟩/β²; None when β ≈ 0."""
    if psi.basis is None:
        raise InvalidParameterException("g2 needs a symmetric-basis wavefunction")
    return evaluator_for(psi.basis).g2(psi, k)
