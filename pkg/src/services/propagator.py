"""Time evolution from the vacuum under a time-independent Hamiltonian (ħ = 1, t in τ₀)."""
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import expm_multiply

from src.core.config import settings
from src.core.errors import InvalidParameterException, NumericalException
from src.models.params import TimeGrid
from src.services.hamiltonian import HermitianMatrix
from src.services.symmetric_basis import SymmetricBasis

logger = logging.getLogger(__name__)

PROPAGATION_METHODS = ("auto", "spectral", "krylov")


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """Complex amplitudes over a symmetric basis, or over all 2^N configurations."""

    amps: np.ndarray
    n_sites: int
    basis: Optional[SymmetricBasis] = None

    @property
    def dim(self) -> int:
        return int(self.amps.size)

    @property
    def is_full_space(self) -> bool:
        return self.basis is None

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def vacuum(basis: SymmetricBasis) -> Wavefunction:
    """Unit amplitude on the all-ground representative.

    Raises:
        InvalidParameterException: If the basis does not contain the vacuum
    """
    if 0 not in basis:
        raise InvalidParameterException(f"sector {basis.sector} does not contain the vacuum")
    amps = np.zeros(len(basis), dtype=complex)
    amps[basis.index[0]] = 1.0
    return Wavefunction(amps, basis.n_sites, basis)


def full_space_vacuum(n_sites: int) -> Wavefunction:
    amps = np.zeros(1 << n_sites, dtype=complex)
    amps[0] = 1.0
    return Wavefunction(amps, n_sites)


class Propagator:
    """Propagator exp(-iHt) for a fixed Hamiltonian.

    Small problems are diagonalized once and every sample costs one dense product; above
    ``settings.dense_threshold`` the state is stepped with ``expm_multiply``.
    """

    def __init__(self, hamiltonian: HermitianMatrix, method: str = "auto"):
        """Initialize the propagator.

        Args:
            hamiltonian: Time-independent Hamiltonian in units of ε
            method: ``"spectral"``, ``"krylov"`` or ``"auto"`` (size based)

        Raises:
            InvalidParameterException: If the method is unknown
            NumericalException: If the eigendecomposition fails
        """
        if method not in PROPAGATION_METHODS:
            raise InvalidParameterException(f"unknown propagation method '{method}'")
        if method == "auto":
            method = "spectral" if hamiltonian.dim <= settings.dense_threshold else "krylov"
        self.hamiltonian = hamiltonian
        self.method = method
        self._eigenvalues: Optional[np.ndarray] = None
        self._eigenvectors: Optional[np.ndarray] = None
        if method == "spectral":
            try:
                self._eigenvalues, self._eigenvectors = scipy.linalg.eigh(hamiltonian.dense())
            except (np.linalg.LinAlgError, ValueError) as exc:
                raise NumericalException(f"eigendecomposition failed: {exc}") from exc
        else:
            self._generator = -1j * hamiltonian.sparse()
        logger.info(f"Propagator ready: dim={hamiltonian.dim} method={self.method}")

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    def _check(self, psi0: Wavefunction) -> None:
        if psi0.dim != self.dim:
            raise InvalidParameterException(
                f"wavefunction dimension {psi0.dim} does not match Hamiltonian {self.dim}"
            )

    def _spectral_batch(
        self, psi: np.ndarray, coefficients: np.ndarray, times: np.ndarray
    ) -> np.ndarray:
        phases = np.exp(-1j * np.outer(times, self._eigenvalues))
        amps = (phases * coefficients[None, :]) @ self._eigenvectors.T
        # V Vᴴ ψ only reproduces ψ to rounding; t = 0 returns the initial state itself
        amps[times == 0.0] = psi
        return amps

    def _krylov_batch(self, psi: np.ndarray, times: np.ndarray) -> np.ndarray:
        if times.size == 1:
            return expm_multiply(self._generator * times[0], psi)[None, :]
        steps = np.diff(times)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
            return np.stack([expm_multiply(self._generator * t, psi) for t in times])
        start = expm_multiply(self._generator * times[0], psi) if times[0] else psi
        return expm_multiply(
            self._generator, start, start=0.0, stop=times[-1] - times[0], num=times.size,
            endpoint=True,
        )

    def iter_amplitudes(
        self, psi0: Wavefunction, times: np.ndarray, chunk: Optional[int] = None
    ) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Yield (times, amplitudes) batches with one row per sample.

        Raises:
            NumericalException: If a sample violates norm conservation
        """
        self._check(psi0)
        chunk = chunk or settings.time_chunk
        times = np.asarray(times, dtype=float)
        coefficients = None
        if self.method == "spectral":
            coefficients = self._eigenvectors.conj().T @ psi0.amps
        origin, state = 0.0, psi0.amps
        for begin in range(0, times.size, chunk):
            batch_times = times[begin : begin + chunk]
            if self.method == "spectral":
                amps = self._spectral_batch(psi0.amps, coefficients, batch_times)
            else:
                amps = self._krylov_batch(state, batch_times - origin)
                origin, state = batch_times[-1], amps[-1]
            norm_error = np.max(np.abs(np.linalg.norm(amps, axis=1) - 1.0))
            if norm_error > settings.norm_tolerance * max(1.0, psi0.norm()):
                raise NumericalException(f"norm conservation violated by {norm_error:.3e}")
            logger.debug(f"Propagated {begin + batch_times.size}/{times.size} samples")
            yield batch_times, amps

    def state_at(self, psi0: Wavefunction, t: float) -> Wavefunction:
        """Ψ(t) = exp(-iHt) Ψ(0) for any real t."""
        self._check(psi0)
        if t == 0.0:
            amps = psi0.amps.copy()
        elif self.method == "spectral":
            coefficients = self._eigenvectors.conj().T @ psi0.amps
            amps = self._spectral_batch(psi0.amps, coefficients, np.array([t]))[0]
        else:
            amps = expm_multiply(self._generator * t, psi0.amps)
        return Wavefunction(amps, psi0.n_sites, psi0.basis)

    def evolve(self, psi0: Wavefunction, grid: TimeGrid) -> List[Wavefunction]:
        """Sample Ψ(t) at every grid time."""
        samples = []
        for _, amps in self.iter_amplitudes(psi0, grid.times):
            samples.extend(Wavefunction(row, psi0.n_sites, psi0.basis) for row in amps)
        return samples

    def energy(self, psi: Wavefunction) -> float:
        return float(np.real(np.vdot(psi.amps, self.hamiltonian.data @ psi.amps)))

    def energies(self, amps: np.ndarray) -> np.ndarray:
        """⟨Ψ|H|Ψ⟩ for every row of a batch."""
        applied = (self.hamiltonian.data @ amps.T).T
        return np.real(np.sum(amps.conj() * applied, axis=1))


def evolve(
    hamiltonian: HermitianMatrix, psi0: Wavefunction, grid: TimeGrid, method: str = "auto"
) -> List[Wavefunction]:
    """Ψ(t) = exp(-iHt) Ψ(0) sampled on a time grid."""
    return Propagator(hamiltonian, method).evolve(psi0, grid)
