"""Finite-dimensional density operators and their thermodynamics

Everything here works on dense complex matrices. The
closed forms used by the battery modules are all checked
against the brute-force quantities computed in this module,
so nothing in here knows about any particular battery.
"""

import functools
from dataclasses import dataclass, replace
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.special import xlogy

from ergokit.exceptions import (
    DimensionMismatch,
    DomainError,
    NonHermitianInput,
    TruncationTooSmall,
    UnphysicalState,
    ValidationError,
)
from ergokit.logging import logger
from ergokit.types import ENTROPY_TYPE, KEEP_TYPE, ORDER_TYPE

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-12
MATRIX_TYPE = Union[np.ndarray, "DensityOperator"]


def _as_matrix(op: MATRIX_TYPE) -> np.ndarray:
    if isinstance(op, DensityOperator):
        return op.matrix
    return np.asarray(op)


def _hermitian_deviation(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T)))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit trace matrix

    Validation happens at construction, so any instance that
    exists is a physical state. Use `from_matrix` for matrices
    assembled from floating point products, which symmetrizes
    away round-off before validating.

    Args:
        matrix:
            Square complex matrix representing the state
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch("a square matrix", matrix.shape)

        deviation = _hermitian_deviation(matrix)
        if deviation > HERMITIAN_TOL:
            raise UnphysicalState(
                f"Hermiticity violated by {deviation:.3e}"
            )

        trace = np.trace(matrix).real
        if abs(trace - 1) > TRACE_TOL:
            raise UnphysicalState(f"trace is {trace:.15f}")

        min_eig = np.linalg.eigvalsh(matrix).min()
        if min_eig < -PSD_TOL:
            raise UnphysicalState(f"negative eigenvalue {min_eig:.3e}")

        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_matrix(
        cls, matrix: np.ndarray, normalize: bool = False
    ) -> "DensityOperator":
        matrix = np.asarray(matrix, dtype=complex)
        matrix = (matrix + matrix.conj().T) / 2
        if normalize:
            matrix = matrix / np.trace(matrix).real
        return cls(matrix)

    @classmethod
    def pure(cls, vector: Sequence[complex]) -> "DensityOperator":
        vector = np.asarray(vector, dtype=complex)
        vector = vector / np.linalg.norm(vector)
        return cls.from_matrix(np.outer(vector, vector.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Ascending spectrum with round-off negatives set to 0"""
        eigenvalues = np.linalg.eigvalsh(self.matrix)
        return np.where(eigenvalues < 0, 0.0, eigenvalues)


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """Hamiltonian stored through its spectral decomposition

    Args:
        energies:
            Nondecreasing eigenenergies, in energy units
        basis:
            Unitary whose columns are the eigenvectors matching
            `energies`. Defaults to the identity, i.e. a
            Hamiltonian which is diagonal in the computational
            basis.
    """

    energies: np.ndarray
    basis: Optional[np.ndarray] = None

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        if energies.ndim != 1 or len(energies) == 0:
            raise DimensionMismatch("a nonempty energy vector", energies.shape)
        if (np.diff(energies) < -1e-12).any():
            raise DomainError("energies", energies, "nondecreasing order")

        if self.basis is None:
            basis = np.eye(len(energies), dtype=complex)
        else:
            basis = np.asarray(self.basis, dtype=complex)
            if basis.shape != (len(energies), len(energies)):
                raise DimensionMismatch(len(energies), basis.shape)
            error = np.abs(basis.conj().T @ basis - np.eye(len(energies)))
            if error.max() > UNITARY_TOL * max(1, len(energies)):
                raise ValidationError("Hamiltonian basis is not unitary")

        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "HamiltonianSpec":
        spectrum = spectral_decompose(matrix, "ascending")
        return cls(spectrum.eigenvalues, spectrum.eigenvectors)

    @classmethod
    def qubit(cls, omega: float = 1.0) -> "HamiltonianSpec":
        """omega |e><e| in the (g, e) basis"""
        return cls(np.array([0.0, omega]))

    @classmethod
    def two_qubit(cls, omega: float = 1.0) -> "HamiltonianSpec":
        """H_1 + H_2 in the |gg>, |ge>, |eg>, |ee> basis"""
        return cls(np.array([0.0, omega, omega, 2 * omega]))

    @classmethod
    def harmonic(cls, dim: int, omega: float = 1.0) -> "HamiltonianSpec":
        """omega (n + 1/2) truncated to the first `dim` Fock states"""
        return cls(omega * (np.arange(dim) + 0.5))

    @property
    def dim(self) -> int:
        return len(self.energies)

    @property
    def matrix(self) -> np.ndarray:
        return (self.basis * self.energies) @ self.basis.conj().T


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        vectors = self.eigenvectors
        return (vectors * self.eigenvalues) @ vectors.conj().T


@dataclass(frozen=True)
class FockOracleConfig:
    """Truncation settings for Fock-space brute force

    Args:
        truncation:
            Number of Fock levels kept in the returned matrices
        trace_deficit_tol:
            Largest population allowed to leak above
            the truncation before it is rejected
    """

    truncation: int = 80
    trace_deficit_tol: float = 1e-8

    def __post_init__(self):
        if self.truncation < 2:
            raise DomainError("truncation", self.truncation, "[2, inf)")


def spectral_decompose(
    op: np.ndarray, order: ORDER_TYPE = "ascending"
) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix

    Args:
        op:
            Hermitian matrix to decompose
        order:
            Whether eigenvalues should be sorted in
            ascending or descending order
    Returns:
        The eigenvalues and the matrix whose columns
            are the corresponding orthonormal eigenvectors
    """

    op = np.asarray(_as_matrix(op), dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionMismatch("a square matrix", op.shape)

    scale = max(1.0, float(np.abs(op).max()))
    deviation = _hermitian_deviation(op)
    if deviation > 1e-10 * scale:
        raise NonHermitianInput(deviation)

    eigenvalues, eigenvectors = np.linalg.eigh((op + op.conj().T) / 2)
    if order == "descending":
        eigenvalues, eigenvectors = eigenvalues[::-1], eigenvectors[:, ::-1]
    elif order != "ascending":
        raise DomainError("order", order, "{ascending, descending}")
    return Spectrum(eigenvalues, eigenvectors)


def _check_dims(rho: DensityOperator, H: HamiltonianSpec) -> None:
    if rho.dim != H.dim:
        raise DimensionMismatch(H.dim, rho.dim)


def in_energy_basis(rho: DensityOperator, H: HamiltonianSpec) -> np.ndarray:
    _check_dims(rho, H)
    return H.basis.conj().T @ rho.matrix @ H.basis


def energy(rho: DensityOperator, H: HamiltonianSpec) -> float:
    """Mean energy Tr[rho H]"""
    populations = np.diag(in_energy_basis(rho, H)).real
    return float(populations @ H.energies)


def ergotropy(rho: DensityOperator, H: HamiltonianSpec) -> float:
    """Maximal work extractable from `rho` by a cyclic unitary

    Pairs the populations of `rho` sorted in descending
    order with the energies of `H` in ascending order to
    get the energy of the passive state.
    """

    _check_dims(rho, H)
    populations = np.linalg.eigvalsh(rho.matrix)[::-1]
    passive_energy = float(populations @ H.energies)
    return max(energy(rho, H) - passive_energy, 0.0)


def passive_state(rho: DensityOperator, H: HamiltonianSpec) -> DensityOperator:
    _check_dims(rho, H)

    # stable sort so that equal populations keep their index order
    eigenvalues = rho.eigenvalues()
    populations = eigenvalues[np.argsort(-eigenvalues, kind="stable")]
    matrix = (H.basis * populations) @ H.basis.conj().T
    return DensityOperator.from_matrix(matrix)


def von_neumann_entropy(rho: DensityOperator) -> float:
    eigenvalues = rho.eigenvalues()
    return float(-np.sum(xlogy(eigenvalues, eigenvalues)))


def purity(rho: DensityOperator) -> float:
    return float(np.sum(np.abs(rho.matrix) ** 2))


def renyi2_entropy(rho: DensityOperator) -> float:
    return -float(np.log(purity(rho)))


def l1_coherence(rho: DensityOperator, H: HamiltonianSpec) -> float:
    """Sum of off-diagonal magnitudes in the energy eigenbasis"""
    matrix = np.abs(in_energy_basis(rho, H))
    return float(matrix.sum() - np.trace(matrix))


_ENTROPIES = {"von_neumann": von_neumann_entropy, "renyi2": renyi2_entropy}


def partial_trace(
    rho: DensityOperator, dims: Tuple[int, int], keep: KEEP_TYPE = "first"
) -> DensityOperator:
    """Reduce a bipartite state to one of its factors

    Args:
        rho:
            State on the tensor product of spaces
            with dimensions `dims`
        dims:
            Dimensions of the first and second factor
        keep:
            Which factor survives the trace
    """

    d1, d2 = dims
    if d1 * d2 != rho.dim:
        raise DimensionMismatch(d1 * d2, rho.dim)

    tensor = rho.matrix.reshape(d1, d2, d1, d2)
    if keep == "first":
        reduced = np.einsum("ijkj->ik", tensor)
    elif keep == "second":
        reduced = np.einsum("ijil->jl", tensor)
    else:
        raise DomainError("keep", keep, "{first, second}")
    return DensityOperator.from_matrix(reduced)


def mutual_information(
    rho: DensityOperator,
    dims: Tuple[int, int],
    entropy_fn: ENTROPY_TYPE = "von_neumann",
) -> float:
    try:
        entropy = _ENTROPIES[entropy_fn]
    except KeyError:
        raise DomainError("entropy_fn", entropy_fn, set(_ENTROPIES))

    first = partial_trace(rho, dims, "first")
    second = partial_trace(rho, dims, "second")
    return entropy(first) + entropy(second) - entropy(rho)


def trace_distance(a: MATRIX_TYPE, b: MATRIX_TYPE) -> float:
    difference = _as_matrix(a) - _as_matrix(b)
    difference = (difference + difference.conj().T) / 2
    return 0.5 * float(np.abs(np.linalg.eigvalsh(difference)).sum())


def tensor(*ops: MATRIX_TYPE) -> np.ndarray:
    return functools.reduce(np.kron, [_as_matrix(op) for op in ops])


def swap_operator(dim: int) -> np.ndarray:
    """Permutation taking |i>|j> to |j>|i> on two `dim`-level systems"""
    index = np.arange(dim * dim)
    first, second = np.divmod(index, dim)
    swap = np.zeros((dim * dim, dim * dim))
    swap[second * dim + first, index] = 1
    return swap


def apply_unitary(U: np.ndarray, rho: DensityOperator) -> DensityOperator:
    U = np.asarray(U)
    if U.shape != rho.matrix.shape:
        raise DimensionMismatch(rho.matrix.shape, U.shape)
    return DensityOperator.from_matrix(U @ rho.matrix @ U.conj().T)


def apply_kraus(
    operators: Iterable[np.ndarray], rho: DensityOperator
) -> DensityOperator:
    output = sum(K @ rho.matrix @ K.conj().T for K in operators)
    return DensityOperator.from_matrix(output)


def psd_sqrt(op: MATRIX_TYPE) -> np.ndarray:
    """Square root of a positive semidefinite Hermitian matrix"""
    spectrum = spectral_decompose(_as_matrix(op))
    root = np.sqrt(np.clip(spectrum.eigenvalues, 0, None))
    return Spectrum(root, spectrum.eigenvectors).reconstruct()


def matrix_exponential(A: np.ndarray) -> np.ndarray:
    """exp(A) by Pade scaling-and-squaring"""
    return linalg.expm(np.asarray(A))


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def fock_displacement(mu: complex, cfg: FockOracleConfig) -> np.ndarray:
    a = annihilation(cfg.truncation)
    return matrix_exponential(mu * a.conj().T - np.conj(mu) * a)


def fock_squeeze(xi: complex, cfg: FockOracleConfig) -> np.ndarray:
    a = annihilation(cfg.truncation)
    adag = a.conj().T
    return matrix_exponential((xi * adag @ adag - np.conj(xi) * a @ a) / 2)


def _thermal_populations(N: float, dim: int) -> np.ndarray:
    if N < 0:
        raise DomainError("N", N, "[0, inf)")
    n = np.arange(dim)
    return N**n / (N + 1) ** (n + 1)


def fock_thermal(N: float, cfg: FockOracleConfig) -> DensityOperator:
    populations = _thermal_populations(N, cfg.truncation)
    deficit = 1 - populations.sum()
    if deficit > cfg.trace_deficit_tol:
        raise TruncationTooSmall(cfg.truncation, deficit)
    return DensityOperator.from_matrix(np.diag(populations), normalize=True)


def fock_gaussian(
    mu: complex, xi: complex, N: float, cfg: FockOracleConfig
) -> DensityOperator:
    """D(mu) S(xi) pi(N) S(xi)^H D(mu)^H in a truncated Fock space

    The exponentials are taken in a space twice the size of
    the requested truncation so that edge effects of the
    truncated generators stay outside of the returned block,
    whose missing population is then the trace deficit.
    """

    working = replace(cfg, truncation=2 * cfg.truncation)
    thermal = _thermal_populations(N, working.truncation)
    U = fock_displacement(mu, working) @ fock_squeeze(xi, working)
    full = (U * thermal) @ U.conj().T

    n = cfg.truncation
    block = full[:n, :n]
    deficit = 1 - np.trace(block).real
    if deficit > cfg.trace_deficit_tol:
        raise TruncationTooSmall(n, deficit)
    return DensityOperator.from_matrix(block, normalize=True)


def fock_gaussian_adaptive(
    mu: complex,
    xi: complex,
    N: float,
    cfg: Optional[FockOracleConfig] = None,
    max_truncation: int = 512,
) -> DensityOperator:
    """fock_gaussian with the cutoff doubled until the deficit is met"""

    cfg = cfg or FockOracleConfig()
    while True:
        try:
            return fock_gaussian(mu, xi, N, cfg)
        except TruncationTooSmall as e:
            if cfg.truncation >= max_truncation:
                raise
            truncation = min(2 * cfg.truncation, max_truncation)
            logger.debug(
                "Trace deficit {:.2e} at truncation {}, "
                "retrying with {}".format(
                    e.deficit, cfg.truncation, truncation
                )
            )
            cfg = replace(cfg, truncation=truncation)


@dataclass(frozen=True)
class ErgotropyBreakdown:
    """Total ergotropy together with its named parts

    Build with `from_components` so that the total is
    the sum of the parts by construction.
    """

    total: float
    components: Dict[str, float]

    def __post_init__(self):
        if abs(self.total - sum(self.components.values())) > 1e-12:
            raise ValidationError(
                "Ergotropy components {} don't sum to {}".format(
                    self.components, self.total
                )
            )
        for name, value in self.components.items():
            if value < -1e-12:
                raise ValidationError(
                    f"Ergotropy component {name}={value} is negative"
                )

    @classmethod
    def from_components(cls, **components: float) -> "ErgotropyBreakdown":
        components = {k: float(v) for k, v in components.items()}
        return cls(sum(components.values()), components)

    def __getitem__(self, name: str) -> float:
        return self.components[name]
