import numpy as np
import pytest

from ergokit.exceptions import (
    DimensionMismatch,
    DomainError,
    NonHermitianInput,
    TruncationTooSmall,
    UnphysicalState,
    ValidationError,
)
from ergokit.states import (
    DensityOperator,
    ErgotropyBreakdown,
    FockOracleConfig,
    HamiltonianSpec,
    apply_kraus,
    apply_unitary,
    energy,
    ergotropy,
    fock_gaussian_adaptive,
    fock_thermal,
    l1_coherence,
    mutual_information,
    partial_trace,
    passive_state,
    psd_sqrt,
    purity,
    renyi2_entropy,
    spectral_decompose,
    swap_operator,
    tensor,
    trace_distance,
    von_neumann_entropy,
)


@pytest.mark.parametrize(
    "matrix",
    [
        [[1, 1], [0, 0]],  # not hermitian
        [[1, 0], [0, 1]],  # trace 2
        [[1.5, 0], [0, -0.5]],  # negative eigenvalue
    ],
)
def test_density_validation(matrix):
    with pytest.raises(UnphysicalState):
        DensityOperator(np.array(matrix))


def test_density_from_matrix_symmetrizes():
    matrix = np.array([[0.5, 0.25 + 1e-13], [0.25, 0.5]])
    rho = DensityOperator.from_matrix(matrix)
    assert rho.matrix[0, 1] == rho.matrix[1, 0]

    with pytest.raises(DimensionMismatch):
        DensityOperator(np.ones((2, 3)) / 2)


def test_spectral_decompose():
    A = np.array([[2, 1j], [-1j, 2]])
    spectrum = spectral_decompose(A, "descending")
    assert np.allclose(spectrum.eigenvalues, [3, 1])
    assert np.allclose(spectrum.reconstruct(), A, atol=1e-12)

    with pytest.raises(NonHermitianInput):
        spectral_decompose(np.array([[0, 1], [0, 0]]))


def test_hamiltonian_spec():
    with pytest.raises(DomainError):
        HamiltonianSpec(np.array([1.0, 0.0]))
    with pytest.raises(ValidationError):
        HamiltonianSpec(np.array([0.0, 1.0]), np.ones((2, 2)))

    H = HamiltonianSpec.from_matrix(np.array([[0, 1], [1, 0]]))
    assert np.allclose(H.energies, [-1, 1])
    assert np.allclose(H.matrix, [[0, 1], [1, 0]], atol=1e-12)


def test_qubit_ergotropy():
    H = HamiltonianSpec.qubit(2.0)
    excited = DensityOperator.pure([0, 1])
    assert abs(ergotropy(excited, H) - 2) < 1e-12
    assert abs(energy(excited, H) - 2) < 1e-12

    passive = passive_state(excited, H)
    assert trace_distance(passive, DensityOperator.pure([1, 0])) < 1e-12

    # thermal states are passive
    thermal = DensityOperator(np.diag([0.7, 0.3]))
    assert ergotropy(thermal, H) == 0


def random_density(rng, dim):
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = X @ X.conj().T
    return DensityOperator.from_matrix(rho / np.trace(rho).real)


def random_unitary(rng, dim):
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, _ = np.linalg.qr(X)
    return Q


def test_degenerate_relabeling(rng):
    energies = np.array([0.0, 1.0, 1.0, 2.0])
    swap = np.eye(4)[:, [0, 2, 1, 3]]
    mixed = np.eye(4, dtype=complex)
    mixed[1:3, 1:3] = random_unitary(rng, 2)

    H = HamiltonianSpec(energies)
    for _ in range(20):
        rho = random_density(rng, 4)
        R = ergotropy(rho, H)
        for basis in (swap, mixed):
            relabeled = HamiltonianSpec(energies, basis)
            assert abs(ergotropy(rho, relabeled) - R) < 1e-10


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2)])
def test_partial_trace_ignores_local_unitaries(dims, rng):
    d1, d2 = dims
    rho = random_density(rng, d1 * d2)

    # a unitary on the second factor leaves the first one alone
    U = tensor(np.eye(d1), random_unitary(rng, d2))
    evolved = apply_unitary(U, rho)
    before = partial_trace(rho, dims, "first")
    after = partial_trace(evolved, dims, "first")
    assert trace_distance(before, after) < 1e-12

    U = tensor(random_unitary(rng, d1), np.eye(d2))
    evolved = apply_unitary(U, rho)
    before = partial_trace(rho, dims, "second")
    after = partial_trace(evolved, dims, "second")
    assert trace_distance(before, after) < 1e-12


def test_ergotropy_dimension_check():
    with pytest.raises(DimensionMismatch):
        ergotropy(DensityOperator.maximally_mixed(3), HamiltonianSpec.qubit())


def test_entropies():
    rho = DensityOperator.maximally_mixed(4)
    assert abs(von_neumann_entropy(rho) - np.log(4)) < 1e-12
    assert abs(purity(rho) - 0.25) < 1e-12
    assert abs(renyi2_entropy(rho) - np.log(4)) < 1e-12

    pure = DensityOperator.pure([1, 1j, 0])
    assert abs(von_neumann_entropy(pure)) < 1e-12
    assert abs(renyi2_entropy(pure)) < 1e-12


def test_coherence():
    H = HamiltonianSpec.qubit()
    plus = DensityOperator.pure([1, 1])
    assert abs(l1_coherence(plus, H) - 1) < 1e-12
    assert abs(l1_coherence(DensityOperator.maximally_mixed(2), H)) < 1e-12


def test_operations():
    ground = DensityOperator.pure([1, 0])
    sigma_x = np.array([[0, 1], [1, 0]])
    excited = apply_unitary(sigma_x, ground)
    assert trace_distance(excited, np.diag([0, 1])) < 1e-12

    # full amplitude damping sends everything to the ground state
    kraus = [np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])]
    decayed = apply_kraus(kraus, excited)
    assert trace_distance(decayed, ground) < 1e-12

    with pytest.raises(DimensionMismatch):
        apply_unitary(np.eye(3), ground)


def test_partial_trace_and_mutual_information():
    a = DensityOperator(np.diag([0.3, 0.7]))
    b = DensityOperator.pure([1, 1])
    product = DensityOperator.from_matrix(tensor(a, b))

    first = partial_trace(product, (2, 2), "first")
    second = partial_trace(product, (2, 2), "second")
    assert trace_distance(first, a) < 1e-12
    assert trace_distance(second, b) < 1e-12
    assert abs(mutual_information(product, (2, 2))) < 1e-12

    bell = DensityOperator.pure([1, 0, 0, 1])
    assert abs(mutual_information(bell, (2, 2)) - 2 * np.log(2)) < 1e-12
    assert abs(mutual_information(bell, (2, 2), "renyi2") - 2 * np.log(2)) < (
        1e-12
    )

    with pytest.raises(DomainError):
        partial_trace(product, (2, 2), "third")
    with pytest.raises(DimensionMismatch):
        partial_trace(product, (2, 3))


def test_swap_operator():
    S = swap_operator(3)
    assert np.allclose(S @ S, np.eye(9))

    a, b = np.diag([1, 0, 0]), np.diag([0, 0, 1])
    swapped = S @ tensor(a, b) @ S.T
    assert np.allclose(swapped, tensor(b, a))


def test_psd_sqrt(rng):
    X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    A = X @ X.conj().T
    root = psd_sqrt(A)
    assert np.allclose(root @ root, A, atol=1e-10)


def test_fock_truncation():
    with pytest.raises(TruncationTooSmall):
        fock_thermal(10, FockOracleConfig(truncation=10))
    with pytest.raises(DomainError):
        FockOracleConfig(truncation=1)

    # displaced vacuum needs the cutoff to grow past 16
    rho = fock_gaussian_adaptive(3.0, 0, 0, FockOracleConfig(truncation=8))
    assert rho.dim >= 32
    H = HamiltonianSpec.harmonic(rho.dim)
    assert abs(ergotropy(rho, H) - 9) < 1e-5


def test_ergotropy_breakdown():
    split = ErgotropyBreakdown.from_components(a=0.25, b=0.5)
    assert split.total == 0.75
    assert split["b"] == 0.5

    with pytest.raises(ValidationError):
        ErgotropyBreakdown(1.0, {"a": 0.25})
    with pytest.raises(ValidationError):
        ErgotropyBreakdown.from_components(a=1.0, b=-0.5)
