"""Two-cell battery prepared in a one-parameter family of X-states

Basis ordering is |gg>, |ge>, |eg>, |ee> with cell 1 as the
first factor, the same convention as `ergokit.tls_dynamics`.
The family pairs the states at q and 1 - q, which share
ergotropy, energy and entropy but not entanglement.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import optimize

from ergokit.exceptions import DomainError
from ergokit.states import (
    DensityOperator,
    ErgotropyBreakdown,
    HamiltonianSpec,
    apply_unitary,
    energy,
    ergotropy,
    partial_trace,
    swap_operator,
    tensor,
    von_neumann_entropy,
)
from ergokit.tls import TlsState, inc_ergotropy

DIMS = (2, 2)
CELLS = ("first", "second")


def _check_q(q: float) -> float:
    if not 0 <= q <= 1:
        raise DomainError("q", q, "[0, 1]")
    return float(q)


@dataclass(frozen=True)
class XState:
    q: float
    omega: float = 1.0

    def __post_init__(self):
        _check_q(self.q)

    @property
    def matrix(self) -> np.ndarray:
        q = self.q
        rho = np.diag([q / 2, q * (1 - q), (1 - q) ** 2, q / 2])
        rho[0, 3] = rho[3, 0] = q**2 - q / 2
        return rho.astype(complex)

    @property
    def density(self) -> DensityOperator:
        return DensityOperator.from_matrix(self.matrix)

    @property
    def hamiltonian(self) -> HamiltonianSpec:
        return HamiltonianSpec.two_qubit(self.omega)

    def partner(self) -> "XState":
        return XState(1 - self.q, self.omega)


def x_ergotropy(q: float, omega: float = 1.0) -> ErgotropyBreakdown:
    """Total ergotropy split into its population and coherence parts"""

    q = _check_q(q)
    total = omega * abs(1 - 2 * q)
    incoherent = omega * abs((q - 2) * (q - 0.5))

    # the two closed forms agree up to round-off where R^coh vanishes
    coherent = max(total - incoherent, 0.0)
    return ErgotropyBreakdown.from_components(
        incoherent=total - coherent, coherent=coherent
    )


def _concurrence_polynomial(q: float) -> float:
    return 2 * q**2 - q - 2 * (1 - q) * np.sqrt(q * (1 - q))


def concurrence(q: float) -> float:
    q = _check_q(q)
    return float(min(max(_concurrence_polynomial(q), 0.0), 1.0))


def sudden_death_point(xtol: float = 1e-14) -> float:
    """Largest q below which the X-state is separable

    The concurrence polynomial is negative at q = 1/2
    and equals 1 at q = 1, so a single sign change
    lives in between.
    """
    return optimize.bisect(_concurrence_polynomial, 0.5, 1.0, xtol=xtol)


def x_populations(q: float) -> Tuple[float, float]:
    """Closed-form excited populations of cell 1 and cell 2"""
    q = _check_q(q)
    return 1 - 1.5 * q + q**2, 1.5 * q - q**2


@dataclass(frozen=True)
class LocalErgotropyReport:
    """Global versus local ergotropy of an X-state

    Args:
        R_total:
            Ergotropy of the two-cell state
        R_1:
            Ergotropy of the reduced state of cell 1
        R_2:
            Ergotropy of the reduced state of cell 2
        p_1:
            Excited population of cell 1
        p_2:
            Excited population of cell 2
    """

    R_total: float
    R_1: float
    R_2: float
    p_1: float
    p_2: float

    @property
    def deficit(self) -> float:
        return self.R_total - self.R_1 - self.R_2


def local_report(q: float, omega: float = 1.0) -> LocalErgotropyReport:
    state = XState(q, omega)
    rho = state.density

    cells = []
    for keep in CELLS:
        reduced = partial_trace(rho, DIMS, keep)
        cells.append(TlsState.from_density(reduced, omega))
    first, second = cells

    return LocalErgotropyReport(
        R_total=ergotropy(rho, state.hamiltonian),
        R_1=ergotropy(first.density, first.hamiltonian),
        R_2=ergotropy(second.density, second.hamiltonian),
        p_1=first.p,
        p_2=second.p,
    )


def thermal_product(q: float) -> np.ndarray:
    """Auxiliary pair with each qubit at excited population q"""
    tau = np.diag([1 - q, q]).astype(complex)
    return tensor(tau, tau)


def postprocessing_unitaries() -> Tuple[np.ndarray, np.ndarray]:
    """Population swap |eg> <-> |ee> followed by a Bell rotation"""

    v1 = np.zeros((4, 4), dtype=complex)
    v1[0, 0] = v1[1, 1] = 1
    v1[3, 2] = v1[2, 3] = 1

    v2 = np.zeros((4, 4), dtype=complex)
    v2[:, 0] = np.array([1, 0, 0, 1]) / np.sqrt(2)
    v2[:, 3] = np.array([1, 0, 0, -1]) / np.sqrt(2)
    v2[1, 1] = v2[2, 2] = 1
    return v1, v2


def postprocessing_unitary() -> np.ndarray:
    v1, v2 = postprocessing_unitaries()
    return v2 @ v1


def swap_with_auxiliary(
    rho: DensityOperator, auxiliary: np.ndarray, full_space: bool = False
) -> DensityOperator:
    """Exchange the two cells with a two-qubit auxiliary

    With `full_space` the SWAP is carried out on the 16
    dimensional joint space and the auxiliary is traced out.
    Otherwise the reduced output, which is just the
    auxiliary's state, is returned directly.
    """

    if not full_space:
        return DensityOperator.from_matrix(auxiliary)

    joint = DensityOperator.from_matrix(tensor(rho, auxiliary))
    joint = apply_unitary(swap_operator(4), joint)
    return partial_trace(joint, (4, 4), "first")


def iso_map(
    q: float, omega: float = 1.0, full_space: bool = False
) -> DensityOperator:
    """Map the X-state at q onto its partner at 1 - q"""

    state = XState(q, omega)
    swapped = swap_with_auxiliary(
        state.density, thermal_product(q), full_space
    )
    return apply_unitary(postprocessing_unitary(), swapped)


@dataclass(frozen=True)
class IsoMapThermo:
    """Energy and entropy bookkeeping of the q -> 1 - q map

    Args:
        Q:
            Heat absorbed by the cells in the SWAP step
        W:
            Work done on the cells by the postprocessing unitary
        dU:
            Net change of internal energy
        dS:
            Net change of von Neumann entropy
        Q_1:
            Energy change of cell 1 over the whole map
        Q_2:
            Energy change of cell 2 over the whole map
    """

    Q: float
    W: float
    dU: float
    dS: float
    Q_1: float
    Q_2: float


def _local_energies(rho: DensityOperator, omega: float) -> np.ndarray:
    H = HamiltonianSpec.qubit(omega)
    return np.array(
        [energy(partial_trace(rho, DIMS, keep), H) for keep in CELLS]
    )


def iso_map_thermo(q: float, omega: float = 1.0) -> IsoMapThermo:
    state = XState(q, omega)
    H = state.hamiltonian

    rho = state.density
    swapped = swap_with_auxiliary(rho, thermal_product(q))
    output = apply_unitary(postprocessing_unitary(), swapped)

    E_in, E_swap, E_out = [energy(x, H) for x in (rho, swapped, output)]
    local = _local_energies(output, omega) - _local_energies(rho, omega)
    return IsoMapThermo(
        Q=E_swap - E_in,
        W=E_out - E_swap,
        dU=E_out - E_in,
        dS=von_neumann_entropy(output) - von_neumann_entropy(rho),
        Q_1=local[0],
        Q_2=local[1],
    )


def closed_form_thermo(q: float, omega: float = 1.0) -> IsoMapThermo:
    q = _check_q(q)
    Q = omega * (2 * q - 1)
    Q_1 = omega * (q - 0.5)
    return IsoMapThermo(Q=Q, W=-Q, dU=0.0, dS=0.0, Q_1=Q_1, Q_2=-Q_1)


def local_ergotropies_closed(
    q: float, omega: float = 1.0
) -> Tuple[float, float]:
    p_1, p_2 = x_populations(q)
    return inc_ergotropy(p_1, omega), inc_ergotropy(p_2, omega)
