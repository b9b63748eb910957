"""Battery qubit exchanging excitations with an auxiliary qubit

Both qubits share the splitting `omega` and are coupled by

    V = i eta (s+_B s-_A - s-_B s+_A)

which conserves the number of excitations, so the
propagator commutes with the bare Hamiltonian. Joint
states are written in the |gg>, |ge>, |eg>, |ee> basis
with the battery as the first (most significant) factor.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ergokit.dataset import TimeSeries
from ergokit.exceptions import DomainError
from ergokit.states import (
    DensityOperator,
    HamiltonianSpec,
    apply_unitary,
    ergotropy,
    matrix_exponential,
    mutual_information,
    partial_trace,
    tensor,
    von_neumann_entropy,
)
from ergokit.tls import (
    IsoFamilyTls,
    TlsState,
    ergotropy_split,
    family_member,
    pure_member,
)

DIMS = (2, 2)


@dataclass(frozen=True)
class TwoTlsConfig:
    """Resonant battery/auxiliary pair

    Args:
        family:
            Isoergotropic family of the battery. Its splitting
            is shared by both qubits.
        eta:
            Coupling strength
        theta_B:
            Initial coherence phase of the battery
        phi_A:
            Initial coherence phase of the auxiliary
    """

    family: IsoFamilyTls
    eta: float = 1.0
    theta_B: float = 0.0
    phi_A: float = 0.0

    def __post_init__(self):
        if not self.eta > 0:
            raise DomainError("eta", self.eta, "(0, inf)")

    @property
    def omega(self) -> float:
        return self.family.omega

    @property
    def period(self) -> float:
        """Period of the battery's incoherent/coherent exchange"""
        return np.pi / self.eta


def interaction_hamiltonian(cfg: TwoTlsConfig) -> np.ndarray:
    V = np.zeros((4, 4), dtype=complex)
    V[2, 1] = 1j * cfg.eta
    V[1, 2] = -1j * cfg.eta
    return V


def bare_hamiltonian(cfg: TwoTlsConfig) -> HamiltonianSpec:
    return HamiltonianSpec.two_qubit(cfg.omega)


def propagator(cfg: TwoTlsConfig, t: float) -> np.ndarray:
    """Closed-form exp(-i (H_A + H_B + V) t)"""

    phase = np.exp(-1j * cfg.omega * t)
    c, s = np.cos(cfg.eta * t), np.sin(cfg.eta * t)

    U = np.zeros((4, 4), dtype=complex)
    U[0, 0] = 1
    U[1, 1] = U[2, 2] = phase * c
    U[1, 2] = -phase * s
    U[2, 1] = phase * s
    U[3, 3] = phase**2
    return U


def propagator_expm(cfg: TwoTlsConfig, t: float) -> np.ndarray:
    H = bare_hamiltonian(cfg).matrix + interaction_hamiltonian(cfg)
    return matrix_exponential(-1j * H * t)


def initial_state(cfg: TwoTlsConfig) -> DensityOperator:
    """Pure family member on the battery, reference on the auxiliary"""

    battery = pure_member(cfg.family, cfg.theta_B)
    auxiliary = family_member(cfg.family, cfg.family.p_bar, cfg.phi_A)
    return DensityOperator.from_matrix(
        tensor(battery.matrix, auxiliary.matrix)
    )


def joint_state(cfg: TwoTlsConfig, t: float) -> DensityOperator:
    return apply_unitary(propagator(cfg, t), initial_state(cfg))


def evolve(cfg: TwoTlsConfig, t: float) -> Tuple[TlsState, DensityOperator]:
    joint = joint_state(cfg, t)
    battery = partial_trace(joint, DIMS, "first")
    auxiliary = partial_trace(joint, DIMS, "second")
    return TlsState.from_density(battery, cfg.omega), auxiliary


def battery_population(cfg: TwoTlsConfig, t: float) -> float:
    p_bar, P = cfg.family.p_bar, cfg.family.P
    return ((p_bar - 1) * np.cos(2 * cfg.eta * t) + p_bar + P) / 2


def closed_form_battery(cfg: TwoTlsConfig, t: float) -> TlsState:
    """Battery state without propagating the joint state

    The coherence of the pure endpoint is scaled by cos(eta t),
    so its phase jumps by 2 pi whenever the cosine is negative.
    """

    theta = cfg.theta_B + 2 * cfg.omega * t
    if np.cos(cfg.eta * t) < 0:
        theta += 2 * np.pi
    return family_member(cfg.family, battery_population(cfg, t), theta)


@dataclass(frozen=True, eq=False)
class JointTrajectory:
    times: np.ndarray
    joint_states: List[DensityOperator]
    reduced_B: List[DensityOperator]
    reduced_A: List[DensityOperator]

    def __len__(self):
        return len(self.times)


def default_grid(cfg: TwoTlsConfig, points: int = 200) -> np.ndarray:
    if points < 2:
        raise DomainError("points", points, "[2, inf)")
    return np.linspace(0, cfg.period, points)


def trajectory(
    cfg: TwoTlsConfig, times: Optional[Sequence[float]] = None
) -> JointTrajectory:
    times = default_grid(cfg) if times is None else np.asarray(times)
    rho0 = initial_state(cfg)

    joint, battery, auxiliary = [], [], []
    for t in times:
        rho = apply_unitary(propagator(cfg, t), rho0)
        joint.append(rho)
        battery.append(partial_trace(rho, DIMS, "first"))
        auxiliary.append(partial_trace(rho, DIMS, "second"))
    times = np.asarray(times, dtype=float)
    return JointTrajectory(times, joint, battery, auxiliary)


def trajectory_metrics(
    cfg: TwoTlsConfig, times: Optional[Sequence[float]] = None
) -> TimeSeries:
    """Ergotropies, entropies and correlations along the exchange

    The composite ergotropy is taken with respect to the
    bare Hamiltonian H_A + H_B, leaving out the interaction.
    """

    path = trajectory(cfg, times)
    H = bare_hamiltonian(cfg)

    records = []
    for t, joint, rho_B, rho_A in zip(
        path.times, path.joint_states, path.reduced_B, path.reduced_A
    ):
        battery = TlsState.from_density(rho_B, cfg.omega)
        auxiliary = TlsState.from_density(rho_A, cfg.omega)
        split_B, split_A = ergotropy_split(battery), ergotropy_split(auxiliary)
        records.append(
            {
                "p_B": battery.p,
                "p_B_closed": battery_population(cfg, t),
                "C_B": battery.C,
                "R_B": split_B.total,
                "R_B_inc": split_B["incoherent"],
                "R_B_coh": split_B["coherent"],
                "R_A": split_A.total,
                "R_A_inc": split_A["incoherent"],
                "R_A_coh": split_A["coherent"],
                "R_total": ergotropy(joint, H),
                "S_B": von_neumann_entropy(rho_B),
                "S_A": von_neumann_entropy(rho_A),
                "S_BA": von_neumann_entropy(joint),
                "I": mutual_information(joint, DIMS),
            }
        )
    return TimeSeries.from_records(path.times, records)
