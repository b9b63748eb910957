"""Charging a qubit battery at maximal average power

Under a drive bounded by `epsilon` the fastest route out of
a passive state is a rotation of the Bloch vector about an
equatorial axis, which sweeps the polar angle at rate
`epsilon` while keeping the radius and azimuth fixed. The
average power s0 (1 - cos eps T) / 2T is maximal at the
nontrivial root of cos x + x sin x = 1, and the state
reached there picks out an isoergotropic family.
"""

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp

from ergokit.dataset import TimeSeries
from ergokit.exceptions import DomainError, NumericalError
from ergokit.tls import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    IsoFamilyTls,
    TlsState,
    ergotropy_split,
)


@dataclass(frozen=True)
class ChargingConfig:
    """Bounded resonant drive acting on a qubit

    Args:
        epsilon:
            Bound on the drive strength
        s0:
            Bloch radius of the initial passive state
        phi0:
            Azimuth of the drive axis
        omega:
            Level splitting of the battery
    """

    epsilon: float = 1.0
    s0: float = 1.0
    phi0: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("epsilon", self.epsilon, "(0, inf)")
        if not 0 <= self.s0 <= 1:
            raise DomainError("s0", self.s0, "[0, 1]")


def _stationarity(x: float) -> float:
    return np.cos(x) + x * np.sin(x) - 1


@functools.lru_cache(None)
def solve_alpha_T() -> float:
    """Polar angle swept in the power-optimal charging time

    x = 0 and x = 2 pi are roots as well, so the bracket
    is kept strictly between them.
    """
    return optimize.bisect(
        _stationarity, np.pi / 2, 3 * np.pi / 2, xtol=1e-15, maxiter=200
    )


def avg_power(cfg: ChargingConfig, T: float) -> float:
    if not T > 0:
        raise DomainError("T", T, "(0, inf)")
    swept = cfg.epsilon * T
    return cfg.omega * cfg.s0 * (1 - np.cos(swept)) / (2 * T)


def optimal_duration(cfg: ChargingConfig) -> float:
    return solve_alpha_T() / cfg.epsilon


def max_power(cfg: ChargingConfig) -> float:
    return avg_power(cfg, optimal_duration(cfg))


def golden_optimum(cfg: ChargingConfig) -> float:
    """Power-optimal duration from a direct 1-D search"""

    # power is unimodal on one sweep of the polar angle
    bracket = np.array([0.5, 0.75, 1.25]) * np.pi / cfg.epsilon
    result = optimize.minimize_scalar(
        lambda T: -avg_power(cfg, T),
        bracket=tuple(bracket),
        method="golden",
        tol=1e-10,
    )
    return float(result.x)


def bloch_at(cfg: ChargingConfig, t: float) -> np.ndarray:
    swept = cfg.epsilon * t
    return cfg.s0 * np.array(
        [
            np.sin(swept) * np.cos(cfg.phi0),
            np.sin(swept) * np.sin(cfg.phi0),
            np.cos(swept),
        ]
    )


def drive_hamiltonian(cfg: ChargingConfig) -> np.ndarray:
    return (cfg.epsilon / 2) * (
        -np.sin(cfg.phi0) * SIGMA_X + np.cos(cfg.phi0) * SIGMA_Y
    )


def driven_trajectory(
    cfg: ChargingConfig,
    times: Sequence[float],
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> TimeSeries:
    """Integrate the driven qubit starting from its passive state"""

    H = drive_hamiltonian(cfg)
    rho0 = (np.eye(2) + cfg.s0 * SIGMA_Z) / 2

    def rhs(t, y):
        rho = y.reshape(2, 2)
        return (-1j * (H @ rho - rho @ H)).ravel()

    times = np.asarray(times, dtype=float)
    solution = solve_ivp(
        rhs,
        t_span=(0.0, times[-1]),
        y0=rho0.astype(complex).ravel(),
        t_eval=times,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise NumericalError(f"Drive integration failed: {solution.message}")

    records = []
    for y in solution.y.T:
        rho = y.reshape(2, 2)
        s = np.array(
            [np.trace(rho @ op).real for op in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
        )
        state = TlsState.from_bloch(s, cfg.omega)
        records.append(
            {
                "s_x": s[0],
                "s_y": s[1],
                "s_z": s[2],
                "radius": np.linalg.norm(s),
                "energy": cfg.omega * state.p,
                "R": ergotropy_split(state).total,
            }
        )
    return TimeSeries.from_records(times, records)


def qubit_ergotropy_bloch(
    s: float, alpha: float, omega: float = 1.0
) -> float:
    """Ergotropy of a qubit at Bloch radius `s` and polar angle `alpha`"""
    return omega * s * (1 - np.cos(alpha)) / 2


@dataclass(frozen=True)
class ConeIntersection:
    """Family member reached by power-optimal charging

    Args:
        p_bar:
            Reference population of the family reached
        p:
            Excited population of the member reached
        s_bar:
            Bloch radius of the member reached
        C:
            Coherence of the member reached
        alpha:
            Polar angle of the power-optimal cone
    """

    p_bar: float
    p: float
    s_bar: float
    C: float
    alpha: float

    def __post_init__(self):
        self.family.clip(self.p)

    @property
    def family(self) -> IsoFamilyTls:
        return IsoFamilyTls(self.p_bar)

    def state(self, phi0: float = 0.0, omega: float = 1.0) -> TlsState:
        # drive azimuth phi0 puts the coherence phase at -2 phi0
        return TlsState(self.p, self.C, -2 * phi0, omega)


def cone_intersection(s0: float) -> ConeIntersection:
    if not 0 < s0 <= 1:
        raise DomainError("s0", s0, "(0, 1]")

    alpha = solve_alpha_T()
    return ConeIntersection(
        p_bar=(1 + s0 * np.sin(alpha / 2) ** 2) / 2,
        p=(1 - s0 * np.cos(alpha)) / 2,
        s_bar=s0,
        C=s0 * np.sin(alpha),
        alpha=alpha,
    )
