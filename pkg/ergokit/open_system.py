"""Batteries leaking into a thermal reservoir

Both battery types relax under a GKLS master equation with
rate `gamma` towards the thermal state of occupation `n_bar`.
Everything is written in the frame rotating with the
battery Hamiltonian, where phases stay fixed; none of the
reported quantities depend on them.

A qubit relaxes as

    p_t = (p_0 - n_bar) e^{-gamma t} + n_bar,    C_t = C_0 e^{-gamma t / 2}

and a Gaussian mode keeps its Gaussian form while its
displacement shrinks as e^{-gamma t / 2} and its
covariance mixes with that of the bath.
"""

from dataclasses import dataclass
from typing import Callable, List, Literal, Optional, Sequence, Union

import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp

from ergokit import gaussian, tls
from ergokit.dataset import TimeSeries
from ergokit.exceptions import DomainError, NoBracket, NumericalError
from ergokit.gaussian import GaussianState, IsoFamilyGaussian, MomentForm
from ergokit.logging import logger
from ergokit.pool import map_ordered
from ergokit.states import DensityOperator, ErgotropyBreakdown
from ergokit.tls import IsoFamilyTls, TlsState

FRAME_TYPE = Literal["rotating", "lab"]
BATTERY_STATE = Union[TlsState, GaussianState]


@dataclass(frozen=True)
class BathSpec:
    """Markovian thermal reservoir

    Args:
        gamma:
            Relaxation rate
        n_bar:
            Mean occupation of the reservoir at the battery
            frequency. Fermionic, so at most 1, when the
            battery is a qubit.
    """

    gamma: float = 1.0
    n_bar: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError("gamma", self.gamma, "(0, inf)")
        if self.n_bar < 0:
            raise DomainError("n_bar", self.n_bar, "[0, inf)")

    def check_fermionic(self) -> None:
        if self.n_bar > 1:
            raise DomainError("n_bar", self.n_bar, "[0, 1]")

    @property
    def horizon(self) -> float:
        """Time after which no bracket search continues"""
        return 100 / self.gamma


@dataclass(frozen=True)
class DecayRecord:
    t: float
    state: BATTERY_STATE
    breakdown: ErgotropyBreakdown


def _survival(bath: BathSpec, t: float) -> float:
    if t < 0:
        raise DomainError("t", t, "[0, inf)")
    return float(np.exp(-bath.gamma * t))


def tls_decay(
    p0: float,
    C0: float,
    theta: float,
    bath: BathSpec,
    t: float,
    omega: float = 1.0,
) -> TlsState:
    bath.check_fermionic()
    initial = TlsState(p0, C0, theta, omega)

    decay = _survival(bath, t)
    p = (initial.p - bath.n_bar) * decay + bath.n_bar
    C = initial.C * np.sqrt(decay)
    return TlsState(p, C, theta, omega)


def _lindblad_generator(bath: BathSpec):
    damping = np.sqrt(bath.gamma * (1 - bath.n_bar)) * np.array(
        [[0, 1], [0, 0]], dtype=complex
    )
    pumping = np.sqrt(bath.gamma * bath.n_bar) * np.array(
        [[0, 0], [1, 0]], dtype=complex
    )
    jumps = [damping, pumping]

    def rhs(t, y):
        rho = y.reshape(2, 2)
        out = np.zeros_like(rho)
        for L in jumps:
            LdL = L.conj().T @ L
            out += L @ rho @ L.conj().T - (LdL @ rho + rho @ LdL) / 2
        return out.ravel()

    return rhs


def tls_decay_numeric(
    state: TlsState,
    bath: BathSpec,
    times: Sequence[float],
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> List[TlsState]:
    """Integrate the qubit master equation directly"""

    bath.check_fermionic()
    times = np.asarray(times, dtype=float)
    solution = solve_ivp(
        _lindblad_generator(bath),
        t_span=(0.0, times[-1]),
        y0=state.matrix.astype(complex).ravel(),
        t_eval=times,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise NumericalError(f"Master equation failed: {solution.message}")

    states = []
    for y in solution.y.T:
        rho = DensityOperator.from_matrix(y.reshape(2, 2))
        states.append(TlsState.from_density(rho, state.omega))
    return states


def tls_tau_half_inc(p0: float, bath: BathSpec) -> float:
    """Time at which the population reaches 1/2"""

    if not p0 > 0.5 > bath.n_bar:
        raise DomainError(
            "p0, n_bar", (p0, bath.n_bar), "p0 > 1/2 > n_bar"
        )
    return float(np.log((p0 - bath.n_bar) / (0.5 - bath.n_bar)) / bath.gamma)


def gaussian_decay(
    mu0: complex,
    xi0: float,
    phi: float,
    N0: float,
    bath: BathSpec,
    t: float,
    omega: float = 1.0,
) -> GaussianState:
    """Parameters of a decaying Gaussian state in closed form"""

    initial = GaussianState(mu0, xi0, phi, N0, omega)
    decay = _survival(bath, t)

    delta = (initial.N - bath.n_bar) * decay + bath.n_bar + 0.5
    mixing = (
        (2 * initial.N + 1)
        * (2 * bath.n_bar + 1)
        * decay
        * (1 - decay)
        * np.sinh(xi0) ** 2
    )
    root = np.sqrt(delta**2 + mixing)

    # sinh(2 xi_t) = |Theta_01| / sqrt(det Theta)
    shear = decay * (initial.N + 0.5) * np.sinh(2 * xi0) / root
    return GaussianState(
        mu=initial.mu * np.sqrt(decay),
        xi_mag=0.5 * float(np.arcsinh(shear)),
        phi=phi,
        N=root - 0.5,
        omega=omega,
    )


def gaussian_moment_flow(
    state: GaussianState,
    bath: BathSpec,
    t: float,
    frame: FRAME_TYPE = "rotating",
) -> GaussianState:
    """Decay by propagating the moments of the master equation"""

    decay = _survival(bath, t)
    m = gaussian.to_moments(state)
    d, Theta = m.d * np.sqrt(decay), m.Theta.copy()

    if frame == "lab":
        rotation = np.exp(-1j * state.omega * t)
        d = d * np.array([rotation, np.conj(rotation)])
        Theta[0, 1] *= rotation**2
        Theta[1, 0] *= np.conj(rotation) ** 2
    elif frame != "rotating":
        raise DomainError("frame", frame, "{rotating, lab}")

    Theta = decay * Theta + (1 - decay) * (bath.n_bar + 0.5) * np.eye(2)
    return gaussian.from_moments(MomentForm(d, Theta), state.omega)


def decay_record(
    state: BATTERY_STATE, bath: BathSpec, t: float
) -> DecayRecord:
    if isinstance(state, TlsState):
        decayed = tls_decay(
            state.p, state.C, state.theta, bath, t, state.omega
        )
        breakdown = tls.ergotropy_split(decayed)
    else:
        decayed = gaussian_decay(
            state.mu, state.xi_mag, state.phi, state.N, bath, t, state.omega
        )
        breakdown = gaussian.ergotropy_split(decayed)
    return DecayRecord(t, decayed, breakdown)


def tls_ergotropy_trajectory(
    state: TlsState, bath: BathSpec
) -> Callable[[float], float]:
    def trajectory(t: float) -> float:
        return decay_record(state, bath, t).breakdown.total

    return trajectory


def gaussian_ergotropy_trajectory(
    state: GaussianState, bath: BathSpec
) -> Callable[[float], float]:
    def trajectory(t: float) -> float:
        return decay_record(state, bath, t).breakdown.total

    return trajectory


def half_life(
    trajectory: Callable[[float], float],
    bracket_hint: float = 1.0,
    t_max: Optional[float] = None,
) -> float:
    """First time at which the ergotropy has halved

    The upper end of the bracket starts at `bracket_hint`
    and doubles until the ergotropy drops below half of
    its initial value, giving up past `t_max`. `t_max`
    defaults to 100 times `bracket_hint`, which is
    expected to be the decay time scale `1 / gamma`.
    """

    if t_max is None:
        t_max = 100 * bracket_hint

    R0 = trajectory(0.0)
    if not R0 > 0:
        raise DomainError("R(0)", R0, "(0, inf)")

    def excess(t: float) -> float:
        return trajectory(t) - R0 / 2

    low, high = 0.0, min(bracket_hint, t_max)
    while excess(high) > 0:
        if high >= t_max:
            raise NoBracket(t_max)
        low, high = high, min(2 * high, t_max)
        logger.debug(f"Expanding half-life bracket to [{low:.3g}, {high:.3g}]")

    return optimize.bisect(
        excess, low, high, xtol=1e-13 * max(1.0, high), maxiter=60
    )


COMPONENT_COLUMNS = {
    "incoherent": "R_inc",
    "coherent": "R_coh",
    "displacement": "R_d",
    "squeezing": "R_s",
}


def _flatten(record: DecayRecord) -> dict:
    state = record.state
    if isinstance(state, TlsState):
        row = {"p": state.p, "C": state.C}
    else:
        row = {"mu_abs": abs(state.mu), "xi": state.xi_mag, "N": state.N}

    row["R"] = record.breakdown.total
    for name, value in record.breakdown.components.items():
        row[COMPONENT_COLUMNS[name]] = value
    return row


def decay_series(
    state: BATTERY_STATE, bath: BathSpec, times: Sequence[float]
) -> TimeSeries:
    records = [_flatten(decay_record(state, bath, t)) for t in times]
    return TimeSeries.from_records(times, records)


@dataclass(frozen=True, eq=False)
class DecaySweep:
    """Decay trajectories and half-lives over a family

    Args:
        grid:
            Internal coordinate of each family member, the
            population for qubits and the squeezing
            magnitude for Gaussian states
        trajectories:
            Ergotropy time series of each member
        half_lives:
            Half-life of each member, indexed by `grid`
    """

    grid: np.ndarray
    trajectories: List[TimeSeries]
    half_lives: TimeSeries


def _sweep_point(args) -> dict:
    state, bath, times = args
    series = decay_series(state, bath, times)
    if isinstance(state, TlsState):
        trajectory = tls_ergotropy_trajectory(state, bath)
    else:
        trajectory = gaussian_ergotropy_trajectory(state, bath)

    t_half = half_life(trajectory, 1 / bath.gamma, bath.horizon)
    return {"series": series, "T_half": t_half, "R0": trajectory(0.0)}


def decay_sweep(
    family: Union[IsoFamilyTls, IsoFamilyGaussian],
    bath: BathSpec,
    grid: Sequence[float],
    times: Sequence[float],
    N: float = 0.5,
    jobs: Optional[int] = None,
) -> DecaySweep:
    """Decay every family member picked out by `grid`

    Qubit families are swept over the excited population,
    Gaussian families over the squeezing magnitude at the
    fixed thermal occupation `N`.
    """

    grid = np.asarray(grid, dtype=float)
    if isinstance(family, IsoFamilyTls):
        states = [tls.family_member(family, p) for p in grid]
    else:
        states = [gaussian.family_member(family, xi, N) for xi in grid]

    logger.info(
        "Sweeping decay of {} family members over {} times".format(
            len(states), len(times)
        )
    )
    items = [(state, bath, np.asarray(times)) for state in states]
    results = map_ordered(_sweep_point, items, jobs)

    half_lives = TimeSeries(
        grid,
        {
            "T_half": np.array([r["T_half"] for r in results]),
            "R0": np.array([r["R0"] for r in results]),
        },
        time_name="p" if isinstance(family, IsoFamilyTls) else "xi",
    )
    trajectories = [r["series"] for r in results]
    return DecaySweep(grid, trajectories, half_lives)
