"""Two resonant modes coupled by a beam splitter

Battery (B) and auxiliary (A) modes evolve under the
linear drift W acting on D = (mu_B, mu_B*, mu_A, mu_A*),

    dD/dt = W D,    Xi(t) = L(t) Xi(0) L(t)^H,    L = exp(W t)

Starting both modes on the same isoergotropic family with
equal squeezing and displacements a quarter turn apart
keeps each of them on it, while occupations and the
ergotropy components oscillate with period pi / eta.
"""

from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ergokit.dataset import TimeSeries
from ergokit.exceptions import DomainError, UnphysicalCovariance
from ergokit.gaussian import (
    GaussianState,
    IsoFamilyGaussian,
    MomentForm,
    ergotropy_split,
    family_member,
    from_moments,
    iso_displacement,
    renyi2,
    renyi2_moments,
    to_moments,
    wigner_grid,
)
from ergokit.states import matrix_exponential

PHYSICAL_TOL = 1e-10
MODES = {"B": slice(0, 2), "A": slice(2, 4)}
METHOD_TYPE = Literal["closed", "expm"]


@dataclass(frozen=True)
class TwoModeConfig:
    """Battery and auxiliary modes on a common family

    Args:
        family:
            Isoergotropic family shared by both modes
        eta:
            Beam-splitter coupling strength
        xi_mag:
            Squeezing magnitude of both modes
        phi:
            Squeezing phase of both modes
        N_B0:
            Initial thermal occupation of the battery
        N_A0:
            Initial thermal occupation of the auxiliary
        theta_B:
            Displacement phase of the battery. The
            auxiliary's displacement phase is theta_B + pi / 2.
    """

    family: IsoFamilyGaussian
    eta: float = 1.0
    xi_mag: float = 0.0
    phi: float = 0.0
    N_B0: float = 0.0
    N_A0: float = 0.0
    theta_B: float = 0.0

    def __post_init__(self):
        if not self.eta > 0:
            raise DomainError("eta", self.eta, "(0, inf)")

        for N in (self.N_B0, self.N_A0):
            iso_displacement(self.family, self.xi_mag, N)

    @property
    def omega(self) -> float:
        return self.family.omega

    @property
    def theta_A(self) -> float:
        return self.theta_B + np.pi / 2

    @property
    def battery(self) -> GaussianState:
        return family_member(
            self.family, self.xi_mag, self.N_B0, self.theta_B, self.phi
        )

    @property
    def auxiliary(self) -> GaussianState:
        return family_member(
            self.family, self.xi_mag, self.N_A0, self.theta_A, self.phi
        )


@dataclass(frozen=True, eq=False)
class JointMoments:
    """First and second moments of both modes

    Args:
        D:
            Complex vector (mu_B, mu_B*, mu_A, mu_A*)
        Xi:
            4x4 covariance of the same operators
    """

    D: np.ndarray
    Xi: np.ndarray

    def __post_init__(self):
        Xi = np.asarray(self.Xi, dtype=complex)
        deviation = np.abs(Xi - Xi.conj().T).max()
        if deviation > PHYSICAL_TOL:
            raise UnphysicalCovariance(np.linalg.det(Xi).real)
        Xi = (Xi + Xi.conj().T) / 2

        # <dx dx^H> >= 0 with x = (a_B, a_B^H, a_A, a_A^H)
        shifted = Xi + np.diag([0.5, -0.5, 0.5, -0.5])
        if np.linalg.eigvalsh(shifted).min() < -PHYSICAL_TOL:
            raise UnphysicalCovariance(np.linalg.det(Xi).real)

        object.__setattr__(self, "D", np.asarray(self.D, dtype=complex))
        object.__setattr__(self, "Xi", Xi)

    def mode(self, name: str) -> MomentForm:
        block = MODES[name]
        return MomentForm(self.D[block], self.Xi[block, block])


def drift_matrix(omega: float, eta: float) -> np.ndarray:
    w = 1j * omega
    return np.array(
        [
            [-w, 0, eta, 0],
            [0, w, 0, eta],
            [-eta, 0, -w, 0],
            [0, -eta, 0, w],
        ]
    )


def propagator(cfg: TwoModeConfig, t: float) -> np.ndarray:
    """Closed-form exp(W t): a rotation of the two modes times a phase"""

    c, s = np.cos(cfg.eta * t), np.sin(cfg.eta * t)
    rotation = np.array([[c, s], [-s, c]])

    L = np.zeros((4, 4), dtype=complex)
    for index, sign in ((0, -1), (1, 1)):
        pair = np.ix_([index, index + 2], [index, index + 2])
        L[pair] = np.exp(sign * 1j * cfg.omega * t) * rotation
    return L


def propagator_expm(cfg: TwoModeConfig, t: float) -> np.ndarray:
    return matrix_exponential(drift_matrix(cfg.omega, cfg.eta) * t)


def initial_moments(cfg: TwoModeConfig) -> JointMoments:
    battery, auxiliary = to_moments(cfg.battery), to_moments(cfg.auxiliary)
    D = np.concatenate([battery.d, auxiliary.d])
    Xi = linalg.block_diag(battery.Theta, auxiliary.Theta)
    return JointMoments(D, Xi)


def propagate(
    cfg: TwoModeConfig, t: float, method: METHOD_TYPE = "closed"
) -> JointMoments:
    if method == "closed":
        L = propagator(cfg, t)
    elif method == "expm":
        L = propagator_expm(cfg, t)
    else:
        raise DomainError("method", method, "{closed, expm}")

    m = initial_moments(cfg)
    return JointMoments(L @ m.D, L @ m.Xi @ L.conj().T)


def mode_state(
    moments: JointMoments, name: str, omega: float = 1.0
) -> GaussianState:
    return from_moments(moments.mode(name), omega)


def closed_form_displacements(
    cfg: TwoModeConfig, t: float
) -> Tuple[complex, complex]:
    mu_B, mu_A = cfg.battery.mu, cfg.auxiliary.mu
    phase = np.exp(-1j * cfg.omega * t)
    c, s = np.cos(cfg.eta * t), np.sin(cfg.eta * t)
    return phase * (mu_A * s + mu_B * c), phase * (mu_A * c - mu_B * s)


def closed_form_occupations(
    cfg: TwoModeConfig, t: float
) -> Tuple[float, float]:
    mean = (cfg.N_B0 + cfg.N_A0) / 2
    swing = (cfg.N_B0 - cfg.N_A0) / 2 * np.cos(2 * cfg.eta * t)
    return mean + swing, mean - swing


def default_grid(cfg: TwoModeConfig, points: int = 200) -> np.ndarray:
    if points < 2:
        raise DomainError("points", points, "[2, inf)")
    return np.linspace(0, np.pi / cfg.eta, points)


def mode_trajectory(
    cfg: TwoModeConfig,
    times: Optional[Sequence[float]] = None,
    method: METHOD_TYPE = "closed",
) -> TimeSeries:
    """Per-mode parameters, ergotropies and entropies in time

    Mutual information uses the Renyi-2 entropy of the
    joint covariance so that it stays a moment-level
    quantity.
    """

    times = default_grid(cfg) if times is None else np.asarray(times)
    records = []
    for t in times:
        moments = propagate(cfg, t, method)
        record = {}
        for name in MODES:
            s = mode_state(moments, name, cfg.omega)
            split = ergotropy_split(s)
            record.update(
                {
                    f"mu_{name}": s.mu,
                    f"xi_{name}": s.xi_mag,
                    f"phi_{name}": s.phi,
                    f"N_{name}": s.N,
                    f"R_{name}": split.total,
                    f"R_{name}_d": split["displacement"],
                    f"R_{name}_s": split["squeezing"],
                    f"S2_{name}": renyi2(s),
                }
            )
        record["I2"] = (
            record["S2_B"] + record["S2_A"] - renyi2_moments(moments.Xi)
        )
        records.append(record)
    return TimeSeries.from_records(times, records)


def wigner_frames(
    cfg: TwoModeConfig,
    times: Optional[Sequence[float]] = None,
    re: Optional[np.ndarray] = None,
    im: Optional[np.ndarray] = None,
) -> TimeSeries:
    """Wigner functions of both modes sampled on a phase-space grid

    Frames are flattened into long format, one row per
    (t, re, im) point, with the grid index running fastest
    along `re`.
    """

    if times is None:
        times = np.array([0, np.pi / 4, np.pi / 2]) / cfg.eta
    re = np.linspace(-5, 5, 41) if re is None else np.asarray(re)
    im = np.linspace(-5, 5, 41) if im is None else np.asarray(im)
    grid_re, grid_im = np.meshgrid(re, im)

    columns = {"re": [], "im": [], "W_B": [], "W_A": []}
    for t in times:
        moments = propagate(cfg, t)
        for name in MODES:
            s = mode_state(moments, name, cfg.omega)
            columns[f"W_{name}"].append(wigner_grid(s, re, im).ravel())
        columns["re"].append(grid_re.ravel())
        columns["im"].append(grid_im.ravel())

    columns = {k: np.concatenate(v) for k, v in columns.items()}
    frame_times = np.repeat(np.asarray(times, dtype=float), re.size * im.size)
    return TimeSeries(frame_times, columns)
