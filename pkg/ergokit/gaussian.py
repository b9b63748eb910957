"""Single-mode Gaussian batteries

A Gaussian state D(mu) S(xi) pi(N) S(xi)^H D(mu)^H of a mode
with Hamiltonian omega (a^H a + 1/2) is tracked either by its
parameters or by its moments in the complex (a, a^H) form

    d = (mu, mu*),    Theta = (N + 1/2) F(|xi|, phi)

with vacuum covariance I / 2. Ergotropy splits into a
displacement part omega |mu|^2 and a squeezing part
omega (N + 1/2) (cosh 2|xi| - 1).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from ergokit.exceptions import (
    DomainError,
    OutOfFamilyRange,
    UnphysicalCovariance,
    ValidationError,
)
from ergokit.states import (
    DensityOperator,
    ErgotropyBreakdown,
    FockOracleConfig,
    fock_gaussian_adaptive,
)

PHYSICAL_TOL = 1e-10
FAMILY_TOL = 1e-12


def squeezing_matrix(xi_mag: float, phi: float) -> np.ndarray:
    """F(|xi|, phi), the covariance shape of a squeezed thermal state"""

    c, s = np.cosh(2 * xi_mag), np.sinh(2 * xi_mag)
    return np.array(
        [[c, np.exp(1j * phi) * s], [np.exp(-1j * phi) * s, c]]
    )


def _symplectic(xi_mag: float, phi: float) -> np.ndarray:
    c, s = np.cosh(xi_mag), np.sinh(xi_mag)
    return np.array(
        [[c, np.exp(1j * phi) * s], [np.exp(-1j * phi) * s, c]]
    )


@dataclass(frozen=True)
class GaussianState:
    """Single-mode Gaussian state

    Args:
        mu:
            Complex displacement, whose phase is theta
        xi_mag:
            Squeezing magnitude |xi|
        phi:
            Squeezing phase
        N:
            Thermal occupation of the underlying passive state
        omega:
            Mode frequency
    """

    mu: complex = 0j
    xi_mag: float = 0.0
    phi: float = 0.0
    N: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if self.N < -PHYSICAL_TOL:
            raise DomainError("N", self.N, "[0, inf)")
        if self.xi_mag < 0:
            raise DomainError("xi_mag", self.xi_mag, "[0, inf)")
        object.__setattr__(self, "mu", complex(self.mu))
        object.__setattr__(self, "N", max(float(self.N), 0.0))

    @property
    def xi(self) -> complex:
        return self.xi_mag * np.exp(1j * self.phi)

    @property
    def theta(self) -> float:
        return float(np.angle(self.mu))

    def fock_density(
        self, cfg: Optional[FockOracleConfig] = None
    ) -> DensityOperator:
        """Brute-force density matrix in a truncated Fock basis"""
        return fock_gaussian_adaptive(self.mu, self.xi, self.N, cfg)


@dataclass(frozen=True, eq=False)
class MomentForm:
    """First and second moments in the (a, a^H) representation

    Args:
        d:
            Complex vector of first moments (<a>, <a^H>)
        Theta:
            Symmetrized covariance of (a, a^H)
    """

    d: np.ndarray
    Theta: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=complex)
        Theta = np.asarray(self.Theta, dtype=complex)
        if d.shape != (2,) or Theta.shape != (2, 2):
            raise ValidationError(
                "Single-mode moments need a 2-vector and a 2x2 matrix, "
                "got shapes {} and {}".format(d.shape, Theta.shape)
            )

        deviation = np.abs(Theta - Theta.conj().T).max()
        if deviation > PHYSICAL_TOL:
            raise ValidationError(
                f"Covariance is not Hermitian, deviation {deviation:.3e}"
            )
        det = np.linalg.det(Theta).real
        if det < 0.25 - PHYSICAL_TOL:
            raise UnphysicalCovariance(det)

        object.__setattr__(self, "d", d)
        object.__setattr__(self, "Theta", (Theta + Theta.conj().T) / 2)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.Theta).real)


def to_moments(s: GaussianState) -> MomentForm:
    d = np.array([s.mu, np.conj(s.mu)])
    Theta = (s.N + 0.5) * squeezing_matrix(s.xi_mag, s.phi)
    return MomentForm(d, Theta)


def from_moments(m: MomentForm, omega: float = 1.0) -> GaussianState:
    """Recover parameters from moments

    The determinant is factored as (a - |t|)(a + |t|) with
    a the geometric mean of the diagonal, which keeps full
    relative precision for strongly squeezed states.
    """

    t00, t11 = m.Theta[0, 0].real, m.Theta[1, 1].real
    t01 = m.Theta[0, 1]
    a = np.sqrt(t00 * t11)
    det = (a - abs(t01)) * (a + abs(t01))
    if det < 0.25 - PHYSICAL_TOL:
        raise UnphysicalCovariance(det)

    root = np.sqrt(det)
    xi_mag = 0.5 * np.arcsinh(abs(t01) / root)
    phi = float(np.angle(t01)) if xi_mag > 1e-15 else 0.0
    return GaussianState(
        mu=m.d[0], xi_mag=float(xi_mag), phi=phi, N=root - 0.5, omega=omega
    )


def displacement_ergotropy(s: GaussianState) -> float:
    return s.omega * abs(s.mu) ** 2


def squeezing_ergotropy(s: GaussianState) -> float:
    # cosh(2x) - 1 = 2 sinh^2(x) without the cancellation
    return s.omega * (s.N + 0.5) * 2 * np.sinh(s.xi_mag) ** 2


def ergotropy_split(s: GaussianState) -> ErgotropyBreakdown:
    return ErgotropyBreakdown.from_components(
        displacement=displacement_ergotropy(s),
        squeezing=squeezing_ergotropy(s),
    )


def internal_energy(s: GaussianState) -> float:
    return ergotropy_split(s).total + s.omega * (s.N + 0.5)


def renyi2(s: GaussianState) -> float:
    return float(np.log1p(2 * s.N))


def renyi2_change(s: GaussianState, s_prime: GaussianState) -> float:
    return renyi2(s_prime) - renyi2(s)


def heat(s: GaussianState, s_prime: GaussianState) -> float:
    """Heat absorbed going from `s` to `s_prime` at fixed Hamiltonian"""
    return s.omega * (s_prime.N - s.N)


def renyi2_moments(Xi: np.ndarray) -> float:
    """Renyi-2 entropy of an n-mode state from its covariance"""

    Xi = np.asarray(Xi)
    n = Xi.shape[0] // 2
    det = np.linalg.det(Xi).real
    return 0.5 * float(np.log(4**n * det))


@dataclass(frozen=True)
class IsoFamilyGaussian:
    """Gaussian states with the ergotropy of the coherent state |mu_bar>

    Args:
        mu_bar_sq:
            Squared displacement |mu_bar|^2 of the reference
        omega:
            Mode frequency
    """

    mu_bar_sq: float
    omega: float = 1.0

    def __post_init__(self):
        if self.mu_bar_sq < 0:
            raise DomainError("mu_bar_sq", self.mu_bar_sq, "[0, inf)")

    @property
    def charge(self) -> float:
        return self.omega * self.mu_bar_sq

    def contains(self, s: GaussianState, tol: float = 1e-10) -> bool:
        total = ergotropy_split(s).total
        return abs(total - self.charge) <= tol * max(1, self.charge)


def _check_occupation(N: float) -> float:
    if N < 0:
        raise DomainError("N", N, "[0, inf)")
    return N


def family_function(family: IsoFamilyGaussian, xi_mag: float, N: float):
    """Squared displacement left over once squeezing is paid for"""
    return family.mu_bar_sq - (N + 0.5) * 2 * np.sinh(xi_mag) ** 2


def boundary_squeezing(family: IsoFamilyGaussian, N: float) -> float:
    """Squeezing at which the whole charge is held by squeezing"""
    N = _check_occupation(N)
    return 0.5 * float(np.arccosh(1 + family.mu_bar_sq / (N + 0.5)))


def equal_split_squeezing(family: IsoFamilyGaussian, N: float) -> float:
    """Squeezing at which both ergotropy components are equal"""
    N = _check_occupation(N)
    return 0.5 * float(np.arccosh(1 + family.mu_bar_sq / (2 * N + 1)))


def iso_displacement(
    family: IsoFamilyGaussian, xi_mag: float, N: float
) -> float:
    N = _check_occupation(N)
    f = family_function(family, xi_mag, N)
    if f < -FAMILY_TOL * max(1, family.mu_bar_sq):
        raise OutOfFamilyRange(
            "xi_mag", xi_mag, 0, boundary_squeezing(family, N)
        )
    return float(np.sqrt(max(f, 0.0)))


def family_member(
    family: IsoFamilyGaussian,
    xi_mag: float,
    N: float,
    theta: float = 0.0,
    phi: float = 0.0,
) -> GaussianState:
    magnitude = iso_displacement(family, xi_mag, N)
    return GaussianState(
        mu=magnitude * np.exp(1j * theta),
        xi_mag=xi_mag,
        phi=phi,
        N=N,
        omega=family.omega,
    )


def charge_energy_ratio(family: IsoFamilyGaussian, N: float) -> float:
    return family.charge / (family.charge + family.omega * (N + 0.5))


def wigner_grid(
    s: GaussianState, re: np.ndarray, im: np.ndarray
) -> np.ndarray:
    """Wigner function on the grid re x im, indexed [im, re]"""

    Theta = to_moments(s).Theta
    inverse = np.linalg.inv(Theta)
    det = np.linalg.det(Theta).real

    alpha = np.add.outer(1j * np.asarray(im), np.asarray(re))
    delta = alpha - s.mu
    conj = np.conj(delta)
    quad = conj * (inverse[0, 0] * delta + inverse[0, 1] * conj)
    quad += delta * (inverse[1, 0] * delta + inverse[1, 1] * conj)
    return np.exp(-quad.real / 2) / (np.pi * np.sqrt(det))


def wigner(s: GaussianState, alpha: complex) -> float:
    alpha = complex(alpha)
    return float(wigner_grid(s, [alpha.real], [alpha.imag])[0, 0])


def _apply(
    s: GaussianState, d: np.ndarray, Theta: np.ndarray
) -> GaussianState:
    return from_moments(MomentForm(d, Theta), s.omega)


def attenuator_channel(
    s: GaussianState, transmissivity: float, N_env: float = 0.0
) -> GaussianState:
    """Thermal attenuator mixing the mode with an environment at N_env"""

    if not 0 <= transmissivity <= 1:
        raise DomainError("transmissivity", transmissivity, "[0, 1]")
    if N_env < 0:
        raise DomainError("N_env", N_env, "[0, inf)")

    m = to_moments(s)
    eta = transmissivity
    d = np.sqrt(eta) * m.d
    Theta = eta * m.Theta + (1 - eta) * (N_env + 0.5) * np.eye(2)
    return _apply(s, d, Theta)


def apply_squeezing(
    s: GaussianState, xi_mag: float, phi: float
) -> GaussianState:
    S = _symplectic(xi_mag, phi)
    m = to_moments(s)
    return _apply(s, S @ m.d, S @ m.Theta @ S.conj().T)


def apply_displacement(s: GaussianState, mu: complex) -> GaussianState:
    m = to_moments(s)
    return _apply(s, m.d + np.array([mu, np.conj(mu)]), m.Theta)


def _check_same_family(a: GaussianState, b: GaussianState) -> None:
    R_a, R_b = ergotropy_split(a).total, ergotropy_split(b).total
    if abs(R_a - R_b) > PHYSICAL_TOL * max(1, R_a):
        raise OutOfFamilyRange("R", R_b, R_a, R_a)


def iso_channel_three_step(
    s_in: GaussianState, target: GaussianState
) -> GaussianState:
    """Thermalize, squeeze and displace `s_in` onto `target`

    The attenuator at zero transmissivity replaces the input
    by a thermal state at the target occupation, after which
    squeezing and displacement rebuild the target's moments.
    """

    _check_same_family(s_in, target)
    state = attenuator_channel(s_in, 0.0, target.N)
    state = apply_squeezing(state, target.xi_mag, target.phi)
    return apply_displacement(state, target.mu)


def mode_swap_matrix() -> np.ndarray:
    """Exchange of two modes acting on (a_1, a_1^H, a_2, a_2^H)"""
    swap = np.zeros((4, 4))
    swap[0, 2] = swap[1, 3] = swap[2, 0] = swap[3, 1] = 1
    return swap


def mode_swap(s_in: GaussianState, aux: GaussianState) -> GaussianState:
    """Swap the battery with an auxiliary mode and discard the auxiliary"""

    m_in, m_aux = to_moments(s_in), to_moments(aux)
    D = np.concatenate([m_in.d, m_aux.d])
    Xi = linalg.block_diag(m_in.Theta, m_aux.Theta)

    P = mode_swap_matrix()
    D, Xi = P @ D, P @ Xi @ P.T
    return _apply(aux, D[:2], Xi[:2, :2])


@dataclass(frozen=True)
class GaussianMeasurement:
    """Rank-one selective measurement |output><projected|

    Args:
        projected:
            Pure state whose overlap with the input
            gives the success probability
        success_probability:
            Probability of the selected outcome
        output:
            Conditional state after the selected outcome
    """

    projected: GaussianState
    success_probability: float
    output: GaussianState


def selective_measurement(
    s: GaussianState, family: IsoFamilyGaussian, theta: float = 0.0
) -> GaussianMeasurement:
    """Optimal projection of `s` onto the coherent state of `family`

    The projected state is the input's principal eigenvector, i.e. the
    input with its thermal occupation removed, so the success
    probability is the vacuum weight 1 / (N + 1).
    """

    projected = GaussianState(s.mu, s.xi_mag, s.phi, 0.0, s.omega)
    output = GaussianState(
        mu=np.sqrt(family.mu_bar_sq) * np.exp(1j * theta),
        omega=family.omega,
    )
    return GaussianMeasurement(projected, 1 / (s.N + 1), output)
