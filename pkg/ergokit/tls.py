"""Two-level batteries

A two-level battery with splitting `omega` is described
in the (g, e) basis by

    rho = [[1 - p, C e^{i theta / 2} / 2],
           [C e^{-i theta / 2} / 2, p]]

so states repeat with period 4 pi in `theta`, and a
shift by 2 pi flips the sign of the coherence.

Its ergotropy splits into an incoherent part, coming from
population inversion, and a coherent part which only
depends on the l1 coherence C. Fixing the total charge
to that of an incoherent reference with population
`p_bar` gives a one-parameter family of states
trading inversion for coherence.
"""

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy.special import entr

from ergokit.dataset import TimeSeries
from ergokit.exceptions import (
    DomainError,
    OutOfFamilyRange,
    SingularReference,
    ValidationError,
)
from ergokit.states import (
    DensityOperator,
    ErgotropyBreakdown,
    HamiltonianSpec,
    apply_kraus,
    apply_unitary,
    partial_trace,
    psd_sqrt,
    spectral_decompose,
    swap_operator,
    tensor,
    trace_distance,
    von_neumann_entropy,
)

FAMILY_TOL = 1e-12
KRAUS_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _check_population(p: float, name: str = "p") -> float:
    if not -FAMILY_TOL <= p <= 1 + FAMILY_TOL:
        raise DomainError(name, p, "[0, 1]")
    return min(max(float(p), 0.0), 1.0)


def _check_coherence(p: float, C: float) -> float:
    if C < 0:
        raise DomainError("C", C, "[0, inf)")
    bound = 4 * p * (1 - p)
    if C**2 > bound + FAMILY_TOL:
        raise DomainError("C", C, "[0, {:.15g}]".format(np.sqrt(bound)))
    return float(C)


@dataclass(frozen=True)
class TlsState:
    """Qubit state in the population/coherence/phase parametrization

    Args:
        p:
            Excited-state population
        C:
            l1 norm of coherence in the energy basis
        theta:
            Coherence phase. States repeat with period 4 pi
            in `theta`, and no range is enforced.
        omega:
            Level splitting of the battery Hamiltonian
    """

    p: float
    C: float = 0.0
    theta: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        p = _check_population(self.p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "C", _check_coherence(p, self.C))

    @classmethod
    def from_density(
        cls, rho: DensityOperator, omega: float = 1.0
    ) -> "TlsState":
        if rho.dim != 2:
            raise DomainError("dim", rho.dim, "{2}")
        coherence = rho.matrix[0, 1]
        C = 2 * abs(coherence)
        theta = 2 * np.angle(coherence) if C > 0 else 0.0

        # round-off can push a pure state a hair outside the ball
        p = min(max(rho.matrix[1, 1].real, 0.0), 1.0)
        C = min(C, np.sqrt(4 * p * (1 - p)))
        return cls(p, C, theta, omega)

    @classmethod
    def from_bloch(
        cls, s: Sequence[float], omega: float = 1.0
    ) -> "TlsState":
        """Build from a Bloch vector whose north pole is |g>"""
        sx, sy, sz = s
        rho = (np.eye(2) + sx * SIGMA_X + sy * SIGMA_Y + sz * SIGMA_Z) / 2
        return cls.from_density(DensityOperator.from_matrix(rho), omega)

    @property
    def matrix(self) -> np.ndarray:
        coherence = self.C * np.exp(0.5j * self.theta) / 2
        return np.array(
            [[1 - self.p, coherence], [np.conj(coherence), self.p]]
        )

    @property
    def density(self) -> DensityOperator:
        return DensityOperator.from_matrix(self.matrix)

    @property
    def hamiltonian(self) -> HamiltonianSpec:
        return HamiltonianSpec.qubit(self.omega)

    def bloch_vector(self) -> np.ndarray:
        half = self.theta / 2
        return np.array(
            [self.C * np.cos(half), -self.C * np.sin(half), 1 - 2 * self.p]
        )


def inc_ergotropy(p: float, omega: float = 1.0) -> float:
    p = _check_population(p)
    if p > 0.5:
        return omega * (2 * p - 1)
    return 0.0


def coh_ergotropy(p: float, C: float, omega: float = 1.0) -> float:
    p = _check_population(p)
    C = _check_coherence(p, C)

    # psi - sqrt(psi^2 - C^2) rewritten to avoid cancellation at small C
    inversion = abs(2 * p - 1)
    denominator = np.hypot(inversion, C) + inversion
    if denominator == 0:
        return 0.0
    return omega * C**2 / (2 * denominator)


def ergotropy_split(state: TlsState) -> ErgotropyBreakdown:
    return ErgotropyBreakdown.from_components(
        incoherent=inc_ergotropy(state.p, state.omega),
        coherent=coh_ergotropy(state.p, state.C, state.omega),
    )


@dataclass(frozen=True)
class IsoFamilyTls:
    """States sharing the charge of the incoherent reference `p_bar`

    Args:
        p_bar:
            Excited population of the incoherent reference
        omega:
            Level splitting shared by every member
    """

    p_bar: float
    omega: float = 1.0

    def __post_init__(self):
        if not 0.5 < self.p_bar <= 1:
            raise DomainError("p_bar", self.p_bar, "(1/2, 1]")

    @property
    def P(self) -> float:
        """Population of the pure member, 2 p_bar - 1"""
        return 2 * self.p_bar - 1

    @property
    def charge(self) -> float:
        return self.omega * self.P

    def contains(self, p: float) -> bool:
        return self.P - FAMILY_TOL <= p <= self.p_bar + FAMILY_TOL

    def clip(self, p: float, name: str = "p") -> float:
        if not self.contains(p):
            raise OutOfFamilyRange(name, p, self.P, self.p_bar)
        return min(max(float(p), self.P), self.p_bar)

    def grid(self, points: int) -> np.ndarray:
        if points < 2:
            raise DomainError("points", points, "[2, inf)")
        return np.linspace(self.P, self.p_bar, points)


def iso_coherence(family: IsoFamilyTls, p: float) -> float:
    p = family.clip(p)
    return float(np.sqrt(max(8 * (family.p_bar - p) * family.P, 0.0)))


def family_member(
    family: IsoFamilyTls, p: float, theta: float = 0.0
) -> TlsState:
    p = family.clip(p)
    return TlsState(p, iso_coherence(family, p), theta, family.omega)


def pure_member(family: IsoFamilyTls, theta: float = 0.0) -> TlsState:
    return family_member(family, family.P, theta)


def reference(family: IsoFamilyTls) -> TlsState:
    return family_member(family, family.p_bar)


def internal_energy(state: TlsState) -> float:
    return state.omega * state.p


def heat(p: float, p_prime: float, omega: float = 1.0) -> float:
    """Heat absorbed by the battery going from p to p_prime"""
    return omega * (p_prime - p)


def binary_entropy(x: float) -> float:
    return float(entr(x) + entr(1 - x))


def entropy_on_family(family: IsoFamilyTls, p: float) -> float:
    # the larger eigenvalue of a family member is 2 p_bar - p
    p = family.clip(p)
    return binary_entropy(2 * family.p_bar - p)


def charge_energy_ratio(family: IsoFamilyTls, p: float) -> float:
    p = family.clip(p)
    return family.P / p


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: Tuple[np.ndarray, ...]

    def __post_init__(self):
        operators = tuple(np.asarray(K, dtype=complex) for K in self.operators)
        object.__setattr__(self, "operators", operators)
        error = self.completeness_error()
        if error > KRAUS_TOL:
            raise ValidationError(
                f"Kraus operators are incomplete by {error:.3e}"
            )

    def completeness_error(self) -> float:
        total = sum(K.conj().T @ K for K in self.operators)
        return float(np.abs(total - np.eye(len(total))).max())

    def apply(self, rho: DensityOperator) -> DensityOperator:
        return apply_kraus(self.operators, rho)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.operators)

    def __len__(self) -> int:
        return len(self.operators)


def gadc_kraus(
    family: IsoFamilyTls, p_prime: float, theta_prime: float = 0.0
) -> KrausSet:
    """Channel replacing any qubit state by a family member

    The four rank-one operators move population between
    the eigenvectors of the target so that the output is
    always the target itself, which makes the channel
    an iso-ergotropic map of the whole family.
    """

    target = family_member(family, p_prime, theta_prime)
    vectors = spectral_decompose(target.matrix, "descending").eigenvectors
    psi_e, psi_g = vectors[:, 0], vectors[:, 1]

    p_e = 2 * family.p_bar - target.p
    operators = [
        np.sqrt(p_e) * np.outer(psi_e, psi_e.conj()),
        np.sqrt(p_e) * np.outer(psi_e, psi_g.conj()),
        np.sqrt(1 - p_e) * np.outer(psi_g, psi_g.conj()),
        np.sqrt(1 - p_e) * np.outer(psi_g, psi_e.conj()),
    ]
    return KrausSet(tuple(operators))


def swap_realization(state: TlsState, aux_target: TlsState) -> TlsState:
    """Swap the battery with an auxiliary qubit and discard the auxiliary"""

    joint = tensor(state.matrix, aux_target.matrix)
    joint = DensityOperator.from_matrix(joint)
    swapped = apply_unitary(swap_operator(2), joint)
    battery = partial_trace(swapped, (2, 2), keep="first")
    return TlsState.from_density(battery, aux_target.omega)


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    operator: np.ndarray
    success_probability: float
    post_state: TlsState

    def max_effect_eigenvalue(self) -> float:
        effect = self.operator.conj().T @ self.operator
        return float(np.linalg.eigvalsh(effect).max())


def _measure(
    operator: np.ndarray, family: IsoFamilyTls
) -> MeasurementOutcome:
    rho = reference(family).matrix
    unnormalized = operator @ rho @ operator.conj().T
    probability = float(np.trace(unnormalized).real)
    post = DensityOperator.from_matrix(unnormalized / probability)
    return MeasurementOutcome(
        operator, probability, TlsState.from_density(post, family.omega)
    )


def rank_one_measurement(
    family: IsoFamilyTls, p: Optional[float] = None, theta: float = 0.0
) -> MeasurementOutcome:
    """Selective measurement preparing the pure family member

    Acts on the incoherent reference state. A rank-one
    element can only produce a pure output, so `p` must be
    the pure endpoint 2 p_bar - 1 (its default).
    """

    p = family.P if p is None else family.clip(p)
    if abs(p - family.P) > FAMILY_TOL:
        raise DomainError("p", p, f"{{{family.P}}}, the pure family member")

    target = family_member(family, p, theta)
    vectors = spectral_decompose(target.matrix, "descending").eigenvectors
    excited = np.array([0, 1], dtype=complex)
    operator = np.outer(vectors[:, 0], excited)
    return _measure(operator, family)


def general_measurement_qmax(
    family: IsoFamilyTls, p_prime: float, theta_prime: float = 0.0
) -> MeasurementOutcome:
    """Highest-probability measurement mapping the reference to any member

    The operator is sqrt(q) sqrt(target) rho_ref^{-1/2}, with q
    the largest value keeping M^H M below the identity.
    """

    if family.p_bar >= 1 - FAMILY_TOL:
        raise SingularReference(family.p_bar)

    target = family_member(family, p_prime, theta_prime)
    p_bar, p = family.p_bar, target.p
    T = (1 - p) / (1 - p_bar) + p / p_bar
    D = ((1 - p) * p - (target.C / 2) ** 2) / ((1 - p_bar) * p_bar)
    q = 2 / (T + np.sqrt(max(T**2 - 4 * D, 0.0)))

    inverse_root = np.diag([1 / np.sqrt(1 - p_bar), 1 / np.sqrt(p_bar)])
    operator = np.sqrt(q) * psd_sqrt(target.matrix) @ inverse_root
    return _measure(operator, family)


def retry_success(q: float, attempts: int) -> float:
    """Probability of at least one success in `attempts` reset-retries"""
    if not 0 <= q <= 1:
        raise DomainError("q", q, "[0, 1]")
    if attempts < 0:
        raise DomainError("attempts", attempts, "[0, inf)")
    return 1 - (1 - q) ** attempts


def channel_path(
    family: IsoFamilyTls,
    p_start: float,
    p_end: float,
    theta_start: float = 0.0,
    theta_end: float = 0.0,
    steps: int = 50,
) -> TimeSeries:
    """Walk along the family by repeated replacement channels

    Each step targets the next point of a straight line in
    (p, theta), applies the Kraus channel to the current state
    and checks it against the swap realization of the same
    target. Heat is the energy absorbed in the step.
    """

    if steps < 1:
        raise DomainError("steps", steps, "[1, inf)")

    p_start, p_end = family.clip(p_start), family.clip(p_end)
    populations = np.linspace(p_start, p_end, steps + 1)
    phases = np.linspace(theta_start, theta_end, steps + 1)
    state = family_member(family, populations[0], phases[0])

    records = []
    for step, (p, theta) in enumerate(zip(populations, phases)):
        target = family_member(family, p, theta)
        kraus = gadc_kraus(family, p, theta)
        output = kraus.apply(state.density)
        output = TlsState.from_density(output, family.omega)
        swapped = swap_realization(state, target)

        if family.p_bar < 1:
            outcome = general_measurement_qmax(family, p, theta)
            q_max = outcome.success_probability
        else:
            q_max = 1.0

        split = ergotropy_split(output)
        sx, sy, sz = output.bloch_vector()
        records.append(
            {
                "p": output.p,
                "C": output.C,
                "theta": theta,
                "s_x": sx,
                "s_y": sy,
                "s_z": sz,
                "R": split.total,
                "R_inc": split["incoherent"],
                "R_coh": split["coherent"],
                "S_vN": von_neumann_entropy(output.density),
                "Q": heat(state.p, output.p, family.omega) if step else 0.0,
                "kraus_completeness": kraus.completeness_error(),
                "swap_distance": trace_distance(output.matrix, swapped.matrix),
                "q_max": q_max,
            }
        )
        state = output
    return TimeSeries.from_records(range(steps + 1), records, "step")
