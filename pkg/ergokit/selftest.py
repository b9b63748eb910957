"""Oracle equivalence checks runnable from an installed package

Every check compares a closed form against an independent
brute-force computation and reports the largest deviation.
Passing `perturb` shifts the closed form of the named check
by `PERTURBATION`, which must make that check fail.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from ergokit import (
    charging,
    gaussian,
    gaussian_dynamics,
    open_system,
    tls,
    tls_dynamics,
    xstate,
)
from ergokit.exceptions import ConfigError, SelftestFailure
from ergokit.logging import logger
from ergokit.states import (
    FockOracleConfig,
    HamiltonianSpec,
    ergotropy,
    trace_distance,
)

PERTURBATION = 1e-3
CHECK_FN = Callable[[float, np.random.Generator], float]


@dataclass(frozen=True)
class Check:
    name: str
    fn: CHECK_FN
    tolerance: float

    def __call__(self, offset: float, rng: np.random.Generator) -> float:
        return float(self.fn(offset, rng))


CHECKS: Dict[str, Check] = {}


def check(name: str, tolerance: float) -> Callable[[CHECK_FN], CHECK_FN]:
    def wrapper(fn: CHECK_FN) -> CHECK_FN:
        CHECKS[name] = Check(name, fn, tolerance)
        return fn

    return wrapper


def random_tls_state(rng: np.random.Generator) -> tls.TlsState:
    p = rng.uniform(0, 1)
    C = rng.uniform(0, 1) * np.sqrt(4 * p * (1 - p))
    return tls.TlsState(p, C, rng.uniform(0, 4 * np.pi))


@check("tls-split", 1e-10)
def _tls_split(offset, rng):
    H = HamiltonianSpec.qubit()
    deviation = 0.0
    for _ in range(1000):
        state = random_tls_state(rng)
        closed = tls.ergotropy_split(state).total + offset
        deviation = max(deviation, abs(closed - ergotropy(state.density, H)))
    return deviation


@check("gaussian-fock", 1e-4)
def _gaussian_fock(offset, rng):
    cfg = FockOracleConfig(truncation=80)
    deviation = 0.0
    for mu in (0, 1.0 + 0.5j):
        for xi in (0, 0.5):
            for N in (0, 0.5):
                state = gaussian.GaussianState(mu, xi, 0.3, N)
                rho = state.fock_density(cfg)
                H = HamiltonianSpec.harmonic(rho.dim)
                brute = ergotropy(rho, H)
                closed = gaussian.ergotropy_split(state).total + offset
                relative = abs(closed - brute) / max(brute, 1.0)
                deviation = max(deviation, relative)
    return deviation


@check("tls-decay", 1e-8)
def _tls_decay(offset, rng):
    bath = open_system.BathSpec(1.0, 0.2)
    state = tls.family_member(tls.IsoFamilyTls(0.8), 0.65, 0.3)
    times = np.linspace(0, 10, 41)

    numeric = open_system.tls_decay_numeric(state, bath, times)
    deviation = 0.0
    for t, other in zip(times, numeric):
        closed = open_system.tls_decay(
            state.p, state.C, state.theta, bath, t
        )
        deviation = max(
            deviation,
            abs(closed.p + offset - other.p),
            abs(closed.C - other.C),
        )
    return deviation


@check("gaussian-flow", 1e-8)
def _gaussian_flow(offset, rng):
    bath = open_system.BathSpec(1.0, 0.3)
    family = gaussian.IsoFamilyGaussian(5.0)
    state = gaussian.family_member(family, 0.8, 0.5, 0.4, 1.1)

    deviation = 0.0
    for t in np.linspace(0, 10, 41):
        closed = open_system.gaussian_decay(
            state.mu, state.xi_mag, state.phi, state.N, bath, t
        )
        flowed = open_system.gaussian_moment_flow(state, bath, t)
        deviation = max(
            deviation,
            abs(closed.N + offset - flowed.N),
            abs(closed.xi_mag - flowed.xi_mag),
            abs(closed.mu - flowed.mu),
        )
    return deviation


@check("tls-propagator", 1e-10)
def _tls_propagator(offset, rng):
    cfg = tls_dynamics.TwoTlsConfig(tls.IsoFamilyTls(0.8), eta=0.7)
    deviation = 0.0
    for t in np.linspace(0, 2 * np.pi / cfg.eta, 50):
        closed = tls_dynamics.propagator(cfg, t) + offset
        exact = tls_dynamics.propagator_expm(cfg, t)
        deviation = max(deviation, np.abs(closed - exact).max())
    return deviation


@check("beam-splitter", 1e-10)
def _beam_splitter(offset, rng):
    family = gaussian.IsoFamilyGaussian(5.0)
    cfg = gaussian_dynamics.TwoModeConfig(family, 1.0, 1.0, np.pi, 0.8, 0)
    deviation = 0.0
    for t in np.linspace(0, 2 * np.pi, 50):
        closed = gaussian_dynamics.propagator(cfg, t) + offset
        exact = gaussian_dynamics.propagator_expm(cfg, t)
        deviation = max(deviation, np.abs(closed - exact).max())
    return deviation


@check("family-invariance", 1e-12)
def _family_invariance(offset, rng):
    H = HamiltonianSpec.qubit()
    deviation = 0.0
    for p_bar in np.linspace(0.55, 1, 10):
        family = tls.IsoFamilyTls(p_bar)
        for p in family.grid(100):
            member = tls.family_member(family, p)
            R = ergotropy(member.density, H) + offset
            deviation = max(deviation, abs(R - family.charge))

    family = gaussian.IsoFamilyGaussian(5.0)
    for N in (0, 0.5, 1):
        boundary = gaussian.boundary_squeezing(family, N)
        for xi in np.linspace(0, boundary, 100):
            member = gaussian.family_member(family, xi, N)
            R = gaussian.ergotropy_split(member).total + offset
            deviation = max(deviation, abs(R - family.charge) / 5)
    return deviation


@check("x-state", 1e-12)
def _x_state(offset, rng):
    deviation = 0.0
    for q in np.linspace(0, 1, 101):
        state = xstate.XState(q)
        closed = xstate.x_ergotropy(q).total + offset
        brute = ergotropy(state.density, state.hamiltonian)
        mapped = xstate.iso_map(q)
        deviation = max(
            deviation,
            abs(closed - brute),
            trace_distance(mapped, state.partner().matrix),
        )
    return deviation


@check("charging-root", 1e-12)
def _charging_root(offset, rng):
    alpha = charging.solve_alpha_T() + offset
    if not 0.735 <= alpha / np.pi <= 0.745:
        return np.inf
    return abs(np.cos(alpha) + alpha * np.sin(alpha) - 1)


@dataclass
class SelftestReport:
    """Deviation of every check that ran, in order"""

    deviations: Dict[str, float] = field(default_factory=dict)

    def render(self) -> str:
        lines = []
        for name, deviation in self.deviations.items():
            tolerance = CHECKS[name].tolerance
            status = "PASS" if deviation <= tolerance else "FAIL"
            lines.append(
                "{:<20}{:>12.3e}{:>10.1e}  {}".format(
                    name, deviation, tolerance, status
                )
            )
        return "\n".join(lines) + "\n"

    @property
    def passed(self) -> bool:
        return all(
            d <= CHECKS[name].tolerance for name, d in self.deviations.items()
        )


def run_checks(
    names: Optional[Sequence[str]] = None,
    perturb: Optional[str] = None,
    seed: int = 0,
) -> SelftestReport:
    """Run checks in order, stopping at the first failure

    Raises:
        SelftestFailure:
            Naming the first check whose deviation
            exceeds its tolerance
    """

    selected = list(names or CHECKS)
    for name in selected + ([perturb] if perturb else []):
        if name not in CHECKS:
            raise ConfigError(
                "Unknown check '{}', choose from {}".format(
                    name, ", ".join(CHECKS)
                )
            )

    report = SelftestReport()
    for name in selected:
        check = CHECKS[name]
        offset = PERTURBATION if name == perturb else 0.0
        rng = np.random.default_rng(seed)

        deviation = check(offset, rng)
        report.deviations[name] = deviation
        logger.debug(
            "Check {} deviation {:.3e}, tolerance {:.1e}".format(
                name, deviation, check.tolerance
            )
        )
        if not deviation <= check.tolerance:
            raise SelftestFailure(name, deviation, check.tolerance)
    return report
