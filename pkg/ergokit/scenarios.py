"""Datasets reproducing each battery analysis

Every scenario is a plain function of annotated parameters
whose defaults regenerate the corresponding figure, builds
a `Dataset`, emits it to `output` (stdout when omitted) and
returns it. The same functions back the command line
subcommands and `ScenarioConfig.run`.
"""

import inspect
import json
import os
from dataclasses import dataclass, field
from typing import (
    Any,
    Callable,
    Dict,
    List,
    Literal,
    Optional,
    Union,
    get_args,
    get_origin,
    get_type_hints,
)

import numpy as np
import toml

from ergokit import charging as chg
from ergokit import gaussian, gaussian_dynamics, open_system, tls, xstate
from ergokit.dataset import Dataset, TimeSeries
from ergokit.exceptions import ConfigError, DomainError
from ergokit.logging import logger
from ergokit.states import energy, von_neumann_entropy
from ergokit.tls_dynamics import TwoTlsConfig, trajectory_metrics
from ergokit.types import BATTERY_TYPE, FORMAT_TYPE

TABLE_TYPE = Literal["trajectories", "half-lives"]
METHOD_TYPE = gaussian_dynamics.METHOD_TYPE


def _matches(value: Any, annotation: Any) -> bool:
    origin, args = get_origin(annotation), get_args(annotation)
    if origin is Union:
        return any(_matches(value, arg) for arg in args)
    elif origin is Literal:
        return value in args
    elif origin in (list, List):
        return isinstance(value, list) and all(
            _matches(v, args[0]) for v in value
        )
    elif annotation is type(None):
        return value is None
    elif annotation is bool:
        return isinstance(value, bool)
    elif annotation is int:
        return isinstance(value, int) and not isinstance(value, bool)
    elif annotation is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, annotation)


def _check_value(name: str, value: Any, annotation: Any) -> None:
    if not _matches(value, annotation):
        raise ConfigError(
            "Parameter {}={!r} doesn't match type {}".format(
                name, value, getattr(annotation, "__name__", annotation)
            )
        )


def _samples(start: float, stop: float, count: int, name: str = "points"):
    if count < 2:
        raise DomainError(name, count, "[2, inf)")
    return np.linspace(start, stop, count)


def _finish(
    series: TimeSeries,
    scenario: str,
    parameters: Dict[str, Any],
    output: Optional[str],
    format: FORMAT_TYPE,
    notes: Optional[Dict[str, Any]] = None,
) -> Dataset:
    dataset = series.to_dataset(scenario, parameters, notes)
    logger.info(
        "Generated {} dataset with {} rows and columns {}".format(
            scenario, len(dataset), ", ".join(dataset.columns)
        )
    )
    dataset.emit(output, format)
    return dataset


def _tls_family_series(
    family: tls.IsoFamilyTls, points: int, theta: float
) -> TimeSeries:
    records = []
    grid = family.grid(points)
    for p in grid:
        state = tls.family_member(family, p, theta)
        split = tls.ergotropy_split(state)
        sx, sy, sz = state.bloch_vector()
        if family.p_bar < 1:
            outcome = tls.general_measurement_qmax(family, p, theta)
            q_max = outcome.success_probability
        else:
            q_max = 1.0

        records.append(
            {
                "C": state.C,
                "s_x": sx,
                "s_y": sy,
                "s_z": sz,
                "R": split.total,
                "R_inc": split["incoherent"],
                "R_coh": split["coherent"],
                "U": tls.internal_energy(state),
                "Q": tls.heat(family.p_bar, p, family.omega),
                "S_vN": tls.entropy_on_family(family, p),
                "ratio": tls.charge_energy_ratio(family, p),
                "q_max": q_max,
            }
        )
    return TimeSeries.from_records(grid, records, "p")


def tls_family(
    p_bar: float = 0.8,
    points: int = 101,
    theta: float = 0.0,
    omega: float = 1.0,
    p_bars: Optional[List[float]] = None,
    output: Optional[str] = None,
    format: FORMAT_TYPE = "csv",
) -> Dataset:
    """Walk the isoergotropic family of a qubit battery

    Samples every member from the pure state to the
    incoherent reference, recording its ergotropy split,
    Bloch vector, energetics and the success probability
    of the best measurement preparing it.

    Args:
        p_bar:
            Excited population of the incoherent reference
        points:
            Number of family members to sample
        theta:
            Coherence phase shared by all members
        omega:
            Level splitting of the battery
        p_bars:
            Several reference populations to sample at once,
            overriding `p_bar`
        output:
            File to write the dataset to. Written to
            stdout if left blank
        format:
            Serialization of the dataset
    """

    parts, notes = [], {"P": [], "charge": [], "rank_one_success": []}
    for value in p_bars or [p_bar]:
        family = tls.IsoFamilyTls(value, omega)
        series = _tls_family_series(family, points, theta)
        parts.append(({"p_bar": value}, series))

        measurement = tls.rank_one_measurement(family, theta=theta)
        notes["P"].append(family.P)
        notes["charge"].append(family.charge)
        notes["rank_one_success"].append(measurement.success_probability)

    parameters = {
        "p_bar": p_bar,
        "points": points,
        "theta": theta,
        "omega": omega,
        "p_bars": p_bars,
    }
    series = TimeSeries.stack(parts)
    return _finish(series, "tls-family", parameters, output, format, notes)


def tls_channel(
    p_bar: float = 0.7,
    steps: int = 50,
    p_start: Optional[float] = None,
    p_end: Optional[float] = None,
    theta_start: float = 0.0,
    theta_end: float = 0.0,
    omega: float = 1.0,
    output: Optional[str] = None,
    format: FORMAT_TYPE = "csv",
) -> Dataset:
    """Move a qubit along its family with replacement channels

    Args:
        p_bar:
            Excited population of the incoherent reference
        steps:
            Number of channel applications
        p_start:
            Population to start from. Defaults to the
            incoherent reference
        p_end:
            Population to end at. Defaults to the pure member
        theta_start:
            Coherence phase to start from
        theta_end:
            Coherence phase to end at
        omega:
            Level splitting of the battery
        output:
            File to write the dataset to. Written to
            stdout if left blank
        format:
            Serialization of the dataset
    """

    family = tls.IsoFamilyTls(p_bar, omega)
    p_start = family.p_bar if p_start is None else p_start
    p_end = family.P if p_end is None else p_end

    series = tls.channel_path(
        family, p_start, p_end, theta_start, theta_end, steps
    )
    parameters = {
        "p_bar": p_bar,
        "steps": steps,
        "p_start": p_start,
        "p_end": p_end,
        "theta_start": theta_start,
        "theta_end": theta_end,
        "omega": omega,
    }
    notes = {"total_heat": float(series["Q"].sum())}
    return _finish(series, "tls-channel", parameters, output, format, notes)


def tls_dynamics(
    p_bar: float = 0.8,
    eta: float = 1.0,
    points: int = 200,
    periods: float = 2.0,
    theta_b: float = 0.0,
    phi_a: float = 0.0,
    omega: float = 1.0,
    output: Optional[str] = None,
    format: FORMAT_TYPE = "csv",
) -> Dataset:
    """Exchange of excitations between a battery and an auxiliary qubit

    Args:
        p_bar:
            Excited population of the family shared by both
            qubits. The battery starts pure, the auxiliary
            at the incoherent reference
        eta:
            Coupling strength
        points:
            Number of time samples
        periods:
            Length of the trajectory in units of pi / eta
        theta_b:
            Initial coherence phase of the battery
        phi_a:
            Initial coherence phase of the auxiliary
        omega:
            Level splitting of both qubits
        output:
            File to write the dataset to. Written to
            stdout if left blank
        format:
            Serialization of the dataset
    """

    cfg = TwoTlsConfig(tls.IsoFamilyTls(p_bar, omega), eta, theta_b, phi_a)
    times = _samples(0, periods * cfg.period, points)
    series = trajectory_metrics(cfg, times)

    parameters = {
        "p_bar": p_bar,
        "eta": eta,
        "points": points,
        "periods": periods,
        "theta_b": theta_b,
        "phi_a": phi_a,
        "omega": omega,
    }
    notes = {"period": cfg.period, "charge": cfg.family.charge}
    return _finish(series, "tls-dynamics", parameters, output, format, notes)


def x_state(
    points: int = 101,
    omega: float = 1.0,
    output: Optional[str] = None,
    format: FORMAT_TYPE = "csv",
) -> Dataset:
    """Global and local charge of the two-cell X-state family

    Args:
        points:
            Number of samples of q on [0, 1]
        omega:
            Level splitting of both cells
        output:
            File to write the dataset to. Written to
            stdout if left blank
        format:
            Serialization of the dataset
    """

    grid = _samples(0, 1, points)
    records = []
    for q in grid:
        state = xstate.XState(q, omega)
        split = xstate.x_ergotropy(q, omega)
        report = xstate.local_report(q, omega)
        records.append(
            {
                "R": split.total,
                "R_inc": split["incoherent"],
                "R_coh": split["coherent"],
                "R_1": report.R_1,
                "R_2": report.R_2,
                "p_1": report.p_1,
                "p_2": report.p_2,
                "deficit": report.deficit,
                "concurrence": xstate.concurrence(q),
                "U": energy(state.density, state.hamiltonian),
                "S_vN": von_neumann_entropy(state.density),
            }
        )

    series = TimeSeries.from_records(grid, records, "q")
    notes = {"sudden_death_q": xstate.sudden_death_point()}
    parameters = {"points": points, "omega": omega}
    return _finish(series, "x-state", parameters, output, format, notes)


def _gaussian_family_series(
    family: gaussian.IsoFamilyGaussian,
    occupation: float,
    points: int,
    theta: float,
    phi: float,
) -> TimeSeries:
    boundary = gaussian.boundary_squeezing(family, occupation)
    grid = _samples(0, boundary, points)
    records = []
    for xi in grid:
        state = gaussian.family_member(family, xi, occupation, theta, phi)
        split = gaussian.ergotropy_split(state)
        records.append(
            {
                "mu_abs": abs(state.mu),
                "R": split.total,
                "R_d": split["displacement"],
                "R_s": split["squeezing"],
                "U": gaussian.internal_energy(state),
            }
        )
    return TimeSeries.from_records(grid, records, "xi")


def gaussian_family(
    mu_bar_sq: float = 5.0,
    occupation: float = 0.5,
    points: int = 101,
    theta: float = 0.0,
    phi: float = 0.0,
    omega: float = 1.0,
    occupations: Optional[List[float]] = None,
    output: Optional[str] = None,
    format: FORMAT_TYPE = "csv",
) -> Dataset:
    """Trade displacement for squeezing at fixed Gaussian charge

    Args:
        mu_bar_sq:
            Squared displacement of the coherent reference
        occupation:
            Thermal occupation shared by the members
        points:
            Number of squeezing magnitudes sampled up to
            the family boundary
        theta:
            Displacement phase
        phi:
            Squeezing phase
        omega:
            Mode frequency
        occupations:
            Several occupations to sample at once,
            overriding `occupation`
        output:
            File to write the dataset to. Written to
            stdout if left blank
        format:
            Serialization of the dataset
    """

    family = gaussian.IsoFamilyGaussian(mu_bar_sq, omega)
    reference = gaussian.GaussianState(np.sqrt(mu_bar_sq), omega=omega)

    parts = []
    notes = {key: [] for key in ("boundary_xi", "equal_split_xi", "ratio")}
    notes.update({"success_probability": [], "heat": [], "renyi2": []})
    for N in occupations or [occupation]:
        series = _gaussian_family_series(family, N, points, theta, phi)
        parts.append(({"N": N}, series))

        member = gaussian.family_member(family, 0.0, N, theta, phi)
        measurement = gaussian.selective_measurement(member, family, theta)
        notes["boundary_xi"].append(gaussian.boundary_squeezing(family, N))
        notes["equal_split_xi"].append(
            gaussian.equal_split_squeezing(family, N)
        )
        notes["ratio"].append(gaussian.charge_energy_ratio(family, N))
        notes["success_probability"].append(measurement.success_probability)
        notes["heat"].append(gaussian.heat(reference, member))
        notes["renyi2"].append(gaussian.renyi2(member))

    parameters = {
        "mu_bar_sq": mu_bar_sq,
        "occupation": occupation,
        "points": points,
        "theta": theta,
        "phi": phi,
        "omega": omega,
        "occupations": occupations,
    }
    series = TimeSeries.stack(parts)
    return _finish(
        series, "gaussian-family", parameters, output, format, notes
    )


def gaussian_dynamics_scenario(
    mu_bar_sq: float = 5.0,
    n_b0: float = 0.8,
    n_a0: float = 0.0,
    xi: float = 1.0,
    phi: float = np.pi,
    eta: float = 1.0,
    theta_b: float = 0.0,
    omega: float = 1.0,
    points: int = 200,
    periods: float = 1.0,
    method: METHOD_TYPE = "closed",
    frames: bool = False,
    extent: float = 5.0,
    resolution: int = 41,
    output: Optional[str] = None,
    format: FORMAT_TYPE = "csv",
) -> Dataset:
    """Two Gaussian modes on a common family under a beam splitter

    Args:
        mu_bar_sq:
            Squared displacement of the family reference
        n_b0:
            Initial thermal occupation of the battery
        n_a0:
            Initial thermal occupation of the auxiliary
        xi:
            Squeezing magnitude of both modes
        phi:
            Squeezing phase of both modes
        eta:
            Beam-splitter coupling
        theta_b:
            Displacement phase of the battery
        omega:
            Frequency of both modes
        points:
            Number of time samples
        periods:
            Length of the trajectory in units of pi / eta
        method:
            Propagate with the closed form or with the
            matrix exponential of the drift
        frames:
            Emit Wigner functions of both modes at eta t in
            {0, pi/4, pi/2} instead of the trajectory
        extent:
            Half-width of the square phase-space grid
            used for the Wigner frames
        resolution:
            Points per side of the Wigner grid
        output:
            File to write the dataset to. Written to
            stdout if left blank
        format:
            Serialization of the dataset
    """

    family = gaussian.IsoFamilyGaussian(mu_bar_sq, omega)
    cfg = gaussian_dynamics.TwoModeConfig(
        family, eta, xi, phi, n_b0, n_a0, theta_b
    )

    if frames:
        axis = _samples(-extent, extent, resolution, "resolution")
        series = gaussian_dynamics.wigner_frames(cfg, re=axis, im=axis)
    else:
        times = _samples(0, periods * np.pi / eta, points)
        series = gaussian_dynamics.mode_trajectory(cfg, times, method)

    parameters = {
        "mu_bar_sq": mu_bar_sq,
        "n_b0": n_b0,
        "n_a0": n_a0,
        "xi": xi,
        "phi": phi,
        "eta": eta,
        "theta_b": theta_b,
        "omega": omega,
        "points": points,
        "periods": periods,
        "method": method,
        "frames": frames,
        "extent": extent,
        "resolution": resolution,
    }
    notes = {"theta_a": cfg.theta_A, "charge": family.charge}
    return _finish(
        series, "gaussian-dynamics", parameters, output, format, notes
    )


def _decay_families(
    battery: BATTERY_TYPE,
    p_bar: float,
    p_bars: Optional[List[float]],
    occupation: float,
    occupations: Optional[List[float]],
):
    if battery == "tls":
        return [({"p_bar": value}, value) for value in p_bars or [p_bar]]
    elif battery == "gaussian":
        values = occupations or [occupation]
        return [({"N0": value}, value) for value in values]
    raise ConfigError(f"Unknown battery '{battery}'")


def decay(
    battery: BATTERY_TYPE = "tls",
    p_bar: float = 0.8,
    mu_bar_sq: float = 5.0,
    occupation: float = 0.5,
    n_bar: Optional[float] = None,
    gamma: float = 1.0,
    grid: int = 200,
    horizon: float = 5.0,
    points: Optional[int] = None,
    p_bars: Optional[List[float]] = None,
    occupations: Optional[List[float]] = None,
    table: TABLE_TYPE = "trajectories",
    omega: float = 1.0,
    jobs: Optional[int] = None,
    output: Optional[str] = None,
    format: FORMAT_TYPE = "csv",
) -> Dataset:
    """Thermal decay of every member of a family

    Args:
        battery:
            Which kind of battery to decay
        p_bar:
            Reference population of the qubit family
        mu_bar_sq:
            Squared reference displacement of the Gaussian family
        occupation:
            Thermal occupation of the Gaussian members
        n_bar:
            Occupation of the reservoir. Defaults to 0.2 for
            qubits and 0.3 for Gaussian modes
        gamma:
            Relaxation rate
        grid:
            Number of time samples per trajectory
        horizon:
            Length of each trajectory in units of 1 / gamma
        points:
            Number of family members. Defaults to 11 for
            qubits and 6 for Gaussian modes
        p_bars:
            Several qubit families to decay at once,
            overriding `p_bar`
        occupations:
            Several Gaussian occupations to decay at once,
            overriding `occupation`
        table:
            Emit the ergotropy trajectories or the
            half-life of each member
        omega:
            Battery frequency
        jobs:
            Worker processes for the sweep. Falls back
            to $ERGOKIT_JOBS, then to 1
        output:
            File to write the dataset to. Written to
            stdout if left blank
        format:
            Serialization of the dataset
    """

    _check_value("battery", battery, BATTERY_TYPE)
    _check_value("table", table, TABLE_TYPE)
    if n_bar is None:
        n_bar = 0.2 if battery == "tls" else 0.3
    if points is None:
        points = 11 if battery == "tls" else 6

    bath = open_system.BathSpec(gamma, n_bar)
    times = _samples(0, horizon / gamma, grid, "grid")

    trajectories, half_lives = [], []
    families = _decay_families(
        battery, p_bar, p_bars, occupation, occupations
    )
    for labels, value in families:
        if battery == "tls":
            family = tls.IsoFamilyTls(value, omega)
            members, coordinate = family.grid(points), "p0"
            sweep = open_system.decay_sweep(
                family, bath, members, times, jobs=jobs
            )
        elif battery == "gaussian":
            family = gaussian.IsoFamilyGaussian(mu_bar_sq, omega)
            boundary = gaussian.boundary_squeezing(family, value)
            members, coordinate = _samples(0, boundary, points), "xi0"
            sweep = open_system.decay_sweep(
                family, bath, members, times, N=value, jobs=jobs
            )

        half_lives.append((labels, sweep.half_lives))
        for x, series in zip(sweep.grid, sweep.trajectories):
            trajectories.append(({**labels, coordinate: x}, series))

    if table == "trajectories":
        series = TimeSeries.stack(trajectories)
    elif table == "half-lives":
        series = TimeSeries.stack(half_lives)

    parameters = {
        "battery": battery,
        "p_bar": p_bar,
        "mu_bar_sq": mu_bar_sq,
        "occupation": occupation,
        "n_bar": n_bar,
        "gamma": gamma,
        "grid": grid,
        "horizon": horizon,
        "points": points,
        "p_bars": p_bars,
        "occupations": occupations,
        "table": table,
        "omega": omega,
    }
    notes = {}
    if battery == "tls" and 0.5 < p_bar and n_bar < 0.5:
        notes["tau_half_inc"] = open_system.tls_tau_half_inc(p_bar, bath)
    return _finish(series, "decay", parameters, output, format, notes)


def charging(
    s0: float = 1.0,
    epsilon: float = 1.0,
    phi0: float = 0.0,
    omega: float = 1.0,
    points: int = 101,
    output: Optional[str] = None,
    format: FORMAT_TYPE = "json",
) -> Dataset:
    """Charge a passive qubit at maximal average power

    Args:
        s0:
            Bloch radius of the initial passive state
        epsilon:
            Bound on the drive strength
        phi0:
            Azimuth of the drive axis
        omega:
            Level splitting of the battery
        points:
            Number of samples of the driven trajectory
            up to the optimal duration
        output:
            File to write the dataset to. Written to
            stdout if left blank
        format:
            Serialization of the dataset
    """

    cfg = chg.ChargingConfig(epsilon, s0, phi0, omega)
    cone = chg.cone_intersection(s0)
    T_opt = chg.optimal_duration(cfg)

    times = _samples(0, T_opt, points)
    series = chg.driven_trajectory(cfg, times)
    notes = {
        "alpha_T": cone.alpha,
        "alpha_T_over_pi": cone.alpha / np.pi,
        "T_opt": T_opt,
        "T_golden": chg.golden_optimum(cfg),
        "P_max": chg.max_power(cfg),
        "p_bar": cone.p_bar,
        "p": cone.p,
        "C": cone.C,
        "s_bar": cone.s_bar,
        "theta": cone.state(phi0, omega).theta,
    }
    parameters = {
        "s0": s0,
        "epsilon": epsilon,
        "phi0": phi0,
        "omega": omega,
        "points": points,
    }
    return _finish(series, "charging", parameters, output, format, notes)


SCENARIOS: Dict[str, Callable[..., Dataset]] = {
    "tls-family": tls_family,
    "tls-channel": tls_channel,
    "tls-dynamics": tls_dynamics,
    "x-state": x_state,
    "gaussian-family": gaussian_family,
    "gaussian-dynamics": gaussian_dynamics_scenario,
    "decay": decay,
    "charging": charging,
}
EMIT_ARGS = ("output", "format")


@dataclass
class ScenarioConfig:
    """A scenario together with its parameters and destination

    Args:
        scenario:
            Name of the scenario, one of the `SCENARIOS` keys
        parameters:
            Keyword arguments of the scenario. Dashes in the
            names are read as underscores
        output:
            File to write the dataset to, stdout if `None`
        format:
            Serialization of the dataset. Falls back to the
            scenario's own default if `None`
    """

    scenario: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    output: Optional[str] = None
    format: Optional[FORMAT_TYPE] = None

    def __post_init__(self):
        try:
            fn = SCENARIOS[self.scenario]
        except KeyError:
            raise ConfigError(
                "Unknown scenario '{}', choose from {}".format(
                    self.scenario, ", ".join(SCENARIOS)
                )
            )

        if not isinstance(self.parameters, dict):
            raise ConfigError("Scenario parameters must be a table")
        parameters = {
            k.replace("-", "_"): v for k, v in self.parameters.items()
        }

        allowed = set(inspect.signature(fn).parameters) - set(EMIT_ARGS)
        unknown = sorted(set(parameters) - allowed)
        if unknown:
            raise ConfigError(
                "Unknown parameters {} for scenario '{}'".format(
                    ", ".join(unknown), self.scenario
                )
            )

        hints = get_type_hints(fn)
        for name, value in parameters.items():
            _check_value(name, value, hints[name])
        if self.format not in (None, "csv", "json"):
            raise ConfigError(f"Unknown output format '{self.format}'")
        self.parameters = parameters

    @classmethod
    def from_file(cls, path: str) -> "ScenarioConfig":
        """Read a JSON or TOML scenario description"""

        _, extension = os.path.splitext(path)
        try:
            with open(path, "r") as f:
                text = f.read()
        except OSError as e:
            raise ConfigError(f"Can't read config {path}: {e.strerror}")

        try:
            if extension == ".toml":
                config = toml.loads(text)
            else:
                config = json.loads(text)
        except (ValueError, toml.TomlDecodeError) as e:
            raise ConfigError(f"Can't parse config {path}: {e}")

        if not isinstance(config, dict) or "scenario" not in config:
            raise ConfigError(f"Config {path} has no 'scenario' key")

        unknown = set(config) - {"scenario", "parameters", "output", "format"}
        if unknown:
            raise ConfigError(
                "Unknown keys {} in config {}".format(
                    ", ".join(sorted(unknown)), path
                )
            )
        return cls(**config)

    def run(self) -> Dataset:
        fn = SCENARIOS[self.scenario]
        kwargs = dict(self.parameters, output=self.output)
        if self.format is not None:
            kwargs["format"] = self.format

        logger.debug(f"Running scenario {self.scenario} with {kwargs}")
        return fn(**kwargs)
