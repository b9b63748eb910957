import numpy as np
import pytest

from ergokit import gaussian, open_system, tls
from ergokit.exceptions import DomainError, NoBracket


@pytest.fixture(scope="session")
def bath():
    return open_system.BathSpec(1.0, 0.2)


@pytest.mark.parametrize(
    "gamma,n_bar",
    [
        (0.5, 0.3),
        pytest.param(0, 0.3, marks=pytest.mark.xfail(raises=DomainError)),
        pytest.param(1, -0.1, marks=pytest.mark.xfail(raises=DomainError)),
    ],
)
def test_bath_domain(gamma, n_bar):
    bath = open_system.BathSpec(gamma, n_bar)
    assert bath.horizon == 100 / gamma


def test_tls_decay_limits(bath):
    state = open_system.tls_decay(0.7, 0.8, 0.4, bath, 0)
    assert abs(state.p - 0.7) < 1e-12
    assert abs(state.C - 0.8) < 1e-12

    state = open_system.tls_decay(0.7, 0.8, 0.4, bath, 60)
    assert abs(state.p - bath.n_bar) < 1e-12
    assert state.C < 1e-12

    # qubit reservoirs can't hold more than one excitation
    with pytest.raises(DomainError):
        open_system.tls_decay(0.7, 0, 0, open_system.BathSpec(1, 1.5), 1)
    with pytest.raises(DomainError):
        open_system.tls_decay(0.7, 0, 0, bath, -1)


def test_tls_decay_matches_master_equation(bath):
    state = tls.family_member(tls.IsoFamilyTls(0.8), 0.65, 0.3)
    times = np.linspace(0, 10, 41)
    numeric = open_system.tls_decay_numeric(state, bath, times)
    for t, other in zip(times, numeric):
        closed = open_system.tls_decay(state.p, state.C, state.theta, bath, t)
        assert abs(closed.p - other.p) < 1e-8
        assert abs(closed.C - other.C) < 1e-8


def test_tau_half_inc(bath):
    tau = open_system.tls_tau_half_inc(0.8, bath)
    assert abs(tau - np.log(2)) < 1e-12
    assert abs(open_system.tls_decay(0.8, 0, 0, bath, tau).p - 0.5) < 1e-12

    with pytest.raises(DomainError):
        open_system.tls_tau_half_inc(0.4, bath)


def test_coherent_ergotropy_peaks_at_tau_half(bath):
    family = tls.IsoFamilyTls(0.8)
    state = tls.family_member(family, 0.7)
    tau = open_system.tls_tau_half_inc(state.p, bath)

    def R_coh(t):
        record = open_system.decay_record(state, bath, t)
        return record.breakdown["coherent"]

    assert R_coh(tau) > R_coh(tau - 1e-4)
    assert R_coh(tau) > R_coh(tau + 1e-4)


def test_gaussian_decay_limits():
    bath = open_system.BathSpec(1.0, 0.3)
    state = open_system.gaussian_decay(1 + 1j, 0.8, 1.1, 0.5, bath, 0)
    assert abs(state.mu - (1 + 1j)) < 1e-12
    assert abs(state.xi_mag - 0.8) < 1e-12
    assert abs(state.N - 0.5) < 1e-12

    state = open_system.gaussian_decay(1 + 1j, 0.8, 1.1, 0.5, bath, 60)
    assert abs(state.mu) < 1e-12
    assert state.xi_mag < 1e-12
    assert abs(state.N - 0.3) < 1e-12


def test_gaussian_decay_matches_moment_flow():
    bath = open_system.BathSpec(0.7, 0.3)
    family = gaussian.IsoFamilyGaussian(5.0)
    state = gaussian.family_member(family, 0.8, 0.5, 0.4, 1.1)
    for t in np.linspace(0, 10, 41):
        closed = open_system.gaussian_decay(
            state.mu, state.xi_mag, state.phi, state.N, bath, t
        )
        flowed = open_system.gaussian_moment_flow(state, bath, t)
        assert abs(closed.mu - flowed.mu) < 1e-8
        assert abs(closed.xi_mag - flowed.xi_mag) < 1e-8
        assert abs(closed.N - flowed.N) < 1e-8

        # the lab frame only rotates the moments
        lab = open_system.gaussian_moment_flow(state, bath, t, "lab")
        assert abs(abs(lab.mu) - abs(flowed.mu)) < 1e-12
        assert abs(lab.N - flowed.N) < 1e-12
        assert abs(lab.xi_mag - flowed.xi_mag) < 1e-12

    with pytest.raises(DomainError):
        open_system.gaussian_moment_flow(state, bath, 1, "body")


def test_displacement_ergotropy_decays():
    bath = open_system.BathSpec(1.0, 0.3)
    state = gaussian.family_member(gaussian.IsoFamilyGaussian(5.0), 0.5, 0.5)
    series = open_system.decay_series(state, bath, np.linspace(0, 5, 51))
    assert (np.diff(series["R_d"]) < 0).all()
    assert abs(series["R_d"][0] - abs(state.mu) ** 2) < 1e-12


def test_half_life():
    t_half = open_system.half_life(lambda t: np.exp(-2 * t))
    assert abs(t_half - np.log(2) / 2) < 1e-10

    # slow decays need the bracket to grow
    t_half = open_system.half_life(lambda t: np.exp(-0.01 * t), t_max=1000)
    assert abs(t_half - 100 * np.log(2)) < 1e-8

    with pytest.raises(NoBracket):
        open_system.half_life(lambda t: 1.0, t_max=10)
    with pytest.raises(DomainError):
        open_system.half_life(lambda t: 0.0)


def test_tls_decay_sweep(bath):
    family = tls.IsoFamilyTls(0.8)
    times = np.linspace(0, 5, 51)
    sweep = open_system.decay_sweep(family, bath, family.grid(11), times)
    assert len(sweep.trajectories) == 11
    assert sweep.half_lives.time_name == "p"

    # coherent members hold on to their charge longer
    assert (np.diff(sweep.half_lives["T_half"]) < 0).all()
    assert np.abs(sweep.half_lives["R0"] - family.charge).max() < 1e-12
    assert abs(sweep.half_lives["T_half"][-1] - np.log(4 / 3)) < 1e-10

    series = sweep.trajectories[0]
    assert set(series.columns) == {"p", "C", "R", "R_inc", "R_coh"}


def test_gaussian_decay_sweep():
    family = gaussian.IsoFamilyGaussian(5.0)
    bath = open_system.BathSpec(1.0, 0.3)
    grid = np.linspace(0, gaussian.boundary_squeezing(family, 0.5), 6)
    times = np.linspace(0, 5, 51)
    sweep = open_system.decay_sweep(family, bath, grid, times, N=0.5)
    assert sweep.half_lives.time_name == "xi"

    # squeezed members empty faster
    T_half = sweep.half_lives["T_half"]
    assert (np.diff(T_half) < 0).all()
    assert abs(T_half[0] - np.log(2)) < 1e-10
    assert abs(T_half[-1] - np.log(70 / 45)) < 1e-10


def test_parallel_sweep_matches_serial(bath):
    family = tls.IsoFamilyTls(0.8)
    times = np.linspace(0, 2, 11)
    serial = open_system.decay_sweep(family, bath, family.grid(4), times)
    parallel = open_system.decay_sweep(
        family, bath, family.grid(4), times, jobs=2
    )
    assert (serial.half_lives["T_half"] == parallel.half_lives["T_half"]).all()
    for a, b in zip(serial.trajectories, parallel.trajectories):
        assert (a["R"] == b["R"]).all()


def test_half_life_horizon_scales():
    # the default horizon is 100 decay times, not an absolute time
    decay = lambda t: np.exp(-t / 50)  # noqa: E731
    t_half = open_system.half_life(decay, bracket_hint=1.0)
    assert abs(t_half - 50 * np.log(2)) < 1e-8

    with pytest.raises(NoBracket) as exc_info:
        open_system.half_life(decay, bracket_hint=0.1)
    assert abs(exc_info.value.t_max - 10) < 1e-12

    slow = lambda t: np.exp(-0.001 * t)  # noqa: E731
    t_half = open_system.half_life(slow, bracket_hint=1000.0)
    assert abs(t_half - 1000 * np.log(2)) < 1e-6
