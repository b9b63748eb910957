import numpy as np
import pytest

from ergokit import tls
from ergokit.exceptions import (
    DomainError,
    OutOfFamilyRange,
    SingularReference,
)
from ergokit.states import (
    DensityOperator,
    ergotropy,
    purity,
    trace_distance,
)


def random_state(rng):
    p = rng.uniform(0, 1)
    C = rng.uniform(0, 1) * np.sqrt(4 * p * (1 - p))
    return tls.TlsState(p, C, rng.uniform(0, 4 * np.pi))


@pytest.mark.parametrize(
    "p,C",
    [
        (0.5, 1.0),
        pytest.param(1.2, 0, marks=pytest.mark.xfail(raises=DomainError)),
        # coherence beyond the Bloch ball
        pytest.param(0.9, 0.7, marks=pytest.mark.xfail(raises=DomainError)),
        pytest.param(0.5, -0.1, marks=pytest.mark.xfail(raises=DomainError)),
    ],
)
def test_tls_state_domain(p, C):
    tls.TlsState(p, C)


def test_from_density():
    state = tls.TlsState(0.3, 0.5, 1.2)
    recovered = tls.TlsState.from_density(state.density)
    assert abs(recovered.p - 0.3) < 1e-12
    assert abs(recovered.C - 0.5) < 1e-12
    assert abs(recovered.theta - 1.2) < 1e-12

    with pytest.raises(DomainError):
        tls.TlsState.from_density(DensityOperator.maximally_mixed(3))


@pytest.mark.parametrize("theta", [-1.2, 0.0, 1.2, 3.0])
def test_phase_period(theta):
    state = tls.TlsState(0.3, 0.5, theta)
    shifted = tls.TlsState(0.3, 0.5, theta + 4 * np.pi)
    assert np.abs(state.matrix - shifted.matrix).max() < 1e-12

    # half a period flips the coherence
    flipped = tls.TlsState(0.3, 0.5, theta + 2 * np.pi)
    assert abs(flipped.matrix[0, 1] + state.matrix[0, 1]) < 1e-12
    assert trace_distance(state.matrix, flipped.matrix) > 0.1
    split, other = map(tls.ergotropy_split, (state, flipped))
    assert abs(split.total - other.total) < 1e-12

    recovered = tls.TlsState.from_density(flipped.density)
    assert -2 * np.pi < recovered.theta <= 2 * np.pi
    assert np.abs(recovered.matrix - flipped.matrix).max() < 1e-12


def test_bloch_vector():
    state = tls.TlsState(0.3, 0.5, 1.2)
    rebuilt = tls.TlsState.from_bloch(state.bloch_vector())
    assert trace_distance(state.matrix, rebuilt.matrix) < 1e-12


def test_ergotropy_split_matches_brute_force(rng):
    for _ in range(1000):
        state = random_state(rng)
        split = tls.ergotropy_split(state)
        brute = ergotropy(state.density, state.hamiltonian)
        assert abs(split.total - brute) < 1e-10


def test_incoherent_ergotropy():
    assert tls.inc_ergotropy(1, omega=2) == 2
    assert tls.inc_ergotropy(0.5) == 0
    assert tls.inc_ergotropy(0.2) == 0
    assert tls.coh_ergotropy(0.5, 0) == 0

    # maximal coherence at p = 1/2 is worth half a quantum
    assert abs(tls.coh_ergotropy(0.5, 1.0) - 0.5) < 1e-12


@pytest.mark.parametrize(
    "p_bar",
    [
        0.75,
        1.0,
        pytest.param(0.5, marks=pytest.mark.xfail(raises=DomainError)),
        pytest.param(1.1, marks=pytest.mark.xfail(raises=DomainError)),
    ],
)
def test_family_domain(p_bar):
    family = tls.IsoFamilyTls(p_bar)
    assert family.P == 2 * p_bar - 1


def test_family_invariance(p_bar):
    family = tls.IsoFamilyTls(p_bar, omega=1.5)
    for p in family.grid(100):
        member = tls.family_member(family, p)
        R = ergotropy(member.density, member.hamiltonian)
        assert abs(R - family.charge) < 1e-12
        assert abs(tls.ergotropy_split(member).total - family.charge) < 1e-12


def test_family_endpoints(p_bar):
    family = tls.IsoFamilyTls(p_bar)
    assert tls.iso_coherence(family, p_bar) == 0
    assert abs(purity(tls.pure_member(family).density) - 1) < 1e-12

    # the pure member has no entropy and no energy overhead
    assert abs(tls.entropy_on_family(family, family.P)) < 1e-12
    assert abs(tls.charge_energy_ratio(family, family.P) - 1) < 1e-12
    assert abs(
        tls.entropy_on_family(family, p_bar) - tls.binary_entropy(p_bar)
    ) < 1e-12

    with pytest.raises(OutOfFamilyRange):
        tls.family_member(family, family.P - 0.01)


def test_heat_and_energy():
    family = tls.IsoFamilyTls(0.8)
    member = tls.family_member(family, 0.7)
    assert abs(tls.internal_energy(member) - 0.7) < 1e-12
    assert abs(tls.heat(0.8, 0.6) + 0.2) < 1e-12


def test_gadc_channel(p_bar, rng):
    family = tls.IsoFamilyTls(p_bar)
    p_prime = (family.P + p_bar) / 2
    target = tls.family_member(family, p_prime, 0.7)
    kraus = tls.gadc_kraus(family, p_prime, 0.7)
    assert len(kraus) == 4
    assert kraus.completeness_error() < 1e-12

    # every input is replaced by the target
    for _ in range(20):
        state = random_state(rng)
        output = kraus.apply(state.density)
        assert trace_distance(output, target.matrix) < 1e-12

        swapped = tls.swap_realization(state, target)
        assert trace_distance(swapped.matrix, target.matrix) < 1e-12


def test_general_measurement():
    family = tls.IsoFamilyTls(0.8)

    # the trivial target is reached with certainty
    outcome = tls.general_measurement_qmax(family, family.p_bar)
    assert abs(outcome.success_probability - 1) < 1e-12

    for p in family.grid(50):
        outcome = tls.general_measurement_qmax(family, p, 0.4)
        target = tls.family_member(family, p, 0.4)
        assert outcome.max_effect_eigenvalue() <= 1 + 1e-12
        assert 0 < outcome.success_probability <= 1 + 1e-12
        assert trace_distance(outcome.post_state.matrix, target.matrix) < 1e-10

    with pytest.raises(SingularReference):
        tls.general_measurement_qmax(tls.IsoFamilyTls(1.0), 1.0)


@pytest.mark.parametrize("p_bar", [0.6, 0.8, 1.0])
def test_rank_one_measurement(p_bar):
    family = tls.IsoFamilyTls(p_bar)
    outcome = tls.rank_one_measurement(family, theta=0.3)
    assert abs(outcome.success_probability - p_bar) < 1e-12
    assert abs(outcome.post_state.p - family.P) < 1e-12
    assert abs(purity(outcome.post_state.density) - 1) < 1e-12

    if p_bar < 1:
        with pytest.raises(DomainError):
            tls.rank_one_measurement(family, p_bar)


def test_retry_success():
    assert abs(tls.retry_success(0.5, 2) - 0.75) < 1e-12
    assert tls.retry_success(0.3, 0) == 0
    with pytest.raises(DomainError):
        tls.retry_success(1.5, 2)


def test_channel_path():
    family = tls.IsoFamilyTls(0.7)
    path = tls.channel_path(family, 0.7, family.P, 0, np.pi, steps=20)
    assert len(path) == 21
    assert path.time_name == "step"

    assert (path["kraus_completeness"] < 1e-12).all()
    assert (path["swap_distance"] < 1e-12).all()
    assert np.abs(path["R"] - family.charge).max() < 1e-10
    assert abs(path["Q"].sum() - (family.P - 0.7)) < 1e-12
    assert abs(path["p"][-1] - family.P) < 1e-12

    with pytest.raises(DomainError):
        tls.channel_path(family, 0.7, 0.5, steps=0)
