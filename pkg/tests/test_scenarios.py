import json

import numpy as np
import pytest

from ergokit import scenarios
from ergokit.exceptions import ConfigError, DomainError


def test_tls_family(tmp_path):
    path = str(tmp_path / "family.csv")
    dataset = scenarios.tls_family(p_bar=0.8, points=11, output=path)
    with open(path, "r") as f:
        assert f.read() == dataset.to_csv()

    assert list(dataset.columns)[:3] == ["p", "p_bar", "C"]
    assert np.abs(dataset["R"] - 0.6).max() < 1e-12
    assert abs(dataset["q_max"][-1] - 1) < 1e-12

    notes = dataset.metadata["notes"]
    assert abs(notes["rank_one_success"][0] - 0.8) < 1e-12
    assert dataset.metadata["parameters"]["points"] == 11

    with pytest.raises(DomainError):
        scenarios.tls_family(p_bar=0.4, output=path)


def test_tls_family_several_references(capsys):
    dataset = scenarios.tls_family(p_bars=[0.6, 1.0], points=5)
    assert capsys.readouterr().out == dataset.to_csv()
    assert list(dataset["p_bar"]) == [0.6] * 5 + [1.0] * 5
    assert (dataset["q_max"][5:] == 1).all()


def test_tls_channel(capsys):
    dataset = scenarios.tls_channel(p_bar=0.7, steps=10)
    capsys.readouterr()
    assert len(dataset) == 11
    total_heat = dataset.metadata["notes"]["total_heat"]
    assert abs(total_heat - (0.4 - 0.7)) < 1e-12


def test_tls_dynamics(capsys):
    dataset = scenarios.tls_dynamics(points=21, periods=1.0)
    capsys.readouterr()
    assert abs(dataset["t"][-1] - np.pi) < 1e-12
    assert np.ptp(dataset["R_total"]) < 1e-10


def test_x_state(capsys):
    dataset = scenarios.x_state(points=11)
    capsys.readouterr()
    assert dataset["concurrence"][0] == 0
    assert dataset["concurrence"][-1] == 1
    assert np.abs(dataset["U"] - 1).max() < 1e-12
    assert 0.5 < dataset.metadata["notes"]["sudden_death_q"] < 0.7


def test_gaussian_family(capsys):
    dataset = scenarios.gaussian_family(points=6, occupations=[0, 0.5, 1])
    capsys.readouterr()
    assert len(dataset) == 18
    assert np.abs(dataset["R"] - 5).max() < 1e-10

    notes = dataset.metadata["notes"]
    for N, q in zip([0, 0.5, 1], notes["success_probability"]):
        assert abs(q - 1 / (N + 1)) < 1e-12
    assert round(notes["boundary_xi"][1], 2) == 1.24
    assert round(notes["equal_split_xi"][1], 2) == 0.96


def test_gaussian_dynamics(capsys):
    dataset = scenarios.gaussian_dynamics_scenario(points=11)
    capsys.readouterr()
    assert "mu_B_re" in dataset.columns
    assert np.abs(dataset["R_B"] - 5).max() < 1e-10

    dataset = scenarios.gaussian_dynamics_scenario(frames=True, resolution=5)
    capsys.readouterr()
    assert len(dataset) == 3 * 25


def test_decay_half_lives(capsys):
    dataset = scenarios.decay(grid=11, table="half-lives")
    capsys.readouterr()
    assert list(dataset.columns)[:2] == ["p", "p_bar"]
    assert len(dataset) == 11
    assert (np.diff(dataset["T_half"]) < 0).all()
    assert abs(dataset.metadata["notes"]["tau_half_inc"] - np.log(2)) < 1e-12

    dataset = scenarios.decay(battery="gaussian", grid=11, table="half-lives")
    capsys.readouterr()
    assert len(dataset) == 6
    assert dataset.metadata["parameters"]["n_bar"] == 0.3
    assert list(dataset.columns)[:2] == ["xi", "N0"]
    assert (np.diff(dataset["T_half"]) < 0).all()


def test_decay_trajectories(capsys):
    dataset = scenarios.decay(grid=5, points=3, p_bars=[0.7, 0.9])
    capsys.readouterr()
    assert len(dataset) == 2 * 3 * 5
    assert list(dataset.columns)[:3] == ["t", "p_bar", "p0"]
    assert "jobs" not in dataset.metadata["parameters"]


def test_charging(capsys):
    dataset = scenarios.charging(points=11)
    payload = json.loads(capsys.readouterr().out)
    assert payload["metadata"]["scenario"] == "charging"

    notes = dataset.metadata["notes"]
    assert 0.735 <= notes["alpha_T_over_pi"] <= 0.745
    assert abs(notes["T_golden"] - notes["T_opt"]) < 1e-6
    assert abs(dataset["R"][-1] - notes["p_bar"] * 2 + 1) < 1e-9


@pytest.mark.parametrize(
    "config",
    [
        {"scenario": "x-state", "parameters": {"points": 3}},
        pytest.param(
            {"scenario": "y-state"},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        pytest.param(
            {"scenario": "x-state", "parameters": {"p-bar": 0.8}},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        # output options live outside of the parameters
        pytest.param(
            {"scenario": "x-state", "parameters": {"output": "x.csv"}},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        pytest.param(
            {"scenario": "x-state", "format": "xml"},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        pytest.param(
            {"scenario": "decay", "parameters": {"battery": "spring"}},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        pytest.param(
            {"scenario": "decay", "parameters": {"table": "nonsense"}},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        pytest.param(
            {"scenario": "x-state", "parameters": {"points": "abc"}},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        pytest.param(
            {"scenario": "x-state", "parameters": {"points": 5.5}},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        pytest.param(
            {"scenario": "decay", "parameters": {"p_bars": [0.8, "x"]}},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        pytest.param(
            {"scenario": "gaussian-dynamics", "parameters": {"frames": 1}},
            marks=pytest.mark.xfail(raises=ConfigError),
        ),
        {
            "scenario": "decay",
            "parameters": {"p_bars": [0.8, 1], "jobs": None},
        },
        {"scenario": "charging", "parameters": {"s0": 1, "phi0": 0.5}},
    ],
)
def test_scenario_config(config):
    scenarios.ScenarioConfig(**config)


@pytest.fixture(params=[".json", ".toml"])
def config_file(request, tmp_path):
    path = tmp_path / ("config" + request.param)
    output = str(tmp_path / "out.json")
    if request.param == ".json":
        text = json.dumps(
            {
                "scenario": "tls-family",
                "parameters": {"p-bar": 0.9, "points": 5},
                "output": output,
                "format": "json",
            }
        )
    else:
        text = "\n".join(
            [
                'scenario = "tls-family"',
                f'output = "{output}"',
                'format = "json"',
                "[parameters]",
                "p_bar = 0.9",
                "points = 5",
            ]
        )
    path.write_text(text)
    return str(path), output


def test_scenario_config_from_file(config_file):
    path, output = config_file
    config = scenarios.ScenarioConfig.from_file(path)
    assert config.parameters == {"p_bar": 0.9, "points": 5}

    dataset = config.run()
    with open(output, "r") as f:
        assert f.read() == dataset.to_json()
    assert dataset.metadata["parameters"]["p_bar"] == 0.9


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        '{"parameters": {}}',
        '{"scenario": "x-state", "extra": 1}',
        '["x-state"]',
        '{"scenario": "decay", "parameters": {"battery": "spring"}}',
        '{"scenario": "decay", "parameters": {"table": "nonsense"}}',
        '{"scenario": "x-state", "parameters": {"points": "abc"}}',
    ],
)
def test_bad_config_files(text, tmp_path):
    path = tmp_path / "config.json"
    path.write_text(text)
    with pytest.raises(ConfigError):
        scenarios.ScenarioConfig.from_file(str(path))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        scenarios.ScenarioConfig.from_file(str(tmp_path / "missing.json"))


def test_decay_choices():
    with pytest.raises(ConfigError):
        scenarios.decay(battery="spring", grid=5)
    with pytest.raises(ConfigError):
        scenarios.decay(table="nonsense", grid=5)


@pytest.mark.parametrize(
    "fn,kwargs",
    [
        (scenarios.tls_family, {"points": 1}),
        (scenarios.tls_dynamics, {"points": 0}),
        (scenarios.x_state, {"points": 0}),
        (scenarios.gaussian_family, {"points": 1}),
        (scenarios.gaussian_dynamics_scenario, {"points": 0}),
        (
            scenarios.gaussian_dynamics_scenario,
            {"frames": True, "resolution": 1},
        ),
        (scenarios.decay, {"grid": 0}),
        (scenarios.decay, {"points": 1, "grid": 5}),
        (scenarios.decay, {"battery": "gaussian", "points": 1, "grid": 5}),
        (scenarios.charging, {"points": 0}),
    ],
)
def test_sample_counts(fn, kwargs, capsys):
    with pytest.raises(DomainError) as exc_info:
        fn(**kwargs)
    assert exc_info.value.name in ("points", "grid", "resolution")
    assert capsys.readouterr().out == ""
