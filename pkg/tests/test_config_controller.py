import json

import pytest

from tandemtail.config_controller import ConfigController, RunConfig, VerifyConfig
from tandemtail.distributions import Deterministic, Exponential
from tandemtail.exceptions.common import UnstableModelException
from tandemtail.exceptions.config_exceptions import InvalidConfigException
from tandemtail.tandem_spec import Renewal, SimConfig, gim_mm_tandem

MODEL = {
    "arrivals": {"kind": "deterministic", "value": 2.0},
    "services": [{"kind": "exponential", "rate": 1.0}, {"kind": "exponential", "rate": 1.0}],
}


def write_config(tmp_path, data):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_load_from_file(tmp_path):
    filename = write_config(
        tmp_path,
        {
            "command": "compare",
            "model": MODEL,
            "sim": {"runs": 500, "path_len": 300, "seed": 4},
            "x_grid": [0, 1, 2],
            "bound_kinds": ["polyexp"],
            "verify": {"n_mc": 1000, "grid": [[0, 1]]},
        },
    )
    controller = ConfigController.load_from_file(filename)
    assert controller.command == "compare"
    assert controller.model.arrivals == Renewal(Deterministic(2.0))
    assert controller.sim.runs == 500
    assert controller.verify == VerifyConfig(n_mc=1000, grid=((0.0, 1.0),))
    cfg = controller.build()
    assert cfg.sim.x_grid == (0.0, 1.0, 2.0)
    assert cfg.bound_kinds == ("polyexp",)


def test_save_and_reload(tmp_path):
    controller = ConfigController(
        "simulate",
        gim_mm_tandem(Deterministic(2.0), [Exponential(1.0)]),
        SimConfig(runs=200, path_len=50, seed=3),
    )
    controller.x_grid = [0.0, 0.5]
    controller.rho = 0.75
    filename = str(tmp_path / "saved.json")
    controller.save_to_file(filename)
    data = json.loads((tmp_path / "saved.json").read_text(encoding="utf-8"))
    assert data["schema_version"] == 1
    reloaded = ConfigController.load_from_file(filename)
    assert reloaded.to_dict() == controller.to_dict()


def test_save_needs_a_file_name():
    with pytest.raises(ValueError):
        ConfigController("bound").save_to_file()


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(InvalidConfigException):
        ConfigController.load_from_file(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(InvalidConfigException):
        ConfigController.load_from_file(str(broken))
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(InvalidConfigException):
        ConfigController.load_from_file(str(listed))


def test_bad_parameters_are_config_errors(tmp_path):
    model = {**MODEL, "services": [{"kind": "exponential", "rate": -1.0}]}
    with pytest.raises(InvalidConfigException):
        ConfigController.load_from_file(write_config(tmp_path, {"command": "bound", "model": model}))


def test_unstable_model_is_reported_as_such(tmp_path):
    model = {**MODEL, "arrivals": {"kind": "deterministic", "value": 0.5}}
    with pytest.raises(UnstableModelException):
        ConfigController.load_from_file(write_config(tmp_path, {"command": "bound", "model": model}))


def test_overrides():
    controller = ConfigController("simulate", gim_mm_tandem(Deterministic(2.0), [Exponential(1.0)]))
    controller.x_grid = [1.0]
    controller.apply_overrides(seed=7, runs=100, path_len=20, rho=0.8, output_path="out.csv")
    cfg = controller.build()
    assert (cfg.sim.seed, cfg.sim.runs, cfg.sim.path_len) == (7, 100, 20)
    assert cfg.model.arrivals.mean() == pytest.approx(1.25)
    assert cfg.output_path == "out.csv"


def test_rho_restricts_the_figure_sweep():
    controller = ConfigController("figure")
    controller.figure = "dm2"
    controller.rho = 0.75
    cfg = controller.build()
    assert cfg.rhos == (0.75,)
    assert cfg.sim == SimConfig()


@pytest.mark.parametrize(
    "command, changes",
    [
        ("bound", {}),
        ("simulate", {"x_grid": [1.0]}),
        ("figure", {}),
        ("bound", {"x_grid": [1.0], "format": "xml"}),
        ("bound", {"x_grid": [1.0], "bound_kinds": ["polyexp", "chernoff"]}),
        ("verify", {"checks": []}),
        ("verify", {"checks": ["dominance"]}),
    ],
)
def test_build_rejects_incomplete_runs(command, changes):
    controller = ConfigController(command, gim_mm_tandem(Deterministic(2.0), [Exponential(1.0)]))
    for name, value in changes.items():
        setattr(controller, name, value)
    with pytest.raises(InvalidConfigException):
        controller.build()


def test_run_config_requires_a_model():
    with pytest.raises(InvalidConfigException):
        RunConfig("verify")


@pytest.mark.parametrize(
    "name, value",
    [
        ("command", 3),
        ("model", "dm"),
        ("sim", {"runs": 100}),
        ("bound_kinds", "polyexp"),
        ("checks", [1]),
        ("output_path", 1),
        ("format", None),
        ("figure", 2),
        ("rho", "0.5"),
        ("mu", True),
        ("verify", {}),
    ],
)
def test_setters_check_types(name, value):
    controller = ConfigController("bound")
    with pytest.raises(TypeError):
        setattr(controller, name, value)


def test_verify_config_validation():
    with pytest.raises(InvalidConfigException):
        VerifyConfig(n_mc=1)
    with pytest.raises(TypeError):
        VerifyConfig(horizon=2.5)
