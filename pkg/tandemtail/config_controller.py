"""
Run configuration.

A run is described by one JSON document, for instance

    {
        "command": "compare",
        "model": {"arrivals": {"kind": "deterministic", "value": 2.0},
                  "services": [{"kind": "exponential", "rate": 1.0},
                               {"kind": "exponential", "rate": 1.0}]},
        "sim": {"runs": 10000, "path_len": 10000, "seed": 1},
        "x_grid": [0, 1, 2, 5, 10],
        "bound_kinds": ["polyexp", "ld"],
        "output_path": "compare.csv",
        "format": "csv"
    }

ConfigController loads it, applies command-line overrides and builds the
validated RunConfig the commands run on.

"""

import json
import os
from dataclasses import dataclass, field, replace
from typing import Optional

from tandemtail.config_json_encoder import dump_document
from tandemtail.exceptions.config_exceptions import InvalidConfigException
from tandemtail.exceptions.distribution_exceptions import InvalidParameterException
from tandemtail.tandem_spec import SimConfig, TandemSpec, with_load
from tandemtail.verifier import DEFAULT_HORIZON

COMMANDS = ("bound", "simulate", "compare", "verify", "figure")
BOUND_KINDS = ("polyexp", "sojourn", "ld", "kingman", "ross")
CHECKS = ("fixed-point", "gamma-inequality", "kingman-gamma", "eight-inequalities", "dominance")
FIGURES = ("dm2", "e2m2")
FORMATS = ("csv", "json")

DEFAULT_BOUND_KINDS = ("polyexp", "ld")
DEFAULT_CHECKS = ("fixed-point", "gamma-inequality", "eight-inequalities")
DEFAULT_MU = 1.0
FIGURE_RHOS = (0.5, 0.75, 0.95)


@dataclass(frozen=True)
class VerifyConfig:
    """
    Attributes:
        n_mc (int): Monte Carlo sample size of the stochastic checks.
        horizon (int): Maximal walk length of the fixed-point check.
        grid (tuple[tuple[float, float], ...]): (u, v) points; empty for the
            default grid of each check.
    """

    n_mc: int = 100_000
    horizon: int = DEFAULT_HORIZON
    grid: tuple = field(default_factory=tuple)

    def __post_init__(self):
        for name in ("n_mc", "horizon"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{name} must be an integer")
        if self.n_mc < 2:
            raise InvalidConfigException("verify.n_mc", "must be at least 2")
        grid = tuple((float(u), float(v)) for u, v in self.grid)
        object.__setattr__(self, "grid", grid)

    def to_dict(self) -> dict:
        return {"n_mc": self.n_mc, "horizon": self.horizon, "grid": [list(p) for p in self.grid]}

    @classmethod
    def from_dict(cls, data: dict) -> "VerifyConfig":
        return cls(
            n_mc=data.get("n_mc", 100_000),
            horizon=data.get("horizon", DEFAULT_HORIZON),
            grid=tuple(tuple(p) for p in data.get("grid", ())),
        )


@dataclass(frozen=True)
class RunConfig:
    """
    A validated run.

    Attributes:
        command (str): One of bound, simulate, compare, verify, figure.
        model (TandemSpec | None): The tandem; required except for figure.
        sim (SimConfig | None): The experiment; required by simulate and
            compare, and by figure and by the dominance check.
        bound_kinds (tuple[str, ...]): Subset of polyexp, sojourn, ld,
            kingman, ross.
        checks (tuple[str, ...]): Verifier checks run by verify.
        output_path (str | None): Output file (figure: output directory);
            None writes to stdout.
        format (str): csv or json.
        x_grid (tuple[float, ...]): Levels of the curves.
        figure (str | None): dm2 or e2m2 for the figure command.
        rhos (tuple[float, ...]): Loads swept by the figure command.
        mu (float): Service rate of the figure models.
        verify (VerifyConfig): Settings of the verifier checks.

    Raises:
        InvalidConfigException: If a command-specific field is missing or a
            value is out of range.
    """

    command: str
    model: Optional[TandemSpec] = None
    sim: Optional[SimConfig] = None
    bound_kinds: tuple = DEFAULT_BOUND_KINDS
    checks: tuple = DEFAULT_CHECKS
    output_path: Optional[str] = None
    format: str = "csv"
    x_grid: tuple = field(default_factory=tuple)
    figure: Optional[str] = None
    rhos: tuple = FIGURE_RHOS
    mu: float = DEFAULT_MU
    verify: VerifyConfig = field(default_factory=VerifyConfig)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidConfigException("command", f"must be one of {', '.join(COMMANDS)}")
        if self.format not in FORMATS:
            raise InvalidConfigException("format", f"must be one of {', '.join(FORMATS)}")
        unknown = set(self.bound_kinds) - set(BOUND_KINDS)
        if unknown:
            raise InvalidConfigException("bound_kinds", f"unknown kinds {sorted(unknown)}")
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise InvalidConfigException("checks", f"unknown checks {sorted(unknown)}")
        if self.command == "figure":
            if self.figure not in FIGURES:
                raise InvalidConfigException("figure", f"must be one of {', '.join(FIGURES)}")
            if not self.rhos or not all(0.0 < r < 1.0 for r in self.rhos):
                raise InvalidConfigException("rhos", "must be loads in (0, 1)")
        elif self.model is None:
            raise InvalidConfigException("model", f"is required by '{self.command}'")
        if self.command in ("simulate", "compare", "figure") and self.sim is None:
            raise InvalidConfigException("sim", f"is required by '{self.command}'")
        if self.command in ("bound", "simulate", "compare") and not self.x_grid:
            raise InvalidConfigException("x_grid", f"must not be empty for '{self.command}'")
        if self.command == "verify" and not self.checks:
            raise InvalidConfigException("checks", "must name at least one check")
        if self.command == "verify" and "dominance" in self.checks and not self.x_grid:
            raise InvalidConfigException("x_grid", "the dominance check needs a grid")
        if not self.mu > 0:
            raise InvalidConfigException("mu", "must be positive")

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "model": self.model.to_dict() if self.model is not None else None,
            "sim": self.sim.to_dict() if self.sim is not None else None,
            "bound_kinds": list(self.bound_kinds),
            "checks": list(self.checks),
            "output_path": self.output_path,
            "format": self.format,
            "x_grid": list(self.x_grid),
            "figure": self.figure,
            "rhos": list(self.rhos),
            "mu": self.mu,
            "verify": self.verify.to_dict(),
        }


class ConfigController:
    """
    Mutable builder of a RunConfig, loaded from and saved to a JSON file.
    """

    _command: str = "bound"
    _model: Optional[TandemSpec] = None
    _sim: Optional[SimConfig] = None
    _bound_kinds: tuple = DEFAULT_BOUND_KINDS
    _checks: tuple = DEFAULT_CHECKS
    _output_path: Optional[str] = None
    _format: str = "csv"
    _x_grid: tuple = ()
    _figure: Optional[str] = None
    _rho: Optional[float] = None
    _mu: float = DEFAULT_MU
    _verify: VerifyConfig = VerifyConfig()

    def __init__(
        self,
        command: str,
        model: Optional[TandemSpec] = None,
        sim: Optional[SimConfig] = None,
        config_filename: Optional[str] = None,
    ):
        self._config_filename = config_filename
        self.command = command
        self.model = model
        self.sim = sim

    @classmethod
    def from_dict(cls, data: dict, config_filename: Optional[str] = None) -> "ConfigController":
        """
        Raises:
            InvalidConfigException: If a field cannot be parsed.
        """
        try:
            obj = cls(
                data.get("command", "bound"),
                TandemSpec.from_dict(data["model"]) if data.get("model") else None,
                SimConfig.from_dict(data["sim"]) if data.get("sim") else None,
                config_filename=config_filename,
            )
            if "bound_kinds" in data:
                obj.bound_kinds = tuple(data["bound_kinds"])
            if "checks" in data:
                obj.checks = tuple(data["checks"])
            obj.output_path = data.get("output_path")
            obj.format = data.get("format", "csv")
            obj.x_grid = tuple(float(x) for x in data.get("x_grid", ()))
            obj.figure = data.get("figure")
            if data.get("rho") is not None:
                obj.rho = float(data["rho"])
            obj.mu = float(data.get("mu", DEFAULT_MU))
            obj.verify = VerifyConfig.from_dict(data.get("verify", {}))
        except (KeyError, ValueError, TypeError, InvalidParameterException) as error:
            raise InvalidConfigException("config", str(error)) from error
        return obj

    @classmethod
    def load_from_file(cls, config_filename: str) -> "ConfigController":
        """
        Raises:
            InvalidConfigException: If the file is missing or malformed.
        """
        if not os.path.isfile(config_filename):
            raise InvalidConfigException("config", f"file '{config_filename}' not found")
        with open(config_filename, "r", encoding="utf-8") as file:
            try:
                data = json.load(file)
            except json.JSONDecodeError as error:
                raise InvalidConfigException("config", f"invalid JSON: {error}") from error
        if not isinstance(data, dict):
            raise InvalidConfigException("config", "the document must be a JSON object")
        return cls.from_dict(data, config_filename=config_filename)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "model": self.model.to_dict() if self.model is not None else None,
            "sim": self.sim.to_dict() if self.sim is not None else None,
            "bound_kinds": list(self.bound_kinds),
            "checks": list(self.checks),
            "output_path": self.output_path,
            "format": self.format,
            "x_grid": list(self.x_grid),
            "figure": self.figure,
            "rho": self.rho,
            "mu": self.mu,
            "verify": self.verify.to_dict(),
        }

    def save_to_file(self, config_filename: Optional[str] = None) -> None:
        filename = config_filename or self._config_filename
        if filename is None:
            raise ValueError("no configuration file name given")
        with open(filename, "w", encoding="utf-8") as file:
            dump_document(self.to_dict(), file)

    def apply_overrides(
        self,
        seed: Optional[int] = None,
        runs: Optional[int] = None,
        path_len: Optional[int] = None,
        rho: Optional[float] = None,
        output_path: Optional[str] = None,
        format: Optional[str] = None,
        bound_kinds: Optional[tuple] = None,
        checks: Optional[tuple] = None,
    ) -> None:
        """Applies command-line flags on top of the loaded file."""
        sim_changes = {
            name: value
            for name, value in (("seed", seed), ("runs", runs), ("path_len", path_len))
            if value is not None
        }
        if sim_changes:
            self.sim = replace(self.sim or SimConfig(), **sim_changes)
        if rho is not None:
            self.rho = rho
        if output_path is not None:
            self.output_path = output_path
        if format is not None:
            self.format = format
        if bound_kinds is not None:
            self.bound_kinds = bound_kinds
        if checks is not None:
            self.checks = checks

    def build(self) -> RunConfig:
        """
        Validates the collected settings into a RunConfig.

        The x grid is copied into the experiment, and a load override
        rescales the arrivals of the model (or restricts the figure sweep).

        Raises:
            InvalidConfigException: On missing or inconsistent settings.
            UnstableModelException: If the model is unstable.
        """
        model = self.model
        rhos = FIGURE_RHOS
        if self.rho is not None:
            if self.command == "figure":
                if not 0.0 < self.rho < 1.0:
                    raise InvalidConfigException("rho", "must lie in (0, 1)")
                rhos = (self.rho,)
            elif model is not None:
                model = with_load(model, self.rho)
        sim = self.sim
        if sim is None and self.command == "figure":
            sim = SimConfig()
        if sim is not None and self.x_grid:
            sim = replace(sim, x_grid=self.x_grid)
        return RunConfig(
            command=self.command,
            model=model,
            sim=sim,
            bound_kinds=self.bound_kinds,
            checks=self.checks,
            output_path=self.output_path,
            format=self.format,
            x_grid=self.x_grid,
            figure=self.figure,
            rhos=rhos,
            mu=self.mu,
            verify=self.verify,
        )

    @property
    def command(self) -> str:
        return self._command

    @command.setter
    def command(self, value: str) -> None:
        """
        Sets the command to run.

        Raises:
            TypeError: If the provided value is not a string.
        """
        if not isinstance(value, str):
            raise TypeError("command must be a string")
        self._command = value

    @property
    def model(self) -> Optional[TandemSpec]:
        return self._model

    @model.setter
    def model(self, value: Optional[TandemSpec]) -> None:
        if value is not None and not isinstance(value, TandemSpec):
            raise TypeError("model must be a TandemSpec")
        self._model = value

    @property
    def sim(self) -> Optional[SimConfig]:
        return self._sim

    @sim.setter
    def sim(self, value: Optional[SimConfig]) -> None:
        if value is not None and not isinstance(value, SimConfig):
            raise TypeError("sim must be a SimConfig")
        self._sim = value

    @property
    def bound_kinds(self) -> tuple:
        return self._bound_kinds

    @bound_kinds.setter
    def bound_kinds(self, value) -> None:
        if isinstance(value, str) or not all(isinstance(k, str) for k in value):
            raise TypeError("bound_kinds must be a sequence of strings")
        self._bound_kinds = tuple(value)

    @property
    def checks(self) -> tuple:
        return self._checks

    @checks.setter
    def checks(self, value) -> None:
        if isinstance(value, str) or not all(isinstance(c, str) for c in value):
            raise TypeError("checks must be a sequence of strings")
        self._checks = tuple(value)

    @property
    def output_path(self) -> Optional[str]:
        return self._output_path

    @output_path.setter
    def output_path(self, value: Optional[str]) -> None:
        if value is not None and not isinstance(value, str):
            raise TypeError("output_path must be a string")
        self._output_path = value

    @property
    def format(self) -> str:
        return self._format

    @format.setter
    def format(self, value: str) -> None:
        if not isinstance(value, str):
            raise TypeError("format must be a string")
        self._format = value

    @property
    def x_grid(self) -> tuple:
        return self._x_grid

    @x_grid.setter
    def x_grid(self, value) -> None:
        self._x_grid = tuple(float(x) for x in value)

    @property
    def figure(self) -> Optional[str]:
        return self._figure

    @figure.setter
    def figure(self, value: Optional[str]) -> None:
        if value is not None and not isinstance(value, str):
            raise TypeError("figure must be a string")
        self._figure = value

    @property
    def rho(self) -> Optional[float]:
        return self._rho

    @rho.setter
    def rho(self, value: Optional[float]) -> None:
        if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise TypeError("rho must be a number")
        self._rho = None if value is None else float(value)

    @property
    def mu(self) -> float:
        return self._mu

    @mu.setter
    def mu(self, value: float) -> None:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError("mu must be a number")
        self._mu = float(value)

    @property
    def verify(self) -> VerifyConfig:
        return self._verify

    @verify.setter
    def verify(self, value: VerifyConfig) -> None:
        if not isinstance(value, VerifyConfig):
            raise TypeError("verify must be a VerifyConfig")
        self._verify = value
