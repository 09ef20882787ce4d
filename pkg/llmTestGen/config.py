"""
Configuration of a generation run

Values are taken from (highest priority first): command line flags,
JSON config file, environment variables LLMTESTGEN_<FIELD>, defaults.
"""
from dataclasses import dataclass, field, fields, replace
from enum import Enum
import json
import os
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from llmTestGen.constants import DEFAULT_COMPILE_TIMEOUT, DEFAULT_EXECUTE_TIMEOUT, \
    DEFAULT_ITERATION_CAP, DEFAULT_MAX_IN_FLIGHT, DEFAULT_MAX_INVALID, DEFAULT_MODEL, \
    DEFAULT_TEMPERATURE, DEFAULT_TOKEN_BUDGET
from llmTestGen.errors import ConfigError
from llmTestGen.llm.cassette import CassetteMode

ENV_PREFIX = "LLMTESTGEN_"


class PipelineMode(Enum):
    # default prompt only
    BASIC = "basic"
    # intention prompt + generation prompt
    INTENTION = "intention"
    # intention + generation + iterative refinement of compilation errors
    FULL = "full"


@dataclass(frozen=True)
class RunConfig():
    """
    :ivar ~.classpath: jars for the plain compiler toolchain (JUnit, dependencies)
    :ivar ~.max_in_flight: limit of concurrent live chat requests
    :ivar ~.repeat: index of the repetition of the experiment,
        stored in the header of the results
    """
    project_path: Optional[Path] = None
    mode: PipelineMode = PipelineMode.FULL
    cassette_path: Optional[Path] = None
    cassette_mode: CassetteMode = CassetteMode.PASSTHROUGH
    model_name: str = DEFAULT_MODEL
    max_invalid: int = DEFAULT_MAX_INVALID
    hard_iteration_cap: int = DEFAULT_ITERATION_CAP
    parallelism: int = 1
    output_dir: Path = Path("out")
    token_budget: int = DEFAULT_TOKEN_BUDGET
    temperature: float = DEFAULT_TEMPERATURE
    compile_timeout: float = DEFAULT_COMPILE_TIMEOUT
    execute_timeout: float = DEFAULT_EXECUTE_TIMEOUT
    rerun_on_failure: int = 0
    classpath: Tuple[str, ...] = field(default_factory=tuple)
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT
    keep_workspaces: bool = False
    repeat: int = 0

    def __post_init__(self):
        if self.parallelism < 1:
            raise ConfigError("parallelism has to be >= 1", self.parallelism)
        if self.max_invalid < 1:
            raise ConfigError("max_invalid has to be >= 1", self.max_invalid)
        if self.hard_iteration_cap < 1:
            raise ConfigError("hard_iteration_cap has to be >= 1", self.hard_iteration_cap)
        if self.token_budget < 1:
            raise ConfigError("token_budget has to be >= 1", self.token_budget)
        if not (0.0 <= self.temperature <= 2.0):
            raise ConfigError("temperature has to be in [0, 2]", self.temperature)
        if self.max_in_flight < 1:
            raise ConfigError("max_in_flight has to be >= 1", self.max_in_flight)
        if self.rerun_on_failure < 0:
            raise ConfigError("rerun_on_failure has to be >= 0", self.rerun_on_failure)
        if self.cassette_mode != CassetteMode.PASSTHROUGH and self.cassette_path is None:
            raise ConfigError(f"cassette mode {self.cassette_mode.value:s} requires a cassette path")

    def replace(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _convert(name: str, value):
    """
    Convert the value from JSON or from the environment to the type of the field
    """
    default = _FIELDS[name].default
    try:
        if name in ("project_path", "cassette_path", "output_dir"):
            return None if value is None else Path(value)
        elif name == "mode":
            return PipelineMode(value)
        elif name == "cassette_mode":
            return CassetteMode(value)
        elif name == "classpath":
            if isinstance(value, str):
                value = value.split(os.pathsep)
            return tuple(str(v) for v in value if v)
        elif name == "keep_workspaces":
            if isinstance(value, str):
                return value.strip().lower() in ("1", "true", "yes", "on")
            return bool(value)
        elif isinstance(default, float):
            return float(value)
        elif isinstance(default, int):
            return int(value)
        return value
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value of {name:s}: {value!r} ({e})")


def from_env(environ: Mapping[str, str]) -> Dict[str, object]:
    res = {}
    for name in _FIELDS:
        v = environ.get(ENV_PREFIX + name.upper())
        if v is not None and v != "":
            res[name] = _convert(name, v)
    return res


def from_file(path: Path) -> Dict[str, object]:
    try:
        with Path(path).open(encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"can not read config file {path}: {e}")
    except ValueError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} has to contain an object")
    res = {}
    for k, v in data.items():
        if k not in _FIELDS:
            raise ConfigError(f"unknown config option {k!r} in {path}")
        res[k] = _convert(k, v)
    return res


def load_config(flags: Mapping[str, object], config_file: Optional[Path]=None,
                environ: Optional[Mapping[str, str]]=None) -> RunConfig:
    """
    Merge the configuration sources

    :param flags: values explicitly given on the command line
    """
    if environ is None:
        environ = os.environ
    values = {}
    values.update(from_env(environ))
    if config_file is not None:
        values.update(from_file(config_file))
    for k, v in flags.items():
        if k not in _FIELDS:
            raise ConfigError(f"unknown option {k!r}")
        values[k] = v
    return RunConfig(**values)
