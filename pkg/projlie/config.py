"""
Run configuration: a TOML file validated by the DRF serializers in projlie.serializers.

    seed = 42
    samples = 100

    [tolerances]
    metrizability = 1e-9

    [[case]]
    id = "3d"

    [[case]]
    id = "1c"
    nu = 0.5
"""

import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace

from projlie.catalog import CaseParams
from projlie.exceptions import ConfigError
from projlie.serializers import RunConfigSerializer
from projlie.suites import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CaseSpec:
    id: str
    params: CaseParams = field(default_factory=CaseParams)
    functions: dict = field(default_factory=lambda: {"X": "tan", "Y": "exp", "h": "tan"})


@dataclass(frozen=True)
class RunConfig:
    cases: list
    seed: int = 0
    samples: int = 100
    geodesic_starts: int = 20
    killing_samples: int = 50
    out: str = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def tolerance(self, check):
        return self.tolerances[check]

    def with_overrides(self, seed=None, out=None):
        return replace(
            self,
            seed=self.seed if seed is None else seed,
            out=self.out if out is None else out,
        )


def _flatten_errors(errors, prefix=""):
    if isinstance(errors, dict):
        return [line for key, value in errors.items() for line in _flatten_errors(value, f"{prefix}{key}.")]
    if isinstance(errors, list):
        lines = []
        for i, value in enumerate(errors):
            nested = isinstance(value, (dict, list)) and value
            lines.extend(_flatten_errors(value, f"{prefix}{i}.") if nested else [f"{prefix.rstrip('.')}: {value}"])
        return lines
    return [f"{prefix.rstrip('.')}: {errors}"]


def parse_config(data):
    """Validate a config mapping; DRF validation errors become ConfigError."""
    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError("Invalid run configuration:\n  " + "\n  ".join(_flatten_errors(serializer.errors)))
    validated = serializer.validated_data
    cases = [
        CaseSpec(case["id"], case["params"], {key: case[key] for key in ("X", "Y", "h")})
        for case in validated["case"]
    ]
    return RunConfig(
        cases=cases,
        seed=validated["seed"],
        samples=validated["samples"],
        geodesic_starts=validated["geodesic_starts"],
        killing_samples=validated["killing_samples"],
        out=validated["out"],
        tolerances={**DEFAULT_TOLERANCES, **validated["tolerances"]},
    )


def load_config(path):
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise ConfigError(f"Cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"Config {path} is not valid TOML: {exc}") from exc
    config = parse_config(data)
    logger.info("Loaded config %s: %d cases, seed %d", path, len(config.cases), config.seed)
    return config


def cases_config(case_ids, **params):
    """The config of a command run on named cases without a config file."""
    return parse_config({"case": [{"id": case_id, **params} for case_id in case_ids]})
