"""Run configuration: one JSON document, overridden by command-line flags."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .analytic import GridSpec
from .cnn.train import TrainerConfig
from .datasets import MAX_N, MIX_RATIOS
from .evaluation import CriticalErrorConfig

DESK_UNIT = 10_000
DESK_IN_CONTROL = 1_000_000
PAPER_UNIT = 100_000
PAPER_IN_CONTROL = 100_000_000
REPLICATES = 100_000
DEFAULT_GRID = "sigma=1.1:7.0:0.1;mu=0.1:6.0:0.1"


class ConfigError(ValueError):
    """Invalid run configuration."""


def parse_int_list(text: str | None, allowed, name: str) -> tuple[int, ...]:
    """``"all"``, ``"3"`` or ``"1,2,4"`` into a sorted tuple of allowed values."""
    if text is None:
        return ()
    if str(text).strip().lower() == "all":
        return tuple(allowed)
    try:
        values = sorted({int(v) for v in str(text).split(",") if v.strip()})
    except ValueError:
        raise ConfigError(f"{name}: expected 'all' or comma-separated integers, got {text!r}") from None
    bad = [v for v in values if v not in allowed]
    if bad or not values:
        raise ConfigError(f"{name}: values must come from {tuple(allowed)}, got {text!r}")
    return tuple(values)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    a_list: tuple[int, ...] = (1,)
    n_list: tuple[int, ...] = (1,)
    unit: int = DESK_UNIT
    in_control_count: int = DESK_IN_CONTROL
    replicates: int = REPLICATES
    grid: str = DEFAULT_GRID
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    critical: CriticalErrorConfig = field(default_factory=CriticalErrorConfig)
    out: str = "results"
    workers: int = 1
    formats: tuple[str, ...] = ("csv",)

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        for a in self.a_list:
            if a not in MIX_RATIOS:
                raise ConfigError(f"a must come from {MIX_RATIOS}, got {a}")
        for n in self.n_list:
            if not 1 <= n <= MAX_N:
                raise ConfigError(f"n must lie in 1..{MAX_N}, got {n}")
        if self.unit < 1 or self.in_control_count < 1 or self.replicates < 1:
            raise ConfigError("unit and test set sizes must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        bad = set(self.formats) - {"csv", "binary"}
        if bad or not self.formats:
            raise ConfigError(f"formats must be a subset of csv, binary; got {self.formats}")
        try:
            GridSpec.parse(self.grid)
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None

    @property
    def grid_spec(self) -> GridSpec:
        return GridSpec.parse(self.grid)

    @property
    def out_dir(self) -> Path:
        return Path(self.out)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["a_list"] = list(self.a_list)
        d["n_list"] = list(self.n_list)
        d["formats"] = list(self.formats)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown configuration keys: {sorted(extra)}")
        data = dict(data)
        try:
            if "trainer" in data:
                data["trainer"] = TrainerConfig(**data["trainer"])
            if "critical" in data:
                data["critical"] = CriticalErrorConfig(**data["critical"])
            for key in ("a_list", "n_list", "formats"):
                if key in data:
                    data[key] = tuple(data[key])
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must hold a JSON object")
        return cls.from_dict(data)

    def override(self, **changes) -> "RunConfig":
        """Copy with every non-None keyword applied; trainer fields use a
        ``trainer_`` prefix."""
        trainer = {k[len("trainer_"):]: v for k, v in changes.items()
                   if k.startswith("trainer_") and v is not None}
        plain = {k: v for k, v in changes.items() if not k.startswith("trainer_") and v is not None}
        try:
            if trainer:
                plain["trainer"] = replace(self.trainer, **trainer)
            return replace(self, **plain)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def paper_scale(self) -> "RunConfig":
        return replace(self, unit=PAPER_UNIT, in_control_count=PAPER_IN_CONTROL)
