"""Run configuration for the case-study pipeline"""

import json
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Union

import pydantic
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import ConfigError

# Load environment variables from .env file
load_dotenv()

OUTPUT_DIR_ENV = "LINFEAT_OUTPUT_DIR"
LOG_LEVEL_ENV = "LINFEAT_LOG_LEVEL"


class SynthConfig(BaseModel):
    """Parameters of the synthetic curve generator"""
    model_config = ConfigDict(extra="forbid")

    n: int = Field(40, ge=2, description="number of curves")
    p: int = Field(200, ge=1, description="grid points per curve")
    smoothness: float = Field(1.0, gt=0, description="bump width multiplier")
    rank: int = Field(5, ge=1, description="number of smooth basis curves")
    noise_std: float = Field(1e-4, ge=0, description="white-noise standard deviation")
    seed: int = Field(7, ge=0, description="generator seed")


class CsvSourceConfig(BaseModel):
    """A CSV export of curves (first row/column = grid coordinates)"""
    model_config = ConfigDict(extra="forbid")

    path: str
    layout: Literal["rows_are_samples", "columns_are_samples"] = "rows_are_samples"


class DataConfig(BaseModel):
    """Exactly one of csv / synth"""
    model_config = ConfigDict(extra="forbid")

    csv: Optional[CsvSourceConfig] = None
    synth: Optional[SynthConfig] = None

    @model_validator(mode="after")
    def exactly_one_source(self) -> "DataConfig":
        if (self.csv is None) == (self.synth is None):
            raise ValueError("exactly one of 'csv' or 'synth' must be given")
        return self


class FeatureConfig(BaseModel):
    """Feature name plus its parameters, e.g. {"feature": "sinusoidal", "period": 0.06}"""
    model_config = ConfigDict(extra="allow")

    feature: str = "sum_of_squares"

    def as_mapping(self) -> Dict[str, Any]:
        return self.model_dump()


class ResponseConfig(BaseModel):
    """Where y comes from: the feature itself, or a column of a CSV file"""
    model_config = ConfigDict(extra="forbid")

    mode: Literal["from_feature", "csv_column"] = "from_feature"
    path: Optional[str] = None
    column: Optional[Union[int, str]] = None

    @model_validator(mode="after")
    def exactly_one_mode(self) -> "ResponseConfig":
        if self.mode == "csv_column" and (self.path is None or self.column is None):
            raise ValueError("response mode 'csv_column' needs both 'path' and 'column'")
        if self.mode == "from_feature" and (self.path is not None or self.column is not None):
            raise ValueError("response mode 'from_feature' takes no 'path' or 'column'")
        return self


class RunConfig(BaseModel):
    """Everything one case-study run needs"""
    model_config = ConfigDict(extra="forbid")

    data: DataConfig
    split: Optional[str] = Field(None, description="JSON split sidecar; the train part is analysed")
    feature: FeatureConfig = Field(default_factory=FeatureConfig)
    response: ResponseConfig = Field(default_factory=ResponseConfig)
    objective: Literal["coefficient_distance", "prediction_distance"] = "coefficient_distance"
    lambda_range: Optional[Tuple[float, float]] = Field(
        None, description="absolute ridge search range; default [1e-10, 1e8]·s1²")
    grid_points: int = Field(200, ge=16, description="log-grid points of the ridge search")
    cv_grid_points: int = Field(60, ge=2, description="lambda values in the CV grid over [1e-8, 1e4]·s1²")
    folds: int = Field(10, ge=2, description="cross-validation folds")
    k_max: int = Field(10, ge=1, description="largest PLS component count searched")
    seed: int = Field(0, ge=0, description="fold-assignment seed")
    zscore: bool = Field(False, description="z-score columns before the analysis")
    workers: int = Field(1, ge=1, description="threads for CV folds")
    output_dir: str = Field(
        "output", description=f"output directory (${OUTPUT_DIR_ENV} overrides it, --output-dir overrides both)")

    @model_validator(mode="after")
    def range_is_ordered(self) -> "RunConfig":
        if self.lambda_range is not None:
            lo, hi = self.lambda_range
            if not 0 <= lo < hi:
                raise ValueError(f"lambda_range must satisfy 0 <= lo < hi, got {list(self.lambda_range)}")
        return self

    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir)


def _describe(error: pydantic.ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: Dict[str, Any]) -> RunConfig:
    """Validate a config mapping, naming offending fields on failure

    $LINFEAT_OUTPUT_DIR, when set, replaces the configured output directory.
    """
    try:
        config = RunConfig.model_validate(data)
    except pydantic.ValidationError as e:
        raise ConfigError(f"invalid config: {_describe(e)}") from e
    env_output_dir = os.getenv(OUTPUT_DIR_ENV)
    if env_output_dir:
        config.output_dir = env_output_dir
    return config


def load_config(path: Union[str, Path]) -> RunConfig:
    """Load a RunConfig from a JSON document"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    config = parse_config(data)
    # Relative data paths are relative to the config file
    base = path.parent
    if config.data.csv is not None and not Path(config.data.csv.path).is_absolute():
        config.data.csv.path = str(base / config.data.csv.path)
    if config.split is not None and not Path(config.split).is_absolute():
        config.split = str(base / config.split)
    if config.response.path is not None and not Path(config.response.path).is_absolute():
        config.response.path = str(base / config.response.path)
    return config


def config_defaults() -> str:
    """Human-readable defaults for --help"""
    lines = []
    for name, info in RunConfig.model_fields.items():
        if info.is_required():
            continue
        default = info.get_default(call_default_factory=True)
        if isinstance(default, BaseModel):
            default = default.model_dump()
        description = f"  ({info.description})" if info.description else ""
        lines.append(f"  {name} = {default!r}{description}")
    return "\n".join(lines)
