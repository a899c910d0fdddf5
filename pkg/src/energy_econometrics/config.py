"""Configuration management using Pydantic Settings.

Runtime settings come from ``config.yml`` (hyphenated keys) with
``ENERGY_ECON_`` environment overrides. The analysis itself is described by
a separate YAML document parsed into :class:`AnalysisConfig`.
"""

from __future__ import annotations

import hashlib
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError, IoFailure
from .series import Deterministic
from .unit_root import LagSelection


class Settings(BaseSettings):
    """Application settings with YAML and environment variable support."""

    model_config = SettingsConfigDict(
        env_prefix="ENERGY_ECON_",
        env_file=".env",
        extra="ignore",
    )

    # Stored reports
    reports_dir: Path = Field(default=Path("reports"), description="Directory holding emitted reports")

    # Simulated critical values
    cache_dir: Path = Field(default=Path(".cv-cache"), description="Directory of cached Monte Carlo surfaces")

    # Analysis run by `run` without an explicit config and by POST /analysis/run
    analysis_config: Path | None = Field(default=None)

    workers: int = Field(default=1, ge=1)
    log_level: str = Field(default="INFO")

    # Server settings
    host: str = Field(default="127.0.0.1")
    port: int = Field(default=8046)
    reload: bool = Field(default=False)

    config_file: Path | None = Field(default=None, validation_alias="ENERGY_ECON_CONFIG")

    @model_validator(mode="after")
    def load_yaml_config(self) -> Settings:
        """Load overrides from the YAML file when it exists."""
        config_path = self.config_file or Path("config.yml")

        if config_path.exists():
            with open(config_path, encoding="utf-8") as f:
                doc = yaml.safe_load(f)
                if doc:
                    # Map YAML keys to settings (hyphenated keys)
                    if "reports-dir" in doc:
                        self.reports_dir = Path(doc["reports-dir"])
                    if "cache-dir" in doc:
                        self.cache_dir = Path(doc["cache-dir"])
                    if "analysis-config" in doc:
                        self.analysis_config = Path(doc["analysis-config"])
                    if "workers" in doc:
                        self.workers = int(doc["workers"])
                    if "log-level" in doc:
                        self.log_level = str(doc["log-level"]).upper()
                    if "host" in doc:
                        self.host = doc["host"]
                    if "port" in doc:
                        self.port = int(doc["port"])
                    if "reload" in doc:
                        self.reload = bool(doc["reload"])

        return self


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


# ============== Analysis configuration ==============


def _hyphenate(name: str) -> str:
    return name.replace("_", "-")


class ConfigModel(BaseModel):
    model_config = ConfigDict(alias_generator=_hyphenate, populate_by_name=True, extra="forbid", frozen=True)


class DataConfig(ConfigModel):
    path: Path
    # series name -> CSV column
    columns: dict[str, str]
    log: bool = True
    metadata: Path | None = None

    @field_validator("columns")
    @classmethod
    def _not_empty(cls, value: dict[str, str]) -> dict[str, str]:
        if not value:
            raise ValueError("at least one column must be mapped")
        return value


class VariablesConfig(ConfigModel):
    response: str
    regressors: list[str]
    labels: dict[str, str] = Field(default_factory=dict)


TestName = Literal["adf", "pp", "perron", "zivot-andrews", "lumsdaine-papell", "clemente"]


class UnitRootTestConfig(ConfigModel):
    test: TestName
    series: list[str]
    deterministic: str = "c"
    max_lag: int = Field(default=4, ge=0)
    selection: str = "aic"
    # Phillips-Perron
    bandwidth: int | None = Field(default=None, ge=0)
    bandwidth_rule: Literal["fixed", "automatic"] = "fixed"
    # break tests
    style: Literal["AO", "IO"] | None = None
    kind: Literal["intercept", "trend", "both"] | None = None
    break_year: int | None = None
    trim: float | None = Field(default=None, gt=0.0, lt=0.5)
    unresolved_only: bool = False

    @field_validator("deterministic")
    @classmethod
    def _deterministic(cls, value: str) -> str:
        if value == "auto":
            return value
        return Deterministic.from_string(value).value

    @field_validator("selection")
    @classmethod
    def _selection(cls, value: str) -> str:
        try:
            return str(LagSelection.parse(value))
        except ConfigError as exc:
            raise ValueError(str(exc)) from None

    @model_validator(mode="after")
    def _break_options(self) -> UnitRootTestConfig:
        if self.test == "perron" and (self.break_year is None or self.style is None or self.kind is None):
            raise ValueError("perron tests need style, kind and break-year")
        if self.test == "zivot-andrews" and self.kind is None:
            raise ValueError("zivot-andrews tests need a break kind")
        return self


class BreakConfiguration(ConfigModel):
    name: str
    breaks: list[int] = Field(default_factory=list)
    dummies: bool = True
    interactions: bool = True
    trend: bool = False
    lag_order: int | None = Field(default=None, ge=1)


class CointegrationConfig(ConfigModel):
    variables: list[str] | None = None
    deterministic: str = "c"
    max_lag: int = Field(default=2, ge=1)
    lag_criterion: Literal["aic", "sic", "hq"] = "sic"
    level: float = Field(default=0.90, gt=0.0, lt=1.0)
    interaction_form: Literal["ramp", "product"] = "ramp"
    configurations: list[BreakConfiguration] = Field(default_factory=list)


class DolsBreakConfig(ConfigModel):
    year: int
    intercept_dummy: bool = True
    trend_interaction: bool = True


class DolsModelConfig(ConfigModel):
    name: str
    breaks: list[DolsBreakConfig] = Field(default_factory=list)
    constant: bool = True
    trend: bool = True
    leads: int = Field(default=0, ge=0)
    lags: int = Field(default=1, ge=0)
    interaction_form: Literal["ramp", "product"] = "ramp"
    long_run_variance: Literal["bartlett", "iid"] = "bartlett"
    bandwidth: int | None = Field(default=None, ge=0)


class DolsConfig(ConfigModel):
    level: float = Field(default=0.95, gt=0.0, lt=1.0)
    unitary_band: float = Field(default=0.25, ge=0.0)
    models: list[DolsModelConfig] = Field(default_factory=list)


class CriticalValuesConfig(ConfigModel):
    # simulate levels the bundled two-break tables leave out, into the cache
    simulate_missing: bool = False
    replications: int = Field(default=2000, ge=1000)


class OutputConfig(ConfigModel):
    directory: Path = Path("reports")
    formats: list[Literal["text", "json", "csv_bundle"]] = Field(default_factory=lambda: ["text", "json"])


class AnalysisConfig(ConfigModel):
    name: str = "analysis"
    seed: int = 0
    level: float = Field(default=0.95, gt=0.0, lt=1.0)
    data: DataConfig
    variables: VariablesConfig
    unit_root: list[UnitRootTestConfig] = Field(default_factory=list)
    cointegration: CointegrationConfig | None = None
    dols: DolsConfig | None = None
    critical_values: CriticalValuesConfig = Field(default_factory=CriticalValuesConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    sha256: str = ""

    def series_name(self, variable: str) -> str:
        return f"ln{variable}" if self.data.log else variable

    @property
    def known_series(self) -> set[str]:
        return {self.series_name(v) for v in self.data.columns}

    @model_validator(mode="after")
    def _references(self) -> AnalysisConfig:
        variables = set(self.data.columns)
        for field_name, name in [("variables.response", self.variables.response)] + [
            (f"variables.regressors.{i}", v) for i, v in enumerate(self.variables.regressors)
        ]:
            if name not in variables:
                raise ConfigError(f"variable {name!r} is not a mapped data column", field_name)
        if self.variables.response in self.variables.regressors:
            raise ConfigError("the response cannot also be a regressor", "variables.regressors")
        known = self.known_series
        for i, test in enumerate(self.unit_root):
            for j, name in enumerate(test.series):
                if name not in known:
                    raise ConfigError(f"unknown series {name!r}; have {sorted(known)}", f"unit-root.{i}.series.{j}")
        if self.cointegration and self.cointegration.variables:
            for j, name in enumerate(self.cointegration.variables):
                if name not in known:
                    raise ConfigError(f"unknown series {name!r}", f"cointegration.variables.{j}")
        return self

    def break_year_fields(self) -> list[tuple[str, int]]:
        """Every configured year with the field path that holds it."""
        fields: list[tuple[str, int]] = []
        for i, test in enumerate(self.unit_root):
            if test.break_year is not None:
                fields.append((f"unit-root.{i}.break-year", test.break_year))
        if self.cointegration:
            for i, configuration in enumerate(self.cointegration.configurations):
                fields += [(f"cointegration.configurations.{i}.breaks.{j}", y) for j, y in enumerate(configuration.breaks)]
        if self.dols:
            for i, model in enumerate(self.dols.models):
                fields += [(f"dols.models.{i}.breaks.{j}.year", b.year) for j, b in enumerate(model.breaks)]
        return fields

    def check_years(self, first: int, last: int) -> None:
        """Break years must lie strictly inside the sample."""
        for field_name, year in self.break_year_fields():
            if not first < year < last:
                raise ConfigError(f"break year {year} outside the sample {first}-{last}", field_name)


def _field_path(error: dict) -> str:
    return ".".join(str(part) for part in error["loc"])


def parse_analysis_config(doc: dict, base_dir: Path, sha256: str = "") -> AnalysisConfig:
    try:
        config = AnalysisConfig.model_validate({**doc, "sha256": sha256})
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(first["msg"], _field_path(first)) from None
    data = config.data
    resolved = {"path": (base_dir / data.path).resolve()}
    if data.metadata is not None:
        resolved["metadata"] = (base_dir / data.metadata).resolve()
    return config.model_copy(update={"data": data.model_copy(update=resolved)})


def load_analysis_config(path: Path | str) -> AnalysisConfig:
    """Read and validate an analysis YAML; relative paths resolve against its directory."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read analysis config {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(raw.decode("utf-8"))
    except (yaml.YAMLError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path} is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} does not hold a mapping")
    return parse_analysis_config(doc, path.parent, hashlib.sha256(raw).hexdigest())


def bundled_config_path() -> Path:
    """The replication config shipped with the package."""
    return Path(str(resources.files("energy_econometrics.data").joinpath("replication.yml")))
