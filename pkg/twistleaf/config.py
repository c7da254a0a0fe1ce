"""Run settings and per-command configuration."""

from __future__ import annotations

import os
from fractions import Fraction
from pathlib import Path
from typing import Literal, Mapping, Optional

from pydantic import BaseModel, Field, field_validator

from .enums import Mode, OutputFormat
from .scalar import parse_rational

DEFAULT_SEED = 20240501
DEFAULT_SCENARIOS = 50
ENV_PREFIX = "TWISTLEAF_"

LogLevel = Literal["TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"]


class Tolerances(BaseModel):
    """Thresholds of the float checks; exact checks always compare with zero."""

    algebra: float = Field(default=1e-9, gt=0)  # identities in ∧²g
    group: float = Field(default=1e-8, gt=0)  # identities involving group products
    rank: float = Field(default=1e-7, gt=0)  # relative singular-value threshold
    point: float = Field(default=1e-10, gt=0)  # equations of Grassmannian points


class Settings(BaseModel):
    """Tolerances, worker count and logging shared by every command."""

    exact_tolerance: float = 0.0
    algebra_tolerance: float = Field(default=1e-9, gt=0)
    group_tolerance: float = Field(default=1e-8, gt=0)
    rank_tolerance: float = Field(default=1e-7, gt=0)
    point_tolerance: float = Field(default=1e-10, gt=0)
    seed: int = DEFAULT_SEED
    workers: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    log_level: LogLevel = "WARNING"

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper(cls, value: str) -> str:
        return value.upper() if isinstance(value, str) else value

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> Settings:
        """Settings with TWISTLEAF_* environment overrides applied."""
        environ = os.environ if environ is None else environ
        overrides = {}
        for field, name in (
            ("algebra_tolerance", "TOLERANCE"),
            ("group_tolerance", "GROUP_TOLERANCE"),
            ("rank_tolerance", "RANK_TOLERANCE"),
            ("point_tolerance", "POINT_TOLERANCE"),
            ("workers", "WORKERS"),
            ("seed", "SEED"),
            ("log_level", "LOG_LEVEL"),
        ):
            value = environ.get(ENV_PREFIX + name)
            if value not in (None, ""):
                overrides[field] = value
        return cls(**overrides)

    def tolerances(self) -> Tolerances:
        return Tolerances(
            algebra=self.algebra_tolerance,
            group=self.group_tolerance,
            rank=self.rank_tolerance,
            point=self.point_tolerance,
        )


class RunConfig(BaseModel):
    """One command invocation: the claim family and the instance it runs on."""

    command: str
    n: int = Field(ge=2, le=8)
    m_or_k: Optional[int] = Field(default=None, ge=1)
    l: Optional[int] = Field(default=None, ge=1)
    c: str = "1/3"  # kept as text; parsed exactly on use
    mode: Mode = Mode.EXACT
    samples: int = Field(default=20, ge=1)
    scenarios: int = Field(default=DEFAULT_SCENARIOS, ge=1)
    seed: int = DEFAULT_SEED
    tolerance: Optional[float] = Field(default=None, gt=0)
    group_tolerance: Optional[float] = Field(default=None, gt=0)
    rank_tolerance: Optional[float] = Field(default=None, gt=0)
    output: Optional[Path] = None
    output_format: OutputFormat = OutputFormat.JSON

    @field_validator("c")
    @classmethod
    def _rational(cls, value: str) -> str:
        return str(parse_rational(value))

    @property
    def rational_c(self) -> Fraction:
        return parse_rational(self.c)

    def tolerances(self, settings: Settings) -> Tolerances:
        """The settings' tolerances with this run's overrides on top."""
        overrides = {
            "algebra": self.tolerance,
            "group": self.group_tolerance,
            "rank": self.rank_tolerance,
        }
        return settings.tolerances().model_copy(
            update={key: value for key, value in overrides.items() if value is not None}
        )

    def report_config(self) -> dict:
        """JSON-safe view used for the run id; the output path is left out."""
        return self.model_dump(mode="json", exclude={"output"})
