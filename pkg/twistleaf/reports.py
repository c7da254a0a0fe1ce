"""Check and run reports with JSON and Markdown rendering."""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path
from typing import Any, Optional

from jinja2 import Environment, PackageLoader
from pydantic import BaseModel, ConfigDict, Field

from .enums import Mode, OutputFormat


def start_clock() -> float:
    return time.perf_counter()


def elapsed_millis(started: float) -> float:
    return round((time.perf_counter() - started) * 1000.0, 3)


class CheckReport(BaseModel):
    """Outcome of one verified claim.

    ``passed`` holds exactly when ``max_residual`` is within the tolerance
    the check ran with (0 for exact checks). Boolean claims report the
    number of mismatches as their residual.
    """

    model_config = ConfigDict(populate_by_name=True)

    claim: str
    mode: Mode = Mode.EXACT
    n: int
    m_or_k: Optional[int] = None
    c: Optional[str] = None
    samples: int = 1
    max_residual: float = 0.0
    passed: bool = Field(alias="pass")
    millis: float = 0.0
    tolerance: float = 0.0
    details: dict[str, Any] = Field(default_factory=dict)
    flags: list[str] = Field(default_factory=list)

    @classmethod
    def from_residual(
        cls,
        claim: str,
        residual: float,
        tolerance: float,
        *,
        started: Optional[float] = None,
        **fields: Any,
    ) -> CheckReport:
        """Build a report whose verdict is ``residual <= tolerance``."""
        millis = elapsed_millis(started) if started is not None else 0.0
        return cls(
            claim=claim,
            max_residual=float(residual),
            passed=bool(residual <= tolerance),
            tolerance=tolerance,
            millis=millis,
            **fields,
        )

    @property
    def key(self) -> tuple:
        row = self.details.get("l", 0)
        return (self.claim, self.n, self.m_or_k or 0, self.c or "", row)

    def to_dict(self, drop_timing: bool = False) -> dict[str, Any]:
        data = self.model_dump(mode="json", by_alias=True)
        if drop_timing:
            data.pop("millis", None)
        return data


class RunSummary(BaseModel):
    passed: int = 0
    failed: int = 0
    skipped: int = 0


class RunReport(BaseModel):
    """A set of check reports produced by one command invocation."""

    run_id: str
    config: dict[str, Any]
    claims: list[CheckReport] = Field(default_factory=list)
    summary: RunSummary = Field(default_factory=RunSummary)

    @classmethod
    def collect(
        cls, config: dict[str, Any], claims: list[CheckReport], skipped: int = 0
    ) -> RunReport:
        """Merge reports deterministically (sorted by claim key)."""
        ordered = sorted(claims, key=lambda report: report.key)
        passed = sum(1 for report in ordered if report.passed)
        return cls(
            run_id=run_id_for(config),
            config=config,
            claims=ordered,
            summary=RunSummary(
                passed=passed, failed=len(ordered) - passed, skipped=skipped
            ),
        )

    @property
    def all_passed(self) -> bool:
        return self.summary.failed == 0

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 1

    def to_json(self, drop_timing: bool = False) -> str:
        data = {
            "run_id": self.run_id,
            "config": self.config,
            "claims": [report.to_dict(drop_timing) for report in self.claims],
            "summary": self.summary.model_dump(),
        }
        return json.dumps(data, indent=2, sort_keys=True)

    def to_markdown(self) -> str:
        template = _environment().get_template("report.md.j2")
        return template.render(report=self)

    def write(
        self, path: Path, output_format: OutputFormat = OutputFormat.JSON
    ) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        if output_format is OutputFormat.MARKDOWN:
            path.write_text(self.to_markdown(), encoding="utf-8")
        else:
            path.write_text(self.to_json(), encoding="utf-8")
        return path


def run_id_for(config: dict[str, Any]) -> str:
    """Stable identifier derived from the canonical config JSON."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


_ENV: Optional[Environment] = None


def _environment() -> Environment:
    global _ENV
    if _ENV is None:
        _ENV = Environment(
            loader=PackageLoader("twistleaf", "templates"),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
    return _ENV
