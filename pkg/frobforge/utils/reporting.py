"""Verification reports and their canonical JSON/CSV emission."""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import pandas as pd

from frobforge import __version__
from frobforge.utils.constants import BOOLEAN_TOL, FLOAT_FORMAT, REPORT_SCHEMA_VERSION
from frobforge.utils.errors import ReportIOError

if TYPE_CHECKING:
    from frobforge.utils.config import RunConfig

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"


@dataclass
class CheckResult:
    """Outcome of one verification check."""

    name: str
    residual: float
    tolerance: float
    samples: int = 1
    seed: int | None = None
    detail: str = ""

    @property
    def status(self) -> str:
        """Pass iff the residual is finite and within tolerance."""
        return PASS if math.isfinite(self.residual) and self.residual <= self.tolerance else FAIL

    @property
    def passed(self) -> bool:
        """Whether the check passed."""
        return self.status == PASS

    @classmethod
    def boolean(
        cls, name: str, ok: bool, samples: int = 1, seed: int | None = None, detail: str = ""
    ) -> "CheckResult":
        """Record a yes/no check as residual 0 (true) or 1 (false)."""
        return cls(name, 0.0 if ok else 1.0, BOOLEAN_TOL, samples, seed, detail)

    @classmethod
    def failed(cls, name: str, detail: str, seed: int | None = None) -> "CheckResult":
        """Record a check that raised before producing a residual."""
        return cls(name, math.nan, BOOLEAN_TOL, 0, seed, detail)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "name": self.name,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "seed": self.seed,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CheckResult":
        """Create instance from dictionary."""
        residual = data.get("residual")
        return cls(
            name=data["name"],
            residual=math.nan if residual is None else float(residual),
            tolerance=float(data["tolerance"]),
            samples=int(data.get("samples", 1)),
            seed=data.get("seed"),
            detail=data.get("detail", ""),
        )


@dataclass
class Report:
    """All checks of one suite plus plot-ready tables."""

    suite: str
    checks: list[CheckResult] = field(default_factory=list)
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    payload: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__
    schema_version: int = REPORT_SCHEMA_VERSION

    def add(self, check: CheckResult) -> CheckResult:
        """Append a check, logging its outcome."""
        self.checks.append(check)
        log = logger.info if check.passed else logger.error
        log(
            f"[{self.suite}] {check.name}: {check.status} "
            f"(residual={check.residual:.3e}, tol={check.tolerance:.1e})"
        )
        return check

    @property
    def passed(self) -> bool:
        """True when every check passed; an empty suite passes."""
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary; wall time is kept out so reports diff cleanly."""
        return {
            "suite": self.suite,
            "version": self.version,
            "schema_version": self.schema_version,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            "tables": sorted(self.tables),
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Report":
        """Create instance from dictionary (tables are not restored)."""
        return cls(
            suite=data["suite"],
            checks=[CheckResult.from_dict(c) for c in data.get("checks", [])],
            payload=data.get("payload", {}),
            version=data.get("version", __version__),
            schema_version=int(data.get("schema_version", REPORT_SCHEMA_VERSION)),
        )


def _encode(obj: Any) -> str:
    if obj is None or obj is True or obj is False:
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_)):
        return json.dumps(bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return FLOAT_FORMAT % value if math.isfinite(value) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Path):
        return json.dumps(obj.as_posix())
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"Cannot encode {type(obj).__name__} in a report")


def canonical_json(obj: Any) -> str:
    """Serialize with sorted keys and ``%.12e`` floats; NaN and inf become null."""
    return _encode(obj) + "\n"


def emit_report(report: Report, cfg: "RunConfig") -> list[Path]:
    """Write the canonical report, optional CSV tables and the timing sidecar."""
    out_dir = Path(cfg.output_dir)
    written: list[Path] = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        report_path = out_dir / f"{report.suite}.json"
        report_path.write_text(canonical_json(report.to_dict()), encoding="utf-8")
        written.append(report_path)

        if cfg.report_format == "json+csv":
            for name in sorted(report.tables):
                csv_path = out_dir / f"{report.suite}.{name}.csv"
                report.tables[name].to_csv(
                    csv_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
                )
                written.append(csv_path)

        timing_path = out_dir / f"{report.suite}.timing.json"
        timing_path.write_text(
            json.dumps({"suite": report.suite, "wall_time_s": report.wall_time}) + "\n",
            encoding="utf-8",
        )
    except OSError as e:
        logger.exception(f"Failed writing report for suite {report.suite}")
        raise ReportIOError(f"Cannot write report to {out_dir}: {e}") from e
    else:
        logger.info(f"Report for {report.suite} written to {report_path}")
        return written
