"""Base class shared by the verification suites."""

import logging
import time
from collections.abc import Callable
from typing import ClassVar

import numpy as np
import pandas as pd

from frobforge.utils.config import RunConfig
from frobforge.utils.errors import FrobforgeError
from frobforge.utils.reporting import CheckResult, Report

logger = logging.getLogger(__name__)


class Suite:
    """A named list of check methods that fill one report."""

    name: ClassVar[str] = "suite"

    def __init__(self, cfg: RunConfig) -> None:
        self.cfg = cfg
        self.report = Report(self.name)
        self._rows: dict[str, list[dict[str, object]]] = {}

    def checks(self) -> list[Callable[[], None]]:
        """Check methods in execution order."""
        raise NotImplementedError

    def check(
        self, name: str, residual: float, tol_name: str, samples: int = 1, detail: str = ""
    ) -> CheckResult:
        """Record a residual check against a configured tolerance."""
        tol = self.cfg.tol(tol_name)
        result = CheckResult(name, float(residual), tol, samples, self.cfg.seed, detail)
        return self.report.add(result)

    def flag(self, name: str, ok: bool, samples: int = 1, detail: str = "") -> CheckResult:
        """Record a yes/no check."""
        return self.report.add(CheckResult.boolean(name, bool(ok), samples, self.cfg.seed, detail))

    def row(self, table: str, **values: object) -> None:
        """Append a row to a plot-ready table."""
        self._rows.setdefault(table, []).append(values)

    def run(self) -> Report:
        """Run every check; a check that raises is recorded as failed."""
        start = time.perf_counter()
        for check in self.checks():
            try:
                with np.errstate(all="ignore"):
                    check()
            except (FrobforgeError, ArithmeticError, np.linalg.LinAlgError) as e:
                logger.exception(f"[{self.name}] {check.__name__} raised")
                detail = f"{type(e).__name__}: {e}"
                self.report.add(CheckResult.failed(check.__name__, detail, self.cfg.seed))
        for table, rows in self._rows.items():
            self.report.tables[table] = pd.DataFrame(rows)
        self.report.wall_time = time.perf_counter() - start
        logger.info(
            f"[{self.name}] {sum(c.passed for c in self.report.checks)}/{len(self.report.checks)} "
            f"checks passed in {self.report.wall_time:.2f}s"
        )
        return self.report
