"""Testing utilities."""

from pathlib import Path

import numpy as np
import pytest

from frobforge.utils.config import RunConfig
from frobforge.utils.reporting import Report

slow = pytest.mark.slow


def smoke_config(tmp_path: Path, **changes: object) -> RunConfig:
    """Smoke-tier configuration writing into ``tmp_path``."""
    return RunConfig(output_dir=tmp_path, smoke=True).with_overrides(**changes)


def failed_checks(report: Report) -> list[str]:
    """Names and residuals of the failed checks, for assertion messages."""
    return [
        f"{c.name}: {c.residual:.3e} > {c.tolerance:.1e} {c.detail}"
        for c in report.checks
        if not c.passed
    ]


def random_spd(n: int, gen: np.random.Generator) -> np.ndarray:
    """Well-conditioned symmetric positive-definite matrix."""
    B = gen.normal(size=(n, n))
    return B @ B.T / n + 0.5 * np.eye(n)
