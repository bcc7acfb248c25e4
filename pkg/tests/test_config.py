"""Tests for run configuration and report emission."""

import json
import math
from pathlib import Path

import pandas as pd
import pytest

from frobforge.utils.config import (
    DEFAULT_TOLERANCES,
    RunConfig,
    build_config,
    parse_tolerance,
    read_config_file,
)
from frobforge.utils.constants import OUTPUT_DIR_ENV_VAR, SEED_ENV_VAR
from frobforge.utils.errors import UsageError
from frobforge.utils.reporting import CheckResult, Report, canonical_json, emit_report
from frobforge.utils.sampling import rng, spawn


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    """Config file setting the seed, the grid and one tolerance."""
    path = tmp_path / "frobforge.cfg"
    path.write_text(
        "# reduced run\nseed = 7\ngrid=32\n\ntol.wdvv = 1e-8  # looser\nformat = json+csv\n",
        encoding="utf-8",
    )
    return path


def test_defaults() -> None:
    """Seed 42, JSON reports and the registered tolerances."""
    cfg = RunConfig()
    assert cfg.seed == 42
    assert cfg.report_format == "json"
    assert cfg.tol("wdvv") == DEFAULT_TOLERANCES["wdvv"]


def test_precedence(config_file: Path, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """Flags beat the config file, which beats the environment."""
    monkeypatch.setenv(SEED_ENV_VAR, "3")
    monkeypatch.setenv(OUTPUT_DIR_ENV_VAR, str(tmp_path / "env"))
    assert build_config().seed == 3
    cfg = build_config({"grid": 16, "seed": None}, config_file)
    assert cfg.seed == 7
    assert cfg.grid == 16
    assert cfg.output_dir == tmp_path / "env"
    assert cfg.report_format == "json+csv"
    assert cfg.tol("wdvv") == 1e-8
    flagged = build_config({"seed": 11, "tolerances": {"wdvv": 1e-6}}, config_file)
    assert (flagged.seed, flagged.tol("wdvv")) == (11, 1e-6)


def test_bad_environment_seed(monkeypatch: pytest.MonkeyPatch) -> None:
    """Non-integer seeds in the environment are usage errors."""
    monkeypatch.setenv(SEED_ENV_VAR, "many")
    with pytest.raises(UsageError):
        build_config()


def test_parse_tolerance() -> None:
    """name=value with a known name and a number."""
    assert parse_tolerance("torus = 1e-14") == ("torus", 1e-14)
    for spec in ("torus", "nope=1", "torus=small"):
        with pytest.raises(UsageError):
            parse_tolerance(spec)


def test_config_file_errors(tmp_path: Path) -> None:
    """Missing files, lines without '=' and unknown keys are refused."""
    with pytest.raises(UsageError):
        read_config_file(tmp_path / "missing.cfg")
    bad = tmp_path / "bad.cfg"
    bad.write_text("seed 7\n", encoding="utf-8")
    with pytest.raises(UsageError, match="bad.cfg:1"):
        read_config_file(bad)
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("colour = blue\n", encoding="utf-8")
    with pytest.raises(UsageError):
        build_config(config_file=unknown)


def test_run_config_validation() -> None:
    """Tolerances are positive and sizes sensible."""
    with pytest.raises(UsageError):
        RunConfig(tolerances={"wdvv": 0.0})
    with pytest.raises(UsageError):
        RunConfig(samples=0)
    with pytest.raises(UsageError):
        RunConfig(report_format="xml")


def test_with_overrides_merges_tolerances() -> None:
    """Overrides replace named tolerances and keep the rest."""
    cfg = RunConfig().with_overrides(smoke=True, tolerances={"torus": 1e-12})
    assert cfg.smoke
    assert cfg.tol("torus") == 1e-12
    assert cfg.tol("wdvv") == DEFAULT_TOLERANCES["wdvv"]


def test_streams_are_reproducible() -> None:
    """The same seed and stream give the same draws; streams differ."""
    assert rng(1, 2).normal() == rng(1, 2).normal()
    assert rng(1, 2).normal() != rng(1, 3).normal()
    a, b = spawn(5, 2)
    assert a.normal() != b.normal()


def test_check_status() -> None:
    """A residual passes at or below its tolerance; NaN fails."""
    assert CheckResult("a", 1e-9, 1e-9).passed
    assert not CheckResult("b", 2e-9, 1e-9).passed
    assert not CheckResult("c", math.nan, 1.0).passed
    assert CheckResult.boolean("d", ok=True).passed
    assert not CheckResult.failed("e", "raised").passed


def test_empty_report_passes() -> None:
    """A suite without checks passes."""
    assert Report("empty").passed


def test_canonical_json() -> None:
    """Sorted keys, fixed float format, null for non-finite values."""
    text = canonical_json({"b": [1.0, math.inf], "a": True, "c": None, "d": 3})
    assert text == '{"a":true,"b":[1.000000000000e+00,null],"c":null,"d":3}\n'
    assert json.loads(text)["b"] == [1.0, None]
    with pytest.raises(TypeError):
        canonical_json({"x": object()})


def test_emit_report(tmp_path: Path) -> None:
    """JSON report, CSV tables in json+csv mode and a timing sidecar."""
    report = Report("demo")
    report.add(CheckResult("ok", 0.0, 1e-10))
    report.tables["curve"] = pd.DataFrame({"t": [0.0, 1.0], "value": [1.0, 2.0]})
    cfg = RunConfig(output_dir=tmp_path, report_format="json+csv")
    written = emit_report(report, cfg)
    assert [p.name for p in written] == ["demo.json", "demo.curve.csv"]
    data = json.loads((tmp_path / "demo.json").read_text(encoding="utf-8"))
    assert data["passed"] is True
    assert data["tables"] == ["curve"]
    assert Report.from_dict(data).checks[0].name == "ok"
    assert (tmp_path / "demo.timing.json").exists()
    assert (tmp_path / "demo.curve.csv").read_text(encoding="utf-8").startswith("t,value\n")


def test_reports_are_identical_across_runs() -> None:
    """Wall time stays out of the canonical report."""
    first, second = Report("same"), Report("same")
    first.wall_time, second.wall_time = 1.0, 2.0
    assert canonical_json(first.to_dict()) == canonical_json(second.to_dict())
