"""Tests for the frobforge command line."""

import json
from pathlib import Path

import pytest

from frobforge.main import EXIT_OK, EXIT_USAGE, build_parser, run


def _run(tmp_path: Path, *argv: str) -> int:
    return run([*argv, "--output-dir", str(tmp_path), "--log-dir", str(tmp_path / "logs")])


def test_unknown_flag_is_a_usage_error(tmp_path: Path) -> None:
    """Unknown flags exit with 2."""
    assert _run(tmp_path, "cone", "--bogus") == EXIT_USAGE


def test_misspelt_subcommand_gets_a_suggestion(capsys: pytest.CaptureFixture[str]) -> None:
    """Invalid choices name the closest subcommand."""
    assert run(["conee"]) == EXIT_USAGE
    assert "did you mean 'cone'" in capsys.readouterr().err


def test_help_exits_cleanly() -> None:
    """--help is not an error."""
    assert run(["--help"]) == EXIT_OK


def test_parser_defaults() -> None:
    """bhk runs its suite unless an action is given."""
    args = build_parser().parse_args(["bhk"])
    assert (args.action, args.polynomial, args.seed) == ("suite", None, None)


def test_bhk_analyze_quintic(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """The quintic summary is written and printed."""
    assert _run(tmp_path, "bhk", "analyze", "x1^5+x2^5+x3^5+x4^5+x5^5") == EXIT_OK
    data = json.loads((tmp_path / "bhk.analyze.json").read_text(encoding="utf-8"))
    assert data["cy"] is True
    assert data["autOrder"] == 3125
    assert '"cy":true' in capsys.readouterr().out


def test_bhk_dual(tmp_path: Path) -> None:
    """Dual group summary from semicolon-separated generators."""
    assert _run(tmp_path, "bhk", "dual", "x1^2+x2^4", "--group", "1/2,1/2") == EXIT_OK
    data = json.loads((tmp_path / "bhk.dual.json").read_text(encoding="utf-8"))
    assert data["dual"]["order"] == 4


@pytest.mark.parametrize(
    "argv",
    [
        ("bhk", "analyze"),
        ("bhk", "analyze", "2*x1^3"),
        ("bhk", "analyze", "x1^2+x1^2"),
        ("cone", "--tol", "nope=1"),
        ("cone", "--tol", "wdvv"),
    ],
)
def test_input_errors(tmp_path: Path, argv: tuple[str, ...]) -> None:
    """Bad polynomials and tolerance overrides exit with 2."""
    assert _run(tmp_path, *argv) == EXIT_USAGE


def test_cone_smoke(tmp_path: Path) -> None:
    """One real cone at smoke sizes passes and writes its report."""
    assert _run(tmp_path, "cone", "--field", "R", "--n", "2", "--smoke") == EXIT_OK
    report = json.loads((tmp_path / "cone.json").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert (tmp_path / "cone.timing.json").exists()
    assert (tmp_path / "logs" / "frobforge.log").exists()


def test_kvn_evolve(tmp_path: Path) -> None:
    """Harmonic snapshots are written as raw binaries with a summary report."""
    argv = ("kvn", "evolve", "--H", "harmonic", "--t", "1", "--snapshots", "3", "--grid", "32")
    assert _run(tmp_path, *argv) == EXIT_OK
    assert sorted(p.name for p in tmp_path.glob("kvn.evolve.*.bin")) == [
        "kvn.evolve.000.bin",
        "kvn.evolve.001.bin",
        "kvn.evolve.002.bin",
    ]
    report = json.loads((tmp_path / "kvn.evolve.json").read_text(encoding="utf-8"))
    assert report["passed"] is True


def test_kvn_mirror_demo(tmp_path: Path) -> None:
    """The demo writes its plan summary and the interpolation path as CSV."""
    assert _run(tmp_path, "kvn", "mirror-demo", "x1^3+x2^3", "--samples", "10") == EXIT_OK
    report = json.loads((tmp_path / "kvn.mirror.json").read_text(encoding="utf-8"))
    assert report["payload"]["demo"]["samples"] == 10
    assert (tmp_path / "kvn.mirror.path.csv").exists()
