"""frobforge command line: run verification suites and the exact/transport demos."""

import argparse
import logging
import re
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from rapidfuzz import process

from frobforge.bhk import suite as bhk_suite
from frobforge.bhk.analysis import analyze, dual
from frobforge.bhk.parser import parse
from frobforge.cones import suite as cone_suite
from frobforge.cones.models.cone_point import GroundField
from frobforge.hessian import suite as hessian_suite
from frobforge.hessian.families import load_potential_spec
from frobforge.kvn import suite as kvn_suite
from frobforge.kvn.liouville import center_of_mass, density_projection, evolve_snapshots
from frobforge.kvn.mirror import DEFAULT_SAMPLES, mirror_transport_demo
from frobforge.kvn.models.wave import Hamiltonian, WaveField
from frobforge.transport import suite as transport_suite
from frobforge.transport.io import write_density_binary
from frobforge.utils.config import RunConfig, build_config, parse_tolerance
from frobforge.utils.errors import FrobforgeError, ReportIOError
from frobforge.utils.logging import setup_logging
from frobforge.utils.reporting import CheckResult, Report, canonical_json, emit_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

SUITES: dict[str, Callable[[RunConfig], Report]] = {
    "hessian": hessian_suite.run,
    "cone": cone_suite.run,
    "ma": transport_suite.run_ma,
    "ot": transport_suite.run_ot,
    "bhk": bhk_suite.run,
    "kvn": kvn_suite.run,
}
INVALID_CHOICE = re.compile(r"invalid choice: '([^']*)' \(choose from (.*)\)")


class _Parser(argparse.ArgumentParser):
    """Argument parser whose invalid-choice errors suggest the closest choice."""

    def error(self, message: str) -> None:  # type: ignore[override]
        found = INVALID_CHOICE.search(message)
        if found:
            options = [c.strip(" '") for c in found.group(2).split(",")]
            match = process.extractOne(found.group(1), options, score_cutoff=60)
            if match:
                message += f" (did you mean {match[0]!r}?)"
        super().error(message)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default 42)")
    common.add_argument("--output-dir", type=Path, default=None, help="report directory")
    common.add_argument(
        "--format", dest="report_format", choices=("json", "json+csv"), default=None
    )
    common.add_argument("--config", type=Path, default=None, help="key=value config file")
    common.add_argument(
        "--tol",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override a named tolerance (repeatable)",
    )
    common.add_argument("--grid", type=int, default=None, help="grid nodes per axis")
    common.add_argument("--samples", type=int, default=None, help="random samples per check")
    common.add_argument("--smoke", action="store_true", default=None, help="reduced sizes")
    common.add_argument("--parallel", action="store_true", default=None, help="suites in parallel")
    common.add_argument("--log-dir", type=Path, default=Path("./logs"))
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Parser for every subcommand."""
    common = _common_flags()
    parser = _Parser(prog="frobforge", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    hessian = sub.add_parser("hessian", parents=[common], help="Hessian and WDVV checks")
    hessian.add_argument("--potential", type=Path, action="append", default=[])

    cone = sub.add_parser("cone", parents=[common], help="symmetric cone checks")
    cone.add_argument("--field", choices=[f.value for f in GroundField], default=None)
    cone.add_argument("--n", type=int, default=2)

    sub.add_parser("ma", parents=[common], help="Monge-Ampere solver checks")
    sub.add_parser("ot", parents=[common], help="optimal transport checks")

    bhk = sub.add_parser("bhk", parents=[common], help="invertible polynomials")
    bhk.add_argument("action", nargs="?", choices=("suite", "analyze", "dual"), default="suite")
    bhk.add_argument("polynomial", nargs="?")
    bhk.add_argument("--group", default="", help="generators such as '1/3,0;0,1/2'")

    kvn = sub.add_parser("kvn", parents=[common], help="Liouville dynamics and fibration")
    kvn.add_argument(
        "action", nargs="?", choices=("suite", "evolve", "mirror-demo"), default="suite"
    )
    kvn.add_argument("polynomial", nargs="?")
    kvn.add_argument("--H", dest="hamiltonian", default="harmonic")
    kvn.add_argument("--t", dest="time", type=float, default=1.0)
    kvn.add_argument("--snapshots", type=int, default=5)
    kvn.add_argument("--method", choices=("exact-lp", "sinkhorn"), default="exact-lp")

    sub.add_parser("all", parents=[common], help="every suite at smoke sizes")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    tolerances = dict(parse_tolerance(spec) for spec in args.tol)
    flags: dict[str, Any] = {
        "subcommand": args.subcommand,
        "seed": args.seed,
        "output_dir": args.output_dir,
        "report_format": args.report_format,
        "grid": args.grid,
        "samples": args.samples,
        "smoke": args.smoke,
        "parallel": args.parallel,
        "tolerances": tolerances,
    }
    return build_config(flags, args.config)


def _write_json(cfg: RunConfig, name: str, data: dict[str, Any]) -> Path:
    text = canonical_json(data)
    path = Path(cfg.output_dir) / f"{name}.json"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ReportIOError(f"Cannot write {path}: {e}") from e
    sys.stdout.write(text)
    return path


def _run_named(name: str, cfg: RunConfig) -> Report:
    return SUITES[name](cfg)


def _finish(reports: Sequence[Report], cfg: RunConfig) -> int:
    for report in reports:
        emit_report(report, cfg)
    failed = [r.suite for r in reports if not r.passed]
    if failed:
        logger.error(f"Failed suites: {', '.join(failed)}")
        return EXIT_FAILED
    return EXIT_OK


def _run_all(cfg: RunConfig) -> int:
    cfg = cfg.with_overrides(smoke=True)
    if cfg.parallel:
        with ProcessPoolExecutor() as pool:
            futures = [pool.submit(_run_named, name, cfg) for name in SUITES]
            reports = [f.result() for f in futures]
    else:
        reports = [_run_named(name, cfg) for name in SUITES]
    return _finish(reports, cfg)


def _run_bhk(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.action == "suite":
        return _finish([bhk_suite.run(cfg)], cfg)
    if not args.polynomial:
        raise argparse.ArgumentTypeError(f"bhk {args.action} needs a polynomial")
    if args.action == "analyze":
        _write_json(cfg, "bhk.analyze", analyze(args.polynomial))
    else:
        _write_json(cfg, "bhk.dual", dual(args.polynomial, args.group))
    return EXIT_OK


def _kvn_evolve(args: argparse.Namespace, cfg: RunConfig) -> int:
    H = Hamiltonian.by_name(args.hamiltonian)
    grid = kvn_suite.phase_grid(cfg.grid)
    psi = WaveField.gaussian_packet(grid, kvn_suite.PACKET_CENTER, kvn_suite.PACKET_WIDTH)
    times = np.linspace(0.0, args.time, max(2, args.snapshots))
    report = Report("kvn.evolve")
    rows = []
    tol_name = "harmonic" if H.omega is not None else "norm"
    out_dir = Path(cfg.output_dir)
    for k, (t, field) in enumerate(zip(times, evolve_snapshots(psi, H, times), strict=True)):
        rho = density_projection(field)
        path = write_density_binary(rho, out_dir / f"kvn.evolve.{k:03d}.bin")
        q, p = center_of_mass(rho)
        drift = abs(field.norm2 - psi.norm2)
        report.add(CheckResult(f"norm[t={t:g}]", drift, cfg.tol(tol_name), 1, cfg.seed))
        rows.append(
            {"index": k, "t": float(t), "mass": rho.total, "q": q, "p": p, "file": path.name}
        )
    report.tables["snapshots"] = pd.DataFrame(rows)
    return _finish([report], cfg)


def _kvn_mirror(args: argparse.Namespace, cfg: RunConfig) -> int:
    if not args.polynomial:
        raise argparse.ArgumentTypeError("kvn mirror-demo needs a polynomial")
    samples = cfg.samples if args.samples is not None else DEFAULT_SAMPLES
    demo = mirror_transport_demo(parse(args.polynomial), cfg.seed, samples, method=args.method)
    report = Report("kvn.mirror")
    tol = cfg.tol("mirror_marginal")
    report.add(CheckResult("plan_marginals", demo.marginal_error, tol, samples, cfg.seed))
    report.payload["demo"] = demo.to_dict()
    report.tables["path"] = demo.path
    return _finish([report], cfg.with_overrides(report_format="json+csv"))


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the requested command and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    setup_logging(args.log_dir, logging.DEBUG if args.verbose else logging.INFO)

    try:
        cfg = _config(args)
        if args.subcommand == "all":
            return _run_all(cfg)
        if args.subcommand == "hessian":
            extra = tuple(load_potential_spec(path) for path in args.potential)
            return _finish([hessian_suite.run(cfg, extra)], cfg)
        if args.subcommand == "cone":
            fields = (GroundField(args.field),) if args.field else None
            return _finish([cone_suite.run(cfg, fields, args.n)], cfg)
        if args.subcommand == "bhk":
            return _run_bhk(args, cfg)
        if args.subcommand == "kvn":
            if args.action == "evolve":
                return _kvn_evolve(args, cfg)
            if args.action == "mirror-demo":
                return _kvn_mirror(args, cfg)
        return _finish([SUITES[args.subcommand](cfg)], cfg)
    except (ValueError, argparse.ArgumentTypeError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except FrobforgeError:
        logger.exception(f"{args.subcommand} failed")
        return EXIT_FAILED


def main() -> int:
    """Console entry point."""
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
