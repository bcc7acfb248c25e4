"""Run configuration assembled from defaults, environment, config file and flags."""

import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from frobforge.utils import constants
from frobforge.utils.errors import UsageError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES: dict[str, float] = {
    "structural": constants.STRUCTURAL_TOL,
    "oracle": constants.ORACLE_TOL,
    "fd_pipeline": constants.FD_PIPELINE_TOL,
    "flat": constants.FLAT_TOL,
    "wdvv": constants.WDVV_TOL,
    "sectional": constants.SECTIONAL_TOL,
    "jordan": constants.JORDAN_TOL,
    "gauss": constants.GAUSS_TOL,
    "geodesy": constants.GEODESY_TOL,
    "bracket": constants.BRACKET_TOL,
    "geodesic_rk4": constants.GEODESIC_RK4_TOL,
    "embedding": constants.EMBEDDING_TOL,
    "ma_residual": constants.MA_RELATIVE_RESIDUAL,
    "ma_exact": constants.MA_EXACT_TOL,
    "marginal_sinkhorn": constants.MARGINAL_TOL_SINKHORN,
    "marginal_lp": constants.MARGINAL_TOL_LP,
    "mass": constants.MASS_TOL,
    "caffarelli": constants.CAFFARELLI_TOL,
    "linear_map_rms": constants.LINEAR_MAP_RMS,
    "lp_vs_sinkhorn": constants.LP_VS_SINKHORN_TOL,
    "interpolation": constants.INTERPOLATION_RMS,
    "norm": constants.NORM_TOL,
    "inner": constants.INNER_TOL,
    "harmonic": constants.HARMONIC_TOL,
    "torus": constants.TORUS_TOL,
    "commutation": constants.COMMUTATION_TOL,
    "harmonic_return": constants.HARMONIC_RETURN_TOL,
    "pendulum_norm": constants.PENDULUM_NORM_TOL,
    "partials": constants.PARTIALS_TOL,
    "mirror_cost": constants.MIRROR_COST_TOL,
    "mirror_marginal": constants.MIRROR_MARGINAL_TOL,
    "root": constants.ROOT_TOL,
}


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every suite of a single run."""

    subcommand: str = "all"
    seed: int = constants.DEFAULT_SEED
    output_dir: Path = Path(constants.DEFAULT_OUTPUT_DIR)
    report_format: str = "json"
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    grid: int = 64
    samples: int = 20
    smoke: bool = False
    parallel: bool = False

    def __post_init__(self) -> None:
        """Validate the configuration."""
        bad = {name: tol for name, tol in self.tolerances.items() if not tol > 0}
        if bad:
            raise UsageError(f"Tolerances must be positive: {bad}")
        if self.samples < 1 or self.grid < 4:
            raise UsageError("samples must be >= 1 and grid >= 4")
        if self.report_format not in constants.REPORT_FORMATS:
            raise UsageError(f"Unknown report format {self.report_format!r}")

    def tol(self, name: str) -> float:
        """Return the tolerance registered under ``name``."""
        return self.tolerances[name]

    def with_overrides(self, **changes: Any) -> "RunConfig":
        """Return a copy with the given fields replaced."""
        tolerances = changes.pop("tolerances", None)
        if tolerances:
            changes["tolerances"] = {**self.tolerances, **tolerances}
        return replace(self, **changes)


def parse_tolerance(spec: str) -> tuple[str, float]:
    """Parse a ``name=value`` tolerance override."""
    name, sep, value = spec.partition("=")
    if not sep:
        raise UsageError(f"Tolerance override {spec!r} is not of the form name=value")
    name = name.strip()
    if name not in DEFAULT_TOLERANCES:
        raise UsageError(f"Unknown tolerance {name!r}")
    try:
        return name, float(value)
    except ValueError as e:
        raise UsageError(f"Tolerance {name!r} has non-numeric value {value!r}") from e


def read_config_file(path: Path | str) -> dict[str, str]:
    """Read a key=value config file; blank lines and ``#`` comments are skipped."""
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"Cannot read config file {path}: {e}") from e
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        entries[key.strip().replace("-", "_")] = value.strip()
    return entries


_ALIASES = {"format": "report_format", "output": "output_dir"}


def _coerce(name: str, value: str) -> Any:
    known = {f.name: f for f in fields(RunConfig)}
    if name not in known:
        raise UsageError(f"Unknown config key {name!r}")
    try:
        if name in ("seed", "grid", "samples"):
            return int(value)
        if name in ("smoke", "parallel"):
            return value.lower() in ("1", "true", "yes", "on")
        if name == "output_dir":
            return Path(value)
    except ValueError as e:
        raise UsageError(f"Config key {name!r} has invalid value {value!r}") from e
    return value


def build_config(
    flags: dict[str, Any] | None = None, config_file: Path | str | None = None
) -> RunConfig:
    """Merge defaults < environment < config file < flags into a RunConfig."""
    merged: dict[str, Any] = {}
    tolerances = dict(DEFAULT_TOLERANCES)

    env_seed = os.getenv(constants.SEED_ENV_VAR)
    if env_seed:
        try:
            merged["seed"] = int(env_seed)
        except ValueError as e:
            raise UsageError(f"{constants.SEED_ENV_VAR} must be an integer") from e
    env_out = os.getenv(constants.OUTPUT_DIR_ENV_VAR)
    if env_out:
        merged["output_dir"] = Path(env_out)

    if config_file is not None:
        for key, value in read_config_file(config_file).items():
            if key.startswith("tol."):
                name, tol = parse_tolerance(f"{key[4:]}={value}")
                tolerances[name] = tol
            else:
                key = _ALIASES.get(key, key)
                merged[key] = _coerce(key, value)

    for key, value in (flags or {}).items():
        if value is None:
            continue
        if key == "tolerances":
            tolerances.update(value)
        else:
            merged[key] = value

    logger.debug(f"Run configuration: {merged}")
    return RunConfig(tolerances=tolerances, **merged)
