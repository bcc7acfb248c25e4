"""logging.py - Logging setup for command-line runs."""

import logging
from pathlib import Path

LOG_FILE = "frobforge.log"
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def setup_logging(log_dir: Path | str = "./logs", level: int = logging.INFO) -> logging.Logger:
    """Send records to ``<log_dir>/frobforge.log`` and stderr.

    Replaces handlers from a previous call, so each run in a process logs where it was told to.
    """
    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=[
            logging.FileHandler(log_dir / LOG_FILE, encoding="utf-8"),
            logging.StreamHandler(),
        ],
        force=True,
    )
    # solver internals are noisy at DEBUG
    logging.getLogger("ot").setLevel(max(level, logging.INFO))
    return logging.getLogger(__name__)
