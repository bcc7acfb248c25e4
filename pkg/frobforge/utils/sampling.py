"""Counter-based random streams so serial and parallel runs draw identical samples."""

import numpy as np


def rng(seed: int, *stream: int) -> np.random.Generator:
    """Return an independent Philox generator for ``seed`` and a stream path."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def spawn(seed: int, count: int) -> list[np.random.Generator]:
    """Return ``count`` independent generators derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]
