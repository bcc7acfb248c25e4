"""JSON summaries behind ``frobforge bhk analyze`` and ``frobforge bhk dual``."""

import logging
from typing import Any

from frobforge.bhk.classifier import classify_atomic
from frobforge.bhk.groups import DiagonalGroup, aut_group, dual_group, j_element, sl_check
from frobforge.bhk.models.polynomial import PhaseVector, format_fraction
from frobforge.bhk.parser import parse
from frobforge.bhk.weights import calabi_yau_check, weights
from frobforge.utils.errors import ParseError

logger = logging.getLogger(__name__)


def analyze(poly: str) -> dict[str, Any]:
    """Weights, CY condition, atoms, transpose, |Aut|, J and whether J lies in SL."""
    P = parse(poly)
    q = weights(P)
    J = j_element(q)
    return {
        "polynomial": str(P),
        "weights": [format_fraction(c) for c in q.q],
        "w": list(q.w),
        "d": q.d,
        "cy": calabi_yau_check(q),
        "atoms": [atom.to_dict() for atom in classify_atomic(P)],
        "transpose": str(P.transpose()),
        "autOrder": aut_group(P).order,
        "J": J.to_list(),
        "slJ": sl_check(J, P),
    }


def parse_generators(text: str) -> tuple[PhaseVector, ...]:
    """Semicolon-separated phase vectors, e.g. ``1/3,0;0,1/2``; empty means trivial."""
    parts = [part for part in text.replace(" ", "").split(";") if part]
    if not parts:
        return ()
    vectors = tuple(PhaseVector.parse(part) for part in parts)
    if len({v.n for v in vectors}) != 1:
        raise ParseError("Generators have different lengths")
    return vectors


def dual(poly: str, generators: str) -> dict[str, Any]:
    """Generators and order of the dual group of ⟨generators⟩."""
    P = parse(poly)
    G = DiagonalGroup(P, parse_generators(generators))
    GT = dual_group(G, P)
    return {
        "polynomial": str(P),
        "transpose": str(GT.polynomial),
        "group": G.to_dict(),
        "dual": GT.to_dict(),
        "autOrder": abs(P.det),
    }
