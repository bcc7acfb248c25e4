"""Split an invertible polynomial into Fermat, loop and chain atoms."""

import logging

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from frobforge.bhk.models.polynomial import Atom, AtomKind, InvertiblePolynomial
from frobforge.utils.errors import NotDecomposable

logger = logging.getLogger(__name__)


def _components(P: InvertiblePolynomial) -> list[list[int]]:
    """Variables linked by sharing a monomial."""
    E = np.array(P.exponents) > 0
    adjacency = (E.T.astype(int) @ E.astype(int)) > 0
    count, labels = connected_components(csr_matrix(adjacency), directed=False)
    return [sorted(np.flatnonzero(labels == c).tolist()) for c in range(count)]


def _pointer(P: InvertiblePolynomial, monomial: int) -> tuple[int, int, int | None]:
    """(main variable, its exponent, partner with exponent 1 or None)."""
    row = P.exponents[monomial]
    heavy = [j for j, e in enumerate(row) if e >= 2]
    light = [j for j, e in enumerate(row) if e == 1]
    if len(heavy) != 1 or len(light) > 1:
        raise NotDecomposable(f"Monomial {monomial + 1} of {P} is not x_i^a or x_i^a x_j")
    return heavy[0], row[heavy[0]], (light[0] if light else None)


def _atom(P: InvertiblePolynomial, variables: list[int]) -> Atom:
    monomials = [k for k in range(P.n) if set(P.support(k)) <= set(variables)]
    if len(monomials) != len(variables):
        raise NotDecomposable(f"Variables {variables} carry {len(monomials)} monomials")
    nxt: dict[int, int | None] = {}
    power: dict[int, int] = {}
    for k in monomials:
        main, exponent, partner = _pointer(P, k)
        if main in nxt:
            raise NotDecomposable(f"x{main + 1} leads two monomials")
        nxt[main], power[main] = partner, exponent
    if len(variables) == 1:
        v = variables[0]
        return Atom(AtomKind.FERMAT, (v,), (power[v],))

    terminal = [v for v in variables if nxt[v] is None]
    if not terminal:
        order = [variables[0]]
        while (step := nxt[order[-1]]) != order[0]:
            if step is None or step in order:
                raise NotDecomposable(f"Variables {variables} do not close into a loop")
            order.append(step)
        kind = AtomKind.LOOP
    elif len(terminal) == 1:
        targets = {t for t in nxt.values() if t is not None}
        heads = [v for v in variables if v not in targets]
        if len(heads) != 1:
            raise NotDecomposable(f"Variables {variables} do not form a chain")
        order = [heads[0]]
        while (step := nxt[order[-1]]) is not None:
            order.append(step)
        kind = AtomKind.CHAIN
    else:
        raise NotDecomposable(f"Variables {variables} have {len(terminal)} pure powers")
    if len(order) != len(variables):
        raise NotDecomposable(f"Variables {variables} split into several cycles")
    return Atom(kind, tuple(order), tuple(power[v] for v in order))


def classify_atomic(P: InvertiblePolynomial) -> list[Atom]:
    """Atoms ordered by their smallest variable."""
    atoms = [_atom(P, comp) for comp in _components(P)]
    logger.debug(f"{P}: {[a.kind.value for a in atoms]}")
    return atoms
