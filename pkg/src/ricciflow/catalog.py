"""Built-in brackets with their expected properties.

Entries are plain data. Every ``Expected`` field is recomputed from scratch
by the test suite, never used as a shortcut by the computing modules.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType

import numpy as np

from .algebra import LieAlgebra, jacobi_defect, jacobi_tolerance

SQRT2 = float(np.sqrt(2.0))


class UnknownEntry(KeyError):
    pass


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Soliton:
    c: float
    D: np.ndarray


@dataclass(frozen=True, eq=False)
class Expected:
    nice: bool
    stably_diagonal: bool | None
    nilpotent: bool
    type: tuple[int, ...] | None = None
    ricci_canonical: np.ndarray | None = None
    ricci_eigenvalues: tuple[float, ...] | None = None
    soliton: Soliton | None = None
    flow_diagonal: bool | None = None


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    algebra: LieAlgebra
    expected: Expected
    note: str = ""


def heis3() -> CatalogEntry:
    return CatalogEntry(
        "heis3",
        LieAlgebra.from_brackets(3, {(1, 2, 3): 1.0}),
        Expected(
            nice=True, stably_diagonal=True, nilpotent=True, type=(2, 1),
            ricci_canonical=_frozen(np.diag([-0.5, -0.5, 0.5])),
            soliton=Soliton(-1.5, _frozen(np.diag([1.0, 1.0, 2.0]))),
            flow_diagonal=True,
        ),
        "3-dimensional Heisenberg algebra",
    )


def l6_11() -> CatalogEntry:
    return CatalogEntry(
        "L6_11",
        LieAlgebra.from_brackets(6, {(1, 2, 4): 1, (1, 4, 5): 1, (1, 5, 6): 1, (2, 3, 6): 1, (2, 4, 6): 1}),
        Expected(nice=False, stably_diagonal=False, nilpotent=True, type=(3, 1, 1, 1)),
        "4-step nilpotent, admits no nice basis at all",
    )


def l6_13(b: float = 1.0) -> CatalogEntry:
    return CatalogEntry(
        "L6_13",
        LieAlgebra.from_brackets(6, {(1, 2, 4): 1, (2, 3, 5): 1, (3, 4, 6): 1, (1, 4, 5): b, (1, 5, 6): -1}),
        Expected(nice=True, stably_diagonal=True, nilpotent=True, type=(3, 1, 1, 1), flow_diagonal=None),
        "type (3,1,1,1) written in a nice basis",
    )


def s3() -> CatalogEntry:
    return CatalogEntry(
        "s3",
        LieAlgebra.from_brackets(3, {(1, 3, 2): 1, (1, 3, 3): 1}),
        Expected(nice=False, stably_diagonal=True, nilpotent=False),
        "solvable, not nice yet stably Ricci-diagonal",
    )


def s4() -> CatalogEntry:
    return CatalogEntry(
        "s4",
        LieAlgebra.from_brackets(4, {(1, 2, 3): 2, (1, 3, 2): 1, (1, 4, 4): 1}),
        Expected(
            nice=True, stably_diagonal=False, nilpotent=False,
            ricci_canonical=_frozen([
                [-5.5, 0, 0, 0],
                [0, -1.5, -1.5, 0],
                [0, -1.5, 1.5, 0],
                [0, 0, 0, -1],
            ]),
        ),
        "solvable, nice but not stably Ricci-diagonal (S(ad H) part)",
    )


def sl2() -> CatalogEntry:
    return CatalogEntry(
        "sl2",
        LieAlgebra.from_brackets(3, {(1, 2, 2): 1, (1, 3, 3): -1, (2, 3, 1): 1}),
        Expected(
            nice=True, stably_diagonal=False, nilpotent=False,
            # the (2,2) entry is -1/2: X2 <-> X3, X1 -> -X1 is an orthogonal
            # automorphism, so Ric_22 = Ric_33
            ricci_canonical=_frozen([[-1.5, 0, 0], [0, -0.5, -1], [0, -1, -0.5]]),
            ricci_eigenvalues=(-1.5, -1.5, 0.5),
        ),
        "sl2(R), nice but not stably Ricci-diagonal (Killing part)",
    )


def n4() -> CatalogEntry:
    r6 = float(np.sqrt(6.0))
    return CatalogEntry(
        "n4",
        LieAlgebra.from_brackets(4, {(1, 2, 3): SQRT2, (1, 2, 4): SQRT2, (1, 3, 4): SQRT2}),
        Expected(
            nice=False, stably_diagonal=False, nilpotent=True, type=(2, 1, 1),
            ricci_canonical=_frozen([[-3, 0, 0, 0], [0, -2, -1, 0], [0, -1, 0, 1], [0, 0, 1, 2]]),
            ricci_eigenvalues=(-3.0, -r6, 0.0, r6),
            flow_diagonal=False,
        ),
        "3-step nilpotent; Ricci flow from the canonical metric is not diagonal",
    )


def milnor(l1: float = 1.0, l2: float = 1.0, l3: float = 1.0) -> CatalogEntry:
    """Milnor frame ``[X2,X3] = l1 X1, [X3,X1] = l2 X2, [X1,X2] = l3 X3``."""
    L = LieAlgebra.from_brackets(3, {(2, 3, 1): l1, (1, 3, 2): -l2, (1, 2, 3): l3})
    lams = (l1, l2, l3)
    nonzero = sum(1 for x in lams if x != 0)
    soliton = None
    if lams == (1.0, 1.0, 1.0):
        soliton = Soliton(0.5, _frozen(np.zeros((3, 3))))
    return CatalogEntry(
        "milnor" if lams == (1.0, 1.0, 1.0) else f"milnor({l1:g},{l2:g},{l3:g})",
        L,
        Expected(
            nice=True, stably_diagonal=True, nilpotent=nonzero <= 1,
            type=None if nonzero > 1 else ((3,) if nonzero == 0 else (2, 1)),
            soliton=soliton,
            flow_diagonal=True,
        ),
        "unimodular 3-dimensional algebra in a Milnor frame",
    )


_BUILDERS = MappingProxyType({
    "heis3": heis3,
    "L6_11": l6_11,
    "L6_13": l6_13,
    "s3": s3,
    "s4": s4,
    "sl2": sl2,
    "n4": n4,
    "milnor": milnor,
})

_MILNOR = re.compile(r"^milnor\(\s*([^,]+),\s*([^,]+),\s*([^,)]+)\)$")


def names() -> list[str]:
    return list(_BUILDERS)


def get(name: str) -> CatalogEntry:
    """Entry by name; ``milnor(a,b,c)`` selects a Milnor frame with those constants."""
    if name in _BUILDERS:
        return _BUILDERS[name]()
    m = _MILNOR.match(name)
    if m:
        try:
            return milnor(*(float(x) for x in m.groups()))
        except ValueError:
            pass
    raise UnknownEntry(f"unknown catalog entry {name!r}; known: {', '.join(names())}")


def entries() -> list[CatalogEntry]:
    return [get(name) for name in names()]


def random_triangular(rng: np.random.Generator, dim: int, max_tries: int = 10_000) -> LieAlgebra:
    """Random nilpotent Lie bracket with ``c_ij^k = 0`` unless ``k > max(i, j)``.

    Supports are drawn uniformly with small integer coefficients and rejected
    until the Jacobi identity holds, so the result is a genuine Lie algebra.
    """
    slots = [(i, j, k) for i, j in combinations(range(dim), 2) for k in range(j + 1, dim)]
    if not slots:
        return LieAlgebra(dim)
    for _ in range(max_tries):
        m = int(rng.integers(1, min(len(slots), dim + 2) + 1))
        picked = rng.choice(len(slots), size=m, replace=False)
        coeffs = rng.choice([-2.0, -1.0, 1.0, 2.0], size=m)
        L = LieAlgebra(dim, tuple(sorted((*slots[p], float(v)) for p, v in zip(picked, coeffs))))
        if jacobi_defect(L) <= jacobi_tolerance(L):
            return L
    raise RuntimeError("could not draw a Jacobi-satisfying bracket")
