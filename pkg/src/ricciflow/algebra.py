"""Skew-symmetric algebras as structure-constant tensors.

A bracket on R^n is stored sparsely as entries ``(i, j, k, c)`` meaning
``[e_i, e_j] = ... + c e_k`` with ``i < j``; the dense tensor
``c[i, j, k]`` is materialized on demand and is antisymmetric in ``(i, j)``.
Indices are 0-based internally and 1-based in every external format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

RANK_RTOL = 1e-9
JACOBI_RTOL = 1e-9
SINGULAR_FLOOR = 1e-12


class InvalidInput(ValueError):
    """Raised for malformed algebras, metrics, or matrices."""


@dataclass(frozen=True)
class LieAlgebra:
    """Bracket on R^dim given by its nonzero structure constants.

    ``entries`` holds 0-based ``(i, j, k, value)`` with ``i < j``, sorted.
    Instances are not required to satisfy Jacobi; operations that need a
    genuine Lie algebra check :func:`jacobi_defect` themselves.
    """

    dim: int
    entries: tuple[tuple[int, int, int, float], ...] = ()

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InvalidInput(f"dim must be a positive integer, got {self.dim!r}")
        seen = set()
        for i, j, k, _ in self.entries:
            if not (0 <= i < j < self.dim and 0 <= k < self.dim):
                raise InvalidInput(f"bracket index out of range or i >= j: {(i + 1, j + 1, k + 1)}")
            if (i, j, k) in seen:
                raise InvalidInput(f"duplicate bracket entry {(i + 1, j + 1, k + 1)}")
            seen.add((i, j, k))

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping[tuple[int, int, int], float]) -> "LieAlgebra":
        """Build from 1-based ``{(i, j, k): c}`` with ``i < j``.

        >>> LieAlgebra.from_brackets(3, {(1, 2, 3): 1.0}).entries
        ((0, 1, 2, 1.0),)
        """
        entries = []
        for (i, j, k), value in brackets.items():
            if i >= j:
                raise InvalidInput(f"bracket ({i},{j})->{k}: i < j required")
            if value != 0:
                entries.append((i - 1, j - 1, k - 1, float(value)))
        return cls(dim, tuple(sorted(entries)))

    @classmethod
    def from_dense(cls, c, atol: float = 0.0) -> "LieAlgebra":
        """Build from a dense ``(n, n, n)`` tensor; only ``i < j`` slots are read."""
        c = np.asarray(c, dtype=float)
        n = c.shape[0]
        if c.shape != (n, n, n):
            raise InvalidInput(f"structure tensor must be (n, n, n), got {c.shape}")
        entries = tuple(
            (i, j, k, float(c[i, j, k]))
            for i, j in combinations(range(n), 2)
            for k in range(n)
            if abs(c[i, j, k]) > atol
        )
        return cls(n, entries)

    @cached_property
    def dense(self) -> np.ndarray:
        c = np.zeros((self.dim,) * 3)
        for i, j, k, value in self.entries:
            c[i, j, k] = value
            c[j, i, k] = -value
        c.flags.writeable = False
        return c

    @cached_property
    def scale(self) -> float:
        """Largest absolute structure constant (0 for the abelian bracket)."""
        return max((abs(e[3]) for e in self.entries), default=0.0)

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.dense)

    def ad(self, i: int) -> np.ndarray:
        """Matrix of ``ad e_i`` (0-based ``i``); column ``j`` is ``[e_i, e_j]``."""
        return self.dense[i].T

    @cached_property
    def ad_matrices(self) -> np.ndarray:
        """Stack of ``ad e_i``, shape ``(n, n, n)``; ``ad[i, k, j] = c[i, j, k]``."""
        return np.transpose(self.dense, (0, 2, 1))

    def nonzero(self, tol: float = 1e-12) -> list[tuple[int, int, int, float]]:
        return [e for e in self.entries if abs(e[3]) > tol]

    def scaled(self, factor: float) -> "LieAlgebra":
        return LieAlgebra(self.dim, tuple((i, j, k, v * factor) for i, j, k, v in self.entries))

    # -- JSON ----------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "brackets": [{"i": i + 1, "j": j + 1, "k": k + 1, "c": v} for i, j, k, v in self.entries],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> "LieAlgebra":
        if not isinstance(data, Mapping):
            raise InvalidInput("algebra document must be a JSON object")
        if "dim" not in data:
            raise InvalidInput("missing field 'dim'")
        dim = data["dim"]
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise InvalidInput(f"field 'dim' must be a positive integer, got {dim!r}")
        raw = data.get("brackets", [])
        if not isinstance(raw, list):
            raise InvalidInput("field 'brackets' must be a list")
        brackets: dict[tuple[int, int, int], float] = {}
        for pos, item in enumerate(raw):
            where = f"brackets[{pos}]"
            if not isinstance(item, Mapping):
                raise InvalidInput(f"{where} must be an object")
            for key in ("i", "j", "k", "c"):
                if key not in item:
                    raise InvalidInput(f"{where}: missing field '{key}'")
            i, j, k, value = item["i"], item["j"], item["k"], item["c"]
            for name, idx in (("i", i), ("j", j), ("k", k)):
                if isinstance(idx, bool) or not isinstance(idx, int) or not 1 <= idx <= dim:
                    raise InvalidInput(f"{where}.{name} must be an integer in 1..{dim}, got {idx!r}")
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidInput(f"{where}.c must be a number, got {value!r}")
            if i >= j:
                raise InvalidInput(f"{where}: i < j required, got i={i}, j={j}")
            if (i, j, k) in brackets:
                raise InvalidInput(f"{where}: duplicate key (i={i}, j={j}, k={k})")
            brackets[(i, j, k)] = float(value)
        entries = tuple(sorted((i - 1, j - 1, k - 1, v) for (i, j, k), v in brackets.items()))
        return cls(dim, entries)

    @classmethod
    def from_json(cls, text: str) -> "LieAlgebra":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"not valid JSON: {exc}") from exc
        return cls.from_dict(data)


@dataclass(frozen=True)
class BasisChange:
    """Invertible matrix acting on brackets by ``A.mu(X, Y) = A mu(A^-1 X, A^-1 Y)``."""

    A: np.ndarray

    def __post_init__(self):
        a = np.array(self.A, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput(f"basis change must be a square matrix, got shape {a.shape}")
        if abs(np.linalg.det(a)) <= SINGULAR_FLOOR:
            raise InvalidInput("basis change matrix is singular")
        a.flags.writeable = False
        object.__setattr__(self, "A", a)

    @classmethod
    def diagonal(cls, values: Iterable[float]) -> "BasisChange":
        return cls(np.diag(np.asarray(list(values), dtype=float)))


@dataclass(frozen=True)
class GlElement:
    """Element of gl_n acting on brackets through the derivative of the GL_n action."""

    alpha: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput(f"gl_n element must be square, got shape {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "alpha", a)

    @property
    def symmetric(self) -> bool:
        return bool(np.array_equal(self.alpha, self.alpha.T))

    @property
    def diagonal(self) -> bool:
        return bool(np.count_nonzero(self.alpha - np.diag(np.diag(self.alpha))) == 0)

    @classmethod
    def unit(cls, n: int, r: int, s: int) -> "GlElement":
        """``E_rs`` (1-based): the matrix with a single 1 at row r, column s."""
        e = np.zeros((n, n))
        e[r - 1, s - 1] = 1.0
        return cls(e)


def _as_matrix(value) -> np.ndarray:
    if isinstance(value, BasisChange):
        return value.A
    if isinstance(value, GlElement):
        return value.alpha
    return np.asarray(value, dtype=float)


def _as_tensor(value) -> np.ndarray:
    if isinstance(value, LieAlgebra):
        return value.dense
    return np.asarray(value, dtype=float)


def jacobi_defect(L: LieAlgebra) -> float:
    """Max Euclidean norm of the Jacobiator over basis triples i < j < k."""
    n = L.dim
    if n < 3 or not L.entries:
        return 0.0
    c = L.dense
    # [e_a, [e_b, e_d]] for all a, b, d: J[a, b, d, :]
    nested = np.einsum("bdm,amk->abdk", c, c)
    jac = nested + np.transpose(nested, (1, 2, 0, 3)) + np.transpose(nested, (2, 0, 1, 3))
    norms = np.linalg.norm(jac, axis=-1)
    return float(max(norms[i, j, k] for i, j, k in combinations(range(n), 3)))


def jacobi_tolerance(L: LieAlgebra) -> float:
    return JACOBI_RTOL * max(1.0, L.scale) ** 2


def is_lie_algebra(L: LieAlgebra) -> bool:
    return jacobi_defect(L) <= jacobi_tolerance(L)


def require_lie(L: LieAlgebra) -> None:
    defect = jacobi_defect(L)
    if defect > jacobi_tolerance(L):
        raise InvalidInput(f"bracket violates the Jacobi identity (defect {defect:.3g})")


def change_basis(L: LieAlgebra, A) -> LieAlgebra:
    """Bracket ``A.mu(X, Y) = A mu(A^-1 X, A^-1 Y)`` in the same fixed basis.

    Acting with ``A = Diag(a)`` multiplies ``c_ij^k`` by ``a_k / (a_i a_j)``.
    """
    if not isinstance(A, BasisChange):
        A = BasisChange(A)
    a = A.A
    if a.shape[0] != L.dim:
        raise InvalidInput(f"basis change is {a.shape[0]}x{a.shape[0]}, algebra has dim {L.dim}")
    if np.count_nonzero(a - np.diag(np.diag(a))) == 0:
        d = np.diag(a)
        return LieAlgebra(L.dim, tuple((i, j, k, v * d[k] / (d[i] * d[j])) for i, j, k, v in L.entries))
    return LieAlgebra.from_dense(act_dense(L.dense, a, np.linalg.inv(a)))


def act_dense(c: np.ndarray, a: np.ndarray, inv: np.ndarray) -> np.ndarray:
    """Dense ``A.mu`` given ``A`` and its inverse; no validation."""
    return np.einsum("kc,abc,ai,bj->ijk", a, c, inv, inv)


def pi_action(alpha, mu) -> np.ndarray:
    """``pi(alpha) mu = alpha mu(., .) - mu(alpha ., .) - mu(., alpha .)`` as a dense tensor.

    ``mu`` may be a :class:`LieAlgebra` or any dense ``(n, n, n)`` tensor.
    """
    a = _as_matrix(alpha)
    c = _as_tensor(mu)
    n = c.shape[0]
    if a.shape != (n, n):
        raise InvalidInput(f"gl_n element is {a.shape}, bracket has dim {n}")
    return (
        np.einsum("kc,ijc->ijk", a, c)
        - np.einsum("ai,ajk->ijk", a, c)
        - np.einsum("bj,ibk->ijk", a, c)
    )


def inner_V(mu, lam) -> float:
    """Canonical inner product on brackets, summed over all ordered pairs (i, j)."""
    x, y = _as_tensor(mu), _as_tensor(lam)
    if x.shape != y.shape:
        raise InvalidInput(f"dimension mismatch: {x.shape} vs {y.shape}")
    return float(np.sum(x * y))


def weight_vector(n: int, i: int, j: int, k: int) -> np.ndarray:
    """Dense tensor of the basis bracket ``v_ijk`` (0-based, i != j)."""
    v = np.zeros((n, n, n))
    v[i, j, k] = 1.0
    v[j, i, k] = -1.0
    return v


# -- structure ---------------------------------------------------------------


def _rank(vectors: np.ndarray, tol: float) -> tuple[int, np.ndarray]:
    """Rank of the column span and an orthonormal basis for it."""
    if vectors.size == 0:
        return 0, np.zeros((vectors.shape[0], 0))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    r = int(np.sum(s > tol))
    return r, u[:, :r]


def _bracket_span(L: LieAlgebra, left: np.ndarray, right: np.ndarray) -> tuple[int, np.ndarray]:
    # all [x, y] for x in columns of left, y in columns of right
    prods = np.einsum("ia,jb,ijk->kab", left, right, L.dense).reshape(L.dim, -1)
    return _rank(prods, RANK_RTOL * max(L.scale, 1e-300))


def lower_central_series(L: LieAlgebra) -> list[int]:
    """Dimensions of C^0 = n, C^i = [n, C^(i-1)], until the series stabilizes.

    The list ends in 0 exactly when the algebra is nilpotent.
    """
    eye = np.eye(L.dim)
    dims = [L.dim]
    current = eye
    while True:
        r, basis = _bracket_span(L, eye, current)
        if r == dims[-1]:
            return dims
        dims.append(r)
        if r == 0:
            return dims
        current = basis


def is_nilpotent(L: LieAlgebra) -> bool:
    return lower_central_series(L)[-1] == 0


def type_of(L: LieAlgebra) -> tuple[int, ...] | None:
    """Jumps ``n_i = dim C^(i-1) - dim C^i``; ``None`` if not nilpotent."""
    dims = lower_central_series(L)
    if dims[-1] != 0:
        return None
    return tuple(a - b for a, b in zip(dims, dims[1:]))


def derived_series(L: LieAlgebra) -> list[int]:
    dims = [L.dim]
    current = np.eye(L.dim)
    while True:
        r, basis = _bracket_span(L, current, current)
        if r == dims[-1]:
            return dims
        dims.append(r)
        if r == 0:
            return dims
        current = basis


def is_solvable(L: LieAlgebra) -> bool:
    return derived_series(L)[-1] == 0


def ad_traces(L: LieAlgebra) -> np.ndarray:
    """``tr ad e_i`` for each basis vector."""
    return np.einsum("ijj->i", L.dense)


def is_unimodular(L: LieAlgebra) -> bool:
    return bool(np.all(np.abs(ad_traces(L)) <= RANK_RTOL * max(L.scale, 1.0)))


def derivation_operator(L: LieAlgebra) -> np.ndarray:
    """Matrix of ``D -> D[e_i, e_j] - [D e_i, e_j] - [e_i, D e_j]`` (i < j).

    Columns index ``D`` flattened row-major; rows index ``(i<j, k)``.
    This is ``D -> pi(D) mu`` restricted to the independent slots.
    """
    n = L.dim
    c = L.dense
    iu, ju = np.triu_indices(n, 1)
    cols = []
    for r in range(n):
        for s in range(n):
            e = np.zeros((n, n))
            e[r, s] = 1.0
            cols.append(pi_action(e, c)[iu, ju, :].ravel())
    if not cols or iu.size == 0:
        return np.zeros((0, n * n))
    return np.array(cols).T


def derivation_algebra(L: LieAlgebra) -> list[np.ndarray]:
    """Basis of Der(L) as ``n x n`` matrices (column j is the image of e_j)."""
    require_lie(L)
    n = L.dim
    op = derivation_operator(L)
    if op.shape[0] == 0 or L.scale == 0.0:
        return [m.reshape(n, n) for m in np.eye(n * n)]
    _, s, vt = np.linalg.svd(op, full_matrices=True)
    tol = RANK_RTOL * s[0] if s.size else 0.0
    rank = int(np.sum(s > tol))
    return [row.reshape(n, n) for row in vt[rank:]]
