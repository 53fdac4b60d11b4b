"""Nice bases, weights of the gl_n action on brackets, and positive roots.

A basis is nice when every bracket ``[e_i, e_j]`` is a multiple of a single
basis vector and two brackets landing on the same ``e_k`` share no index.
All weight/root arithmetic here is over exact integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .algebra import (
    BasisChange,
    InvalidInput,
    LieAlgebra,
    change_basis,
    derivation_algebra,
    inner_V,
    is_nilpotent,
    pi_action,
    weight_vector,
)

NONZERO_TOL = 1e-12
SIMPLE_DERIVATION_ATTEMPTS = 64
EIGENVALUE_GAP = 1e-6

Triple = tuple[int, int, int]


class CriterionNotApplicable(InvalidInput):
    """The root criterion needs nilpotency and no bracket with k in {i, j}."""


@dataclass(frozen=True)
class Weight:
    """Weight ``E_kk - E_ii - E_jj`` of the basis bracket ``v_ijk`` (1-based ijk)."""

    ijk: Triple
    vec: tuple[int, ...]

    @classmethod
    def of(cls, n: int, i: int, j: int, k: int) -> "Weight":
        if not (1 <= i < j <= n and 1 <= k <= n):
            raise InvalidInput(f"weight indices out of range: {(i, j, k)}")
        vec = [0] * n
        vec[k - 1] += 1
        vec[i - 1] -= 1
        vec[j - 1] -= 1
        return cls((i, j, k), tuple(vec))

    @property
    def degenerate(self) -> bool:
        """True when k is one of i, j (the weight then has a single -1)."""
        i, j, k = self.ijk
        return k in (i, j)


@dataclass(frozen=True)
class PositiveRoot:
    """``E_ll - E_mm`` with ``l > m`` (1-based)."""

    l: int
    m: int
    n: int

    def __post_init__(self):
        if not (1 <= self.m < self.l <= self.n):
            raise InvalidInput(f"positive root needs 1 <= m < l <= n, got l={self.l}, m={self.m}")

    @property
    def vec(self) -> tuple[int, ...]:
        v = [0] * self.n
        v[self.l - 1] = 1
        v[self.m - 1] = -1
        return tuple(v)

    @property
    def root_vector(self) -> np.ndarray:
        """``E_lm``, spanning the root space of this root."""
        e = np.zeros((self.n, self.n))
        e[self.l - 1, self.m - 1] = 1.0
        return e


def positive_roots(n: int) -> list[PositiveRoot]:
    return [PositiveRoot(l, m, n) for l in range(2, n + 1) for m in range(1, l)]


def as_root(diff: tuple[int, ...]) -> PositiveRoot | None:
    """The positive root equal to ``diff``, or ``None`` if it is not one."""
    plus = [p for p, d in enumerate(diff) if d == 1]
    minus = [p for p, d in enumerate(diff) if d == -1]
    if len(plus) != 1 or len(minus) != 1 or sum(1 for d in diff if d) != 2:
        return None
    l, m = plus[0] + 1, minus[0] + 1
    return PositiveRoot(l, m, len(diff)) if l > m else None


@dataclass(frozen=True)
class NiceVerdict:
    nice: bool
    witness: tuple[Triple, Triple] | None = None
    root: tuple[int, int] | None = None
    reason: str = ""

    def __post_init__(self):
        if self.nice != (self.witness is None):
            raise ValueError("witness must be present exactly when the basis is not nice")

    def to_dict(self) -> dict:
        out: dict = {"nice": self.nice, "witness": [list(w) for w in self.witness] if self.witness else None}
        if self.root is not None:
            out["root"] = list(self.root)
        if self.reason:
            out["reason"] = self.reason
        return out


def _support(L: LieAlgebra, tol: float) -> list[Triple]:
    return [(i + 1, j + 1, k + 1) for i, j, k, _ in L.nonzero(tol)]


def is_nice_basis(L: LieAlgebra, tol: float = NONZERO_TOL) -> NiceVerdict:
    """Check both clauses of the nice condition on the nonzero constants.

    The witness is the first offending pair of 1-based ``(i, j, k)`` triples
    in lexicographic order.
    """
    for a, b in combinations(_support(L, tol), 2):
        (i, j, k), (r, s, t) = a, b
        if (i, j) == (r, s):
            return NiceVerdict(False, (a, b), reason=f"[e{i},e{j}] has components on e{k} and e{t}")
        if k == t and len({i, j} & {r, s}) == 1:
            return NiceVerdict(False, (a, b), reason=f"[e{i},e{j}] and [e{r},e{s}] share an index and both hit e{k}")
    return NiceVerdict(True)


def weights(L: LieAlgebra, tol: float = NONZERO_TOL) -> list[Weight]:
    return [Weight.of(L.dim, i, j, k) for i, j, k in _support(L, tol)]


def check_root_criterion_applicable(L: LieAlgebra, tol: float = NONZERO_TOL) -> None:
    bad = [w.ijk for w in weights(L, tol) if w.degenerate]
    if bad:
        raise CriterionNotApplicable(f"criterion not applicable: bracket {bad[0]} has k in {{i, j}}")
    if not is_nilpotent(L):
        raise CriterionNotApplicable("criterion not applicable: algebra is not nilpotent")


def nice_via_roots(L: LieAlgebra, tol: float = NONZERO_TOL) -> NiceVerdict:
    """Nice iff no difference of two weights of nonzero constants is a positive root."""
    check_root_criterion_applicable(L, tol)
    for w1, w2 in permutations(weights(L, tol), 2):
        root = as_root(tuple(a - b for a, b in zip(w1.vec, w2.vec)))
        if root is not None:
            return NiceVerdict(False, (w1.ijk, w2.ijk), root=(root.l, root.m),
                               reason=f"weight difference equals E{root.l}{root.l} - E{root.m}{root.m}")
    return NiceVerdict(True)


def pairing_nonzero(root: PositiveRoot, w1: Weight, w2: Weight) -> bool:
    """Whether ``<pi(E_lm) v_w1, v_w2> != 0``, decided by ``w2 - w1 == root``.

    Exact when neither weight is degenerate. A degenerate weight (k in
    {i, j}) is shared by several brackets, e.g. ``v_121`` and ``v_233`` both
    have weight ``-E_22``, and the rule can then report a pairing that is zero.
    """
    return tuple(b - a for a, b in zip(w1.vec, w2.vec)) == root.vec


def pairing_explicit(root: PositiveRoot, w1: Weight, w2: Weight) -> float:
    """``<pi(E_lm) v_w1, v_w2>`` computed from dense tensors."""
    n = root.n
    v1 = weight_vector(n, *(x - 1 for x in w1.ijk))
    v2 = weight_vector(n, *(x - 1 for x in w2.ijk))
    return inner_V(pi_action(root.root_vector, v1), v2)


def simple_derivation_nice_basis(
    L: LieAlgebra,
    attempts: int = SIMPLE_DERIVATION_ATTEMPTS,
    seed: int = 1,
) -> BasisChange | None:
    """Look for a simple derivation and return its eigenvector basis change.

    Random combinations of a basis of Der(L) are tried; a candidate must have
    n real eigenvalues separated by more than ``EIGENVALUE_GAP`` relative to
    the spectral radius. ``None`` means no such derivation was found, which
    is not a proof that none exists.
    """
    if not is_nilpotent(L):
        raise InvalidInput("simple derivation search expects a nilpotent algebra")
    der = derivation_algebra(L)
    if not der:
        return None
    basis = np.array(der)
    rng = np.random.default_rng(seed)
    n = L.dim
    for _ in range(attempts):
        D = np.tensordot(rng.standard_normal(len(der)), basis, axes=1)
        w, V = np.linalg.eig(D)
        radius = np.max(np.abs(w))
        if radius == 0.0 or np.max(np.abs(w.imag)) > EIGENVALUE_GAP * radius:
            continue
        w = w.real
        gaps = np.abs(w[:, None] - w[None, :])
        np.fill_diagonal(gaps, np.inf)
        if n > 1 and gaps.min() <= EIGENVALUE_GAP * radius:
            continue
        V = V.real / np.linalg.norm(V.real, axis=0)
        A = BasisChange(np.linalg.inv(V))
        if is_nice_basis(change_basis(L, A)).nice:
            return A
    return None


def nikolayevsky_no_nice_type(p: int, q: int) -> bool:
    """``min{q(q-1), pq}/2 + q^2 + p^2 - 1 < pq(q-1)/2``, in exact integers.

    When true there are 2-step nilpotent algebras of type (p, q) with no nice basis.
    """
    if p < 1 or q < 1:
        raise InvalidInput(f"p and q must be positive, got {(p, q)}")
    return min(q * (q - 1), p * q) + 2 * (q * q + p * p - 1) < p * q * (q - 1)
