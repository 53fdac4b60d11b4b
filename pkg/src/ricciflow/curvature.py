"""Ricci curvature of left-invariant metrics.

For a metric Lie algebra the Ricci operator is ``Ric = M - B/2 - S(ad H)``
where ``M`` is the operator of the quadratic bracket form, ``B`` the Killing
operator and ``H`` the mean curvature vector. Everything is evaluated in an
orthonormal frame ``X_i = P^{-1/2} e_i`` and mapped back to the fixed basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .algebra import (
    InvalidInput,
    LieAlgebra,
    act_dense,
    ad_traces,
    inner_V,
    is_nilpotent,
    pi_action,
    require_lie,
)
from .linalg import is_diagonal, sym_inv_sqrt, sym_sqrt
from .nice import (
    NONZERO_TOL,
    NiceVerdict,
    as_root,
    check_root_criterion_applicable,
    is_nice_basis,
    weights,
)

SYMMETRY_TOL = 1e-12
OFFDIAG_RTOL = 1e-6
SAMPLE_LOG10_RANGE = (-2.0, 2.0)
MOMENT_MAP_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Metric:
    """Inner product ``<P x, y>`` on the fixed basis; ``P`` symmetric positive definite."""

    P: np.ndarray

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        n = P.shape[0] if P.ndim == 2 else -1
        if P.ndim != 2 or P.shape != (n, n):
            raise InvalidInput(f"metric must be a square matrix, got shape {P.shape}")
        if not np.all(np.isfinite(P)):
            raise InvalidInput("metric has non-finite entries")
        scale = max(np.abs(P).max(), 1e-300)
        if np.abs(P - P.T).max() > SYMMETRY_TOL * scale:
            raise InvalidInput("metric is not symmetric")
        P = 0.5 * (P + P.T)
        if np.linalg.eigvalsh(P).min() <= 0.0:
            raise InvalidInput("metric is not positive definite")
        P.flags.writeable = False
        object.__setattr__(self, "P", P)

    @classmethod
    def canonical(cls, n: int) -> "Metric":
        return cls(np.eye(n))

    @classmethod
    def diagonal(cls, values) -> "Metric":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return self.P.shape[0]

    @property
    def is_diagonal(self) -> bool:
        return is_diagonal(self.P)

    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        """``(Q, Q^-1)`` with ``Q = P^{-1/2}``; the columns of ``Q`` are orthonormal."""
        if self.is_diagonal:
            d = np.sqrt(np.diag(self.P))
            return np.diag(1.0 / d), np.diag(d)
        return sym_inv_sqrt(self.P), sym_sqrt(self.P)


@dataclass(frozen=True, eq=False)
class RicciReport:
    """Ricci tensor ``Rc`` and operator ``Ric`` in the fixed basis, with ingredients."""

    Rc: np.ndarray
    Ric: np.ndarray
    M: np.ndarray
    B: np.ndarray
    SadH: np.ndarray
    H: np.ndarray

    def to_dict(self) -> dict:
        return {name: getattr(self, name).tolist() for name in ("Rc", "Ric", "M", "B", "SadH", "H")}


def _coerce_metric(L: LieAlgebra, metric) -> Metric:
    if metric is None:
        return Metric.canonical(L.dim)
    if not isinstance(metric, Metric):
        metric = Metric(metric)
    if metric.dim != L.dim:
        raise InvalidInput(f"metric is {metric.dim}x{metric.dim}, algebra has dim {L.dim}")
    return metric


def _bracket_part(c: np.ndarray) -> np.ndarray:
    """``M`` for a bracket written in an orthonormal basis."""
    return -0.5 * np.einsum("aij,bij->ab", c, c) + 0.25 * np.einsum("ija,ijb->ab", c, c)


def ricci(L: LieAlgebra, metric=None, check: bool = True) -> RicciReport:
    """Ricci tensor and operator of ``L`` with the left-invariant metric ``metric``.

    ``M`` is evaluated in the orthonormal frame ``P^{-1/2}``; ``B``, ``H`` and
    ``S(ad H)`` are tensorial and are built in the fixed basis, so they are
    exactly zero whenever the Killing form and ``tr ad`` vanish there.
    ``metric`` defaults to the canonical inner product. Pass ``check=False``
    to skip the Jacobi check in hot loops that already validated ``L``.
    """
    metric = _coerce_metric(L, metric)
    if check:
        require_lie(L)
    P = metric.P
    Q, Qinv = metric.frame()
    if metric.is_diagonal:
        d = np.diag(Qinv)
        c = L.dense * d[None, None, :] / (d[:, None, None] * d[None, :, None])
    else:
        c = act_dense(L.dense, Qinv, Q)
    M = Q @ _bracket_part(c) @ Qinv
    if metric.is_diagonal:
        d = np.diag(P)
        B = killing_form(L) / d[:, None]
        H = ad_traces(L) / d
    else:
        B = np.linalg.solve(P, killing_form(L))
        H = np.linalg.solve(P, ad_traces(L))
    adH = np.einsum("a,ajk->kj", H, L.dense)
    # symmetric part with respect to <P., .>: (ad H + P^-1 ad H^T P) / 2
    SadH = 0.5 * (adH + np.linalg.solve(P, adH.T @ P)) if adH.any() else adH
    Ric = M - 0.5 * B - SadH
    Rc = P @ Ric
    return RicciReport(Rc=0.5 * (Rc + Rc.T), Ric=Ric, M=M, B=B, SadH=SadH, H=H)


def mean_curvature_vector(L: LieAlgebra, metric=None) -> np.ndarray:
    """``H`` with ``<H, X> = tr ad X``; zero exactly for unimodular algebras."""
    metric = _coerce_metric(L, metric)
    return np.linalg.solve(metric.P, ad_traces(L))


def killing_form(L: LieAlgebra) -> np.ndarray:
    return np.einsum("akj,bjk->ab", L.dense, L.dense)


def killing_operator(L: LieAlgebra, metric=None) -> np.ndarray:
    """Operator ``B`` with ``<B X, Y> = tr(ad X ad Y)``."""
    metric = _coerce_metric(L, metric)
    return np.linalg.solve(metric.P, killing_form(L))


def ricci_form_contracted(L: LieAlgebra, metric=None) -> np.ndarray:
    """Ricci tensor of a nilpotent bracket by metric contractions, no frame needed.

    Uses ``sum_i X_i X_i^T = P^-1`` for an orthonormal basis ``X_i``; it
    only covers the bracket part ``M`` and so is the full Ricci tensor only
    when the Killing form and ``H`` vanish.
    """
    metric = _coerce_metric(L, metric)
    P = metric.P
    Pinv = np.linalg.inv(P)
    c = L.dense
    ad = L.ad_matrices  # ad[x] maps e_j to sum_k c[x,j,k] e_k
    first = np.einsum("xkj,kl,ylm,mj->xy", ad, P, ad, Pinv)
    # lower-index bracket: <[e_a, e_b], e_x>_P
    low = np.einsum("abk,kx->abx", c, P)
    second = np.einsum("abx,ac,bd,cdy->xy", low, Pinv, Pinv, low)
    return -0.5 * first + 0.25 * second


@dataclass(frozen=True)
class MomentMapFit:
    kappa: float
    residual: float


def _sym_basis(n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(i, n):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = 1.0
            out.append(e)
    return out


def moment_map_check(L: LieAlgebra) -> MomentMapFit:
    """Fit ``kappa`` in ``<Ric, alpha> = kappa <pi(alpha) mu, mu>`` over symmetric alpha.

    Returns the fitted constant and the relative least-squares residual.
    """
    require_lie(L)
    if not is_nilpotent(L):
        raise InvalidInput("moment map identity is checked on nilpotent brackets only")
    if L.scale == 0.0:
        raise InvalidInput("moment map identity needs a nonzero bracket")
    Ric = ricci(L, check=False).Ric
    c = L.dense
    basis = _sym_basis(L.dim)
    lhs = np.array([np.sum(Ric * a) for a in basis])
    rhs = np.array([inner_V(pi_action(a, c), c) for a in basis])
    kappa = float(rhs @ lhs / (rhs @ rhs))
    residual = float(np.linalg.norm(lhs - kappa * rhs) / max(np.linalg.norm(lhs), 1e-300))
    return MomentMapFit(kappa, residual)


@dataclass(frozen=True, eq=False)
class SamplerVerdict:
    """Outcome of sampling diagonal metrics.

    ``exact`` carries the exact nilpotent verdict when it applies, else ``None``.
    """

    stably_diagonal: bool
    samples: int
    seed: int
    max_offdiag_ratio: float
    witness: Metric | None = None
    exact: bool | None = None

    def to_dict(self) -> dict:
        return {
            "stably_diagonal": self.stably_diagonal,
            "samples": self.samples,
            "seed": self.seed,
            "max_offdiag_ratio": self.max_offdiag_ratio,
            "witness": None if self.witness is None else np.diag(self.witness.P).tolist(),
            "exact": self.exact,
        }


def offdiag_ratio(Rc: np.ndarray) -> float:
    """Largest off-diagonal entry relative to the Frobenius norm."""
    norm = np.linalg.norm(Rc)
    if norm == 0.0:
        return 0.0
    off = np.abs(Rc - np.diag(np.diag(Rc)))
    return float(off.max() / norm)


def sample_diagonal_metric(n: int, seed: int, index: int) -> Metric:
    """Sample ``index`` of a seeded stream; sample 0 is the canonical metric."""
    if index == 0:
        return Metric.canonical(n)
    rng = np.random.default_rng((seed, index))
    return Metric.diagonal(10.0 ** rng.uniform(*SAMPLE_LOG10_RANGE, size=n))


def stably_ricci_diagonal_numeric(L: LieAlgebra, samples: int = 50, seed: int = 1) -> SamplerVerdict:
    """Sample diagonal metrics and look for an off-diagonal Ricci entry.

    The canonical metric is tried first. A ``True`` verdict is evidence only;
    for nilpotent brackets the exact verdict is attached for comparison.
    """
    if samples < 1:
        raise InvalidInput("samples must be positive")
    require_lie(L)
    worst = 0.0
    for idx in range(samples):
        metric = sample_diagonal_metric(L.dim, seed, idx)
        ratio = offdiag_ratio(ricci(L, metric, check=False).Rc)
        worst = max(worst, ratio)
        if ratio > OFFDIAG_RTOL:
            return SamplerVerdict(False, idx + 1, seed, worst, metric, _exact_or_none(L))
    return SamplerVerdict(True, samples, seed, worst, None, _exact_or_none(L))


def _exact_or_none(L: LieAlgebra) -> bool | None:
    try:
        check_root_criterion_applicable(L)
    except InvalidInput:
        return None
    return is_nice_basis(L).nice


Triple = tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class ExactVerdict:
    """Exact verdict for nilpotent brackets, with the grouped-coefficient diagnostic.

    ``diagnostic[(l, m)]`` lists ``(ijk, rst, c_ijk * c_rst)`` for every pair of
    weights whose difference is ``E_ll - E_mm``; all products must vanish
    for the basis to be stably Ricci-diagonal.
    """

    stably_diagonal: bool
    nice: NiceVerdict
    diagnostic: dict[tuple[int, int], list[tuple[Triple, Triple, float]]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "stably_diagonal": self.stably_diagonal,
            "nice": self.nice.to_dict(),
            "diagnostic": [
                {"root": [l, m], "pairs": [{"ijk": list(a), "rst": list(b), "product": p} for a, b, p in pairs]}
                for (l, m), pairs in sorted(self.diagnostic.items())
            ],
        }


def stably_ricci_diagonal_exact(L: LieAlgebra, tol: float = NONZERO_TOL) -> ExactVerdict:
    """Decide stable Ricci-diagonality of a nilpotent bracket by the nice condition."""
    require_lie(L)
    if not is_nilpotent(L):
        raise InvalidInput("exact criterion holds for nilpotent algebras only")
    check_root_criterion_applicable(L, tol)
    value = {(i + 1, j + 1, k + 1): v for i, j, k, v in L.nonzero(tol)}
    diagnostic: dict[tuple[int, int], list] = {}
    for w1, w2 in permutations(weights(L, tol), 2):
        root = as_root(tuple(a - b for a, b in zip(w1.vec, w2.vec)))
        if root is not None:
            diagnostic.setdefault((root.l, root.m), []).append(
                (w1.ijk, w2.ijk, value[w1.ijk] * value[w2.ijk])
            )
    verdict = is_nice_basis(L, tol)
    return ExactVerdict(verdict.nice, verdict, diagnostic)
