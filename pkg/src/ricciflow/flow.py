"""Ricci flow of left-invariant metrics as a matrix ODE.

In the fixed basis the metric matrix obeys ``dP/dt = -2 P Ric(P)``. The
integrator is an embedded Dormand-Prince 5(4) pair with a PI step-size
controller; ``P`` is re-symmetrized after every accepted step.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .algebra import InvalidInput, LieAlgebra, inner_V, pi_action, require_lie
from .curvature import Metric, ricci
from .linalg import jacobi_eigh, sym_expm

log = logging.getLogger(__name__)

COND_LIMIT = 1e12
MIN_EIG = 1e-12
RIC_LIMIT = 1e12
DT_MIN = 1e-14
DIAGONAL_TOL = 1e-8
NOT_DIAGONAL_TOL = 1e-3
SOLITON_RTOL = 1e-9
MAX_PAIR_SAMPLES = 200
RTOL_FLOOR = 100 * np.finfo(float).eps

# Dormand-Prince 5(4)
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class FlowStatus(str, Enum):
    COMPLETED = "completed"
    SINGULARITY = "singularity-detected"
    UNDERFLOW = "step-underflow"
    MAX_STEPS = "max-steps-exceeded"


class DomainError(ValueError):
    """Requested time lies outside the maximal interval of the closed form."""


@dataclass
class FlowOptions:
    rtol: float = 1e-10
    atol: float = 1e-10
    dt_init: float | None = None
    max_steps: int = 200_000


@dataclass(eq=False)
class FlowTrajectory:
    """Accepted steps of a Ricci flow run: times, metrics and Ricci operators."""

    t: np.ndarray
    P: np.ndarray
    Ric: np.ndarray
    status: FlowStatus = FlowStatus.COMPLETED
    steps_rejected: int = 0

    @property
    def samples(self) -> list[tuple[float, np.ndarray, np.ndarray]]:
        return list(zip(self.t.tolist(), self.P, self.Ric))

    def __len__(self) -> int:
        return len(self.t)

    def to_csv(self, fh=None) -> str | None:
        """Write ``t,p_11,p_12,...,p_nn,offdiag,commutator`` rows.

        ``p_ij`` is the upper triangle of ``P`` row-major; ``offdiag`` is the
        relative off-diagonal mass of ``Ric_t`` in the eigenbasis of ``Ric_0``
        and ``commutator`` the normalized commutator of ``P(t)`` with the
        final metric. Returns the text when ``fh`` is ``None``.
        """
        n = self.P.shape[1]
        iu = np.triu_indices(n)
        header = ["t"] + [f"p_{i + 1}{j + 1}" for i, j in zip(*iu)] + ["offdiag", "commutator"]
        offdiag = eigenbasis_offdiag(self)
        last = self.P[-1]
        out = fh if fh is not None else io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for t, P, off in zip(self.t, self.P, offdiag):
            row = [t, *P[iu], off, normalized_commutator(P, last)]
            writer.writerow([format(float(x), ".17g") for x in row])
        return out.getvalue() if fh is None else None


def _rhs(L: LieAlgebra, P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    Ric = ricci(L, Metric(P), check=False).Ric
    return -2.0 * P @ Ric, Ric


def _singular(P: np.ndarray, Ric: np.ndarray) -> str | None:
    w = np.linalg.eigvalsh(P)
    if w[0] < MIN_EIG:
        return f"min eigenvalue {w[0]:.3g}"
    if w[-1] / w[0] > COND_LIMIT:
        return f"condition number {w[-1] / w[0]:.3g}"
    if np.abs(Ric).max() > RIC_LIMIT:
        return "Ricci blow-up"
    return None


def integrate_flow(L: LieAlgebra, P0, t_max: float, options: FlowOptions | None = None) -> FlowTrajectory:
    """Integrate ``dP/dt = -2 P Ric`` from ``P(0) = P0`` to ``t_max`` (may be negative)."""
    opts = options or FlowOptions()
    require_lie(L)
    P0 = P0 if isinstance(P0, Metric) else Metric(P0)
    if P0.dim != L.dim:
        raise InvalidInput(f"metric is {P0.dim}x{P0.dim}, algebra has dim {L.dim}")
    if t_max == 0 or not np.isfinite(t_max):
        raise InvalidInput("t_max must be finite and nonzero")
    direction = 1.0 if t_max > 0 else -1.0
    rtol = max(opts.rtol, RTOL_FLOOR)
    if rtol > opts.rtol:
        log.warning("rtol=%g is below rounding level; using %g", opts.rtol, rtol)

    y = P0.P.copy()
    k1, Ric = _rhs(L, y)
    ts, Ps, Rics = [0.0], [y.copy()], [Ric]
    t = 0.0
    if opts.dt_init is not None:
        h = abs(opts.dt_init)
    else:
        h = 0.01 / max(1.0, np.abs(Ric).max())
    h = min(h, abs(t_max))
    err_prev = 1e-4
    rejected = 0
    status = FlowStatus.COMPLETED
    if L.scale == 0.0:
        h = abs(t_max)

    for _ in range(opts.max_steps):
        if direction * (t_max - t) <= 0:
            break
        h = min(h, abs(t_max - t))
        if h < DT_MIN:
            status = FlowStatus.UNDERFLOW
            break
        dt = direction * h
        try:
            k = [k1]
            for s in range(1, 7):
                ys = y + dt * sum(a * kk for a, kk in zip(_A[s], k))
                k.append(_rhs(L, ys)[0])
            y_new = ys  # stage 7 is evaluated at the 5th-order solution
            err_vec = dt * sum(e * kk for e, kk in zip(_E, k))
            scale = opts.atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        except (InvalidInput, np.linalg.LinAlgError, FloatingPointError):
            err = np.inf
        if not np.isfinite(err) or err > 1.0:
            rejected += 1
            factor = 0.2 if not np.isfinite(err) else max(0.2, 0.9 * err ** (-1 / 5))
            h *= factor
            continue

        t = t_max if abs(t + dt - t_max) <= 1e-15 * max(1.0, abs(t_max)) else t + dt
        y = 0.5 * (y_new + y_new.T)
        k1, Ric = _rhs(L, y)
        ts.append(t)
        Ps.append(y.copy())
        Rics.append(Ric)
        reason = _singular(y, Ric)
        if reason:
            log.info("flow halted at t=%g: %s", t, reason)
            status = FlowStatus.SINGULARITY
            break
        err = max(err, 1e-10)
        factor = 0.9 * err ** (-0.7 / 5) * err_prev ** (0.4 / 5)
        h *= min(5.0, max(0.2, factor))
        err_prev = err
    else:
        if direction * (t_max - t) > 0:
            log.warning("flow stopped after max_steps=%d at t=%g", opts.max_steps, t)
            status = FlowStatus.MAX_STEPS

    log.debug("flow: %d accepted, %d rejected steps", len(ts) - 1, rejected)
    return FlowTrajectory(np.array(ts), np.array(Ps), np.array(Rics), status, rejected)


# -- algebraic solitons ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SolitonData:
    """Least-squares fit of ``Ric_0 = c I + D`` with ``D`` a derivation."""

    c: float
    D: np.ndarray
    derivation_residual: float
    is_soliton: bool

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "D": self.D.tolist(),
            "derivation_residual": self.derivation_residual,
            "is_soliton": self.is_soliton,
        }


def detect_algebraic_soliton(L: LieAlgebra, metric=None) -> SolitonData:
    """Test whether ``Ric_0 - c I`` is a derivation for some real ``c``.

    The derivation defect of ``Ric_0 - cI`` is ``pi(Ric_0) mu + c mu``, affine
    in ``c``, so the best ``c`` has a closed form. The abelian bracket is
    reported with ``c = 0`` and ``D = 0``.
    """
    metric = Metric.canonical(L.dim) if metric is None else (metric if isinstance(metric, Metric) else Metric(metric))
    Ric0 = ricci(L, metric).Ric
    mu = L.dense
    norm2 = inner_V(mu, mu)
    n = L.dim
    if norm2 == 0.0:
        return SolitonData(0.0, np.zeros((n, n)), 0.0, True)
    base = pi_action(Ric0, mu)
    c = -inner_V(base, mu) / norm2
    residual = float(np.sqrt(max(inner_V(base + c * mu, base + c * mu), 0.0)))
    return SolitonData(float(c), Ric0 - c * np.eye(n), residual, residual <= SOLITON_RTOL * norm2)


def soliton_domain(c: float) -> tuple[float, float]:
    """Maximal time interval on which ``1 - 2ct > 0``."""
    if c < 0:
        return 1.0 / (2.0 * c), np.inf
    if c > 0:
        return -np.inf, 1.0 / (2.0 * c)
    return -np.inf, np.inf


def closed_form_soliton_flow(sol: SolitonData, Ric0, t: float, P0=None) -> Metric:
    """Metric at time ``t`` of the Ricci flow from an algebraic soliton.

    Relative to the initial metric the solution is ``exp(s Ric_0)`` with
    ``s = log(1 - 2ct)/c``, i.e. eigenvalue ``r`` of ``Ric_0`` becomes
    ``(1 - 2ct)^(r/c)``; at ``c = 0`` the limit ``s = -2t`` is used.
    """
    if not sol.is_soliton:
        raise InvalidInput("closed form applies to algebraic solitons only")
    c = sol.c
    lo, hi = soliton_domain(c)
    if not lo < t < hi:
        raise DomainError(f"t={t} outside the maximal interval ({lo}, {hi}) for c={c}")
    Ric0 = np.asarray(Ric0, dtype=float)
    metric0 = Metric.canonical(Ric0.shape[0]) if P0 is None else (P0 if isinstance(P0, Metric) else Metric(P0))
    s = -2.0 * t if c == 0 else np.log1p(-2.0 * c * t) / c
    Q, Qinv = metric0.frame()
    R = Qinv @ Ric0 @ Q
    E = sym_expm(s * 0.5 * (R + R.T))
    G = Qinv @ E @ Qinv
    return Metric(0.5 * (G + G.T))


# -- diagonality -------------------------------------------------------------


def normalized_commutator(A: np.ndarray, B: np.ndarray) -> float:
    denom = np.linalg.norm(A) * np.linalg.norm(B)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(A @ B - B @ A) / denom)


def _ric0_eigenbasis(traj: FlowTrajectory) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and a ``P(0)``-orthonormal eigenbasis of ``Ric_0``."""
    Q, Qinv = Metric(traj.P[0]).frame()
    R = Qinv @ traj.Ric[0] @ Q
    w, U = jacobi_eigh(0.5 * (R + R.T))
    return w, Q @ U


def eigenbasis_offdiag(traj: FlowTrajectory) -> np.ndarray:
    """Relative off-diagonal Frobenius mass of each ``Ric_t`` in the ``Ric_0`` eigenbasis."""
    _, Y = _ric0_eigenbasis(traj)
    Yinv = np.linalg.inv(Y)
    out = np.zeros(len(traj))
    for idx, R in enumerate(traj.Ric):
        T = Yinv @ R @ Y
        norm = np.linalg.norm(T)
        out[idx] = 0.0 if norm == 0.0 else np.linalg.norm(T - np.diag(np.diag(T))) / norm
    return out


@dataclass(frozen=True)
class DiagonalityReport:
    max_commutator: float
    eigenbasis_offdiag: float
    degenerate_spectrum: bool
    worst_pair: tuple[float, float] | None = field(default=None)

    @property
    def verdict(self) -> str:
        if self.max_commutator <= DIAGONAL_TOL:
            return "diagonal"
        if self.max_commutator > NOT_DIAGONAL_TOL:
            return "not-diagonal"
        return "inconclusive"

    @property
    def flow_diagonal(self) -> bool | None:
        return {"diagonal": True, "not-diagonal": False}.get(self.verdict)

    def to_dict(self) -> dict:
        return {
            "max_commutator": self.max_commutator,
            "eigenbasis_offdiag": self.eigenbasis_offdiag,
            "degenerate_spectrum": self.degenerate_spectrum,
            "worst_pair": None if self.worst_pair is None else list(self.worst_pair),
            "verdict": self.verdict,
            "flow_diagonal": self.flow_diagonal,
        }


def diagonality_report(traj: FlowTrajectory) -> DiagonalityReport:
    """Pairwise commutators of the sampled metrics plus the ``Ric_0`` eigenbasis test.

    When ``Ric_0`` has a repeated eigenvalue its eigenbasis is not unique and
    the eigenbasis number is inconclusive; the commutator test still applies.
    """
    if len(traj) < 3:
        raise InvalidInput("diagonality report needs at least 3 samples")
    idx = np.unique(np.linspace(0, len(traj) - 1, min(len(traj), MAX_PAIR_SAMPLES)).round().astype(int))
    Ps = traj.P[idx]
    norms = np.linalg.norm(Ps, axis=(1, 2))
    prod = np.einsum("sij,tjk->stik", Ps, Ps)
    comm = np.linalg.norm(prod - np.transpose(prod, (1, 0, 2, 3)), axis=(2, 3))
    comm = comm / np.outer(norms, norms)
    s, t = np.unravel_index(np.argmax(comm), comm.shape)

    w, _ = _ric0_eigenbasis(traj)
    w = np.sort(w)
    gap_tol = 1e-8 * max(1.0, np.abs(w).max())
    degenerate = bool(len(w) > 1 and np.min(np.diff(w)) <= gap_tol)
    return DiagonalityReport(
        max_commutator=float(comm[s, t]),
        eigenbasis_offdiag=float(eigenbasis_offdiag(traj).max()),
        degenerate_spectrum=degenerate,
        worst_pair=(float(traj.t[idx[s]]), float(traj.t[idx[t]])),
    )
