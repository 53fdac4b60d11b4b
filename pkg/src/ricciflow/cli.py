"""Command-line front end.

    ricciflow nice --input catalog:L6_11
    ricciflow ricci --input algebra.json --metric metric.json
    ricciflow flow --input catalog:n4 --t-max 0.2 --output n4.csv

Exit status is 0 on success and 2 on invalid input; the diagnostic on
stderr names the offending field or file.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import catalog
from .algebra import (
    InvalidInput,
    LieAlgebra,
    derivation_algebra,
    is_lie_algebra,
    is_solvable,
    is_unimodular,
    jacobi_defect,
    lower_central_series,
    type_of,
)
from .curvature import Metric, ricci, stably_ricci_diagonal_exact, stably_ricci_diagonal_numeric
from .flow import (
    FlowOptions,
    closed_form_soliton_flow,
    detect_algebraic_soliton,
    diagonality_report,
    integrate_flow,
)
from .nice import is_nice_basis, nice_via_roots, simple_derivation_nice_basis

COMMANDS = ("info", "nice", "ricci", "stably-diagonal", "soliton", "flow", "catalog")
EXIT_INVALID = 2

log = logging.getLogger("ricciflow")


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    metric: str = "canonical"
    t_max: float = 1.0
    dt_init: float | None = None
    tol: float = 1e-10
    samples: int = 50
    seed: int = 1
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise CliError(f"command: unknown command {self.command!r}")
        if self.tol <= 0:
            raise CliError("--tol must be positive")
        if self.samples < 1:
            raise CliError("--samples must be positive")
        if self.dt_init is not None and self.dt_init <= 0:
            raise CliError("--dt-init must be positive")
        if self.t_max == 0 or not np.isfinite(self.t_max):
            raise CliError("--t-max must be finite and nonzero")
        if self.format not in ("json", "csv"):
            raise CliError(f"--format must be json or csv, got {self.format!r}")


def load_algebra(spec: str | None) -> LieAlgebra:
    if spec is None:
        raise CliError("--input is required")
    if spec.startswith("catalog:"):
        try:
            return catalog.get(spec[len("catalog:"):]).algebra
        except catalog.UnknownEntry as exc:
            raise CliError(f"--input: {exc.args[0]}") from None
    try:
        text = Path(spec).read_text()
    except OSError as exc:
        raise CliError(f"--input: cannot read {spec}: {exc.strerror}") from None
    try:
        return LieAlgebra.from_json(text)
    except InvalidInput as exc:
        raise CliError(f"--input: {exc}") from None


def load_metric(spec: str, dim: int) -> Metric:
    """``canonical`` or a JSON file holding a matrix, either bare or under key ``P``."""
    if spec == "canonical":
        return Metric.canonical(dim)
    try:
        data = json.loads(Path(spec).read_text())
    except OSError as exc:
        raise CliError(f"--metric: cannot read {spec}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"--metric: not valid JSON: {exc}") from None
    if isinstance(data, dict):
        if "P" not in data:
            raise CliError("--metric: missing field 'P'")
        data = data["P"]
    try:
        P = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise CliError("--metric: field 'P' must be a numeric matrix") from None
    if P.shape != (dim, dim):
        raise CliError(f"--metric: field 'P' must be {dim}x{dim}, got shape {P.shape}")
    try:
        return Metric(P)
    except InvalidInput as exc:
        raise CliError(f"--metric: {exc}") from None


def _info(L: LieAlgebra, cfg: RunConfig) -> dict:
    lie = is_lie_algebra(L)
    out = {"dim": L.dim, "brackets": len(L.entries), "jacobi_defect": jacobi_defect(L), "lie_algebra": lie}
    if lie:
        out.update(
            lower_central_series=lower_central_series(L),
            nilpotent=type_of(L) is not None,
            type=None if type_of(L) is None else list(type_of(L)),
            solvable=is_solvable(L),
            unimodular=is_unimodular(L),
            derivation_dim=len(derivation_algebra(L)),
        )
    out["nice"] = is_nice_basis(L).nice
    return out


def _nice(L: LieAlgebra, cfg: RunConfig) -> dict:
    out = is_nice_basis(L).to_dict()
    try:
        out["root_criterion"] = nice_via_roots(L).to_dict()
    except InvalidInput as exc:
        out["root_criterion"] = {"applicable": False, "reason": str(exc)}
    if type_of(L) is not None:
        A = simple_derivation_nice_basis(L, seed=cfg.seed)
        out["simple_derivation_basis"] = None if A is None else A.A.tolist()
    return out


def _ricci(L: LieAlgebra, cfg: RunConfig) -> dict:
    metric = load_metric(cfg.metric, L.dim)
    report = ricci(L, metric)
    out = report.to_dict()
    out["eigenvalues"] = sorted(np.linalg.eigvals(report.Ric).real.tolist())
    return out


def _stably(L: LieAlgebra, cfg: RunConfig) -> dict:
    out = stably_ricci_diagonal_numeric(L, cfg.samples, cfg.seed).to_dict()
    try:
        out["exact_analysis"] = stably_ricci_diagonal_exact(L).to_dict()
    except InvalidInput as exc:
        out["exact_analysis"] = {"applicable": False, "reason": str(exc)}
    return out


def _soliton(L: LieAlgebra, cfg: RunConfig) -> dict:
    return detect_algebraic_soliton(L, load_metric(cfg.metric, L.dim)).to_dict()


def _flow(L: LieAlgebra, cfg: RunConfig) -> tuple[dict, str]:
    metric = load_metric(cfg.metric, L.dim)
    traj = integrate_flow(L, metric, cfg.t_max, FlowOptions(rtol=cfg.tol, atol=cfg.tol, dt_init=cfg.dt_init))
    summary: dict = {
        "status": traj.status.value,
        "steps": len(traj) - 1,
        "rejected": traj.steps_rejected,
        "t_final": float(traj.t[-1]),
        "P_final": traj.P[-1].tolist(),
    }
    if len(traj) >= 3:
        rep = diagonality_report(traj)
        summary["flow_diagonal"] = rep.flow_diagonal
        summary["diagonality"] = rep.to_dict()
    else:
        summary["flow_diagonal"] = None
    sol = detect_algebraic_soliton(L, metric)
    summary["soliton"] = sol.to_dict()
    if sol.is_soliton:
        errs = [
            np.linalg.norm(P - closed_form_soliton_flow(sol, traj.Ric[0], t, metric).P) / np.linalg.norm(P)
            for t, P in zip(traj.t, traj.P)
        ]
        summary["closed_form_max_rel_error"] = float(max(errs))
    return summary, traj.to_csv()


def _catalog(cfg: RunConfig) -> dict:
    if cfg.input is None:
        return {"entries": catalog.names()}
    return load_algebra(cfg.input).to_dict()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(f"--output: cannot write {path}: {exc.strerror}") from None


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    if cfg.command == "catalog":
        _write(cfg.output, _dump(_catalog(cfg)))
        return 0
    if cfg.format == "csv" and cfg.command != "flow":
        raise CliError("--format csv is only available for the flow command")
    L = load_algebra(cfg.input)
    try:
        if cfg.command == "flow":
            summary, text = _flow(L, cfg)
            summary = {"command": "flow", "input": cfg.input, "metric": cfg.metric, "t_max": cfg.t_max,
                       "tol": cfg.tol, **summary}
            if cfg.output is not None:
                _write(cfg.output, text)
                _write(str(Path(cfg.output).with_suffix(".json")), _dump(summary))
                sys.stdout.write(_dump(summary))
            else:
                _write(None, text if cfg.format == "csv" else _dump(summary))
            return 0
        handler = {"info": _info, "nice": _nice, "ricci": _ricci, "stably-diagonal": _stably, "soliton": _soliton}
        result = handler[cfg.command](L, cfg)
    except InvalidInput as exc:
        raise CliError(f"--input: {exc}") from None
    meta = {"command": cfg.command, "input": cfg.input}
    if cfg.command == "stably-diagonal":
        meta["seed"] = cfg.seed
        meta["samples_requested"] = cfg.samples
    _write(cfg.output, _dump({**meta, **result}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="algebra JSON file or catalog:NAME")
    common.add_argument("--metric", default="canonical", help="metric JSON file or 'canonical'")
    common.add_argument("--t-max", type=float, default=1.0, dest="t_max")
    common.add_argument("--dt-init", type=float, default=None, dest="dt_init")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--samples", type=int, default=50)
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--output", default=None)
    common.add_argument("--format", default="json", choices=("json", "csv"))

    parser = argparse.ArgumentParser(prog="ricciflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _configure_logging() -> None:
    level = os.environ.get("RICCIFLOW_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(**vars(args))
        return run(cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
