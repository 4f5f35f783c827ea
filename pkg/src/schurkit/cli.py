"""Command-line front end.

Verbs: analyze, schur, realize, verify, sample, random.  Inputs and
outputs are the JSON schemas defined in :mod:`schurkit.serialize`; sample
emits CSV.  Exit codes: 0 success, 1 residual failure, 2 parse error,
3 validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import linalg as la
from . import serialize
from .contractions import Contraction
from .errors import SchurkitError
from .linalg import Tolerance, adj
from .schur import CHAIN_THRESHOLDS, build_chain, verify_chain
from .systems import DiscreteSystem, disk_grid, random_conservative_system

EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3

# Above this colligation unitarity residual the system is treated as
# structurally broken and the Schur chain is not attempted.
_VERIFY_GATE = 1e-6


class ParseFailure(Exception):
    pass


class ValidationFailure(Exception):
    pass


@dataclass
class Command:
    verb: str
    input_path: str | None = None
    output_path: str | None = None
    n_max: int | None = None
    rank_tol: float = 1e-10
    eq_tol: float = 1e-9
    grid_radii: tuple[float, ...] = (0.3, 0.6, 0.9)
    seed: int = 0
    state_dim: int = 4
    io_dim: int = 2

    def tolerance(self) -> Tolerance:
        return Tolerance(rank_rel=self.rank_tol, eq_abs=self.eq_tol)


def _load_system(cmd: Command) -> DiscreteSystem:
    if cmd.input_path is None:
        raise ParseFailure("--input is required for this verb")
    try:
        text = Path(cmd.input_path).read_text()
    except OSError as exc:
        raise ParseFailure(f"cannot read {cmd.input_path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"invalid JSON: {exc}") from exc
    try:
        return serialize.system_from_json(obj, cmd.tolerance())
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseFailure(f"bad system schema: {exc}") from exc
    except SchurkitError as exc:
        raise ValidationFailure(str(exc)) from exc


def _emit(cmd: Command, text: str):
    if cmd.output_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(cmd.output_path).write_text(text)


def _defect_profile_json(sys: DiscreteSystem, n_max: int | None):
    if sys.state_dim == 0:
        return None
    state = Contraction(sys.a, sys.tol)
    if not state.is_cnu():
        return None
    depth = sys.state_dim if n_max is None else n_max
    profile = state.defect_profile(depth)
    return {"delta": profile.delta, "delta_star": profile.delta_star}


def _classification_json(sys: DiscreteSystem) -> dict:
    return sys.classify().as_dict()


def _chain_json(chain, report) -> dict:
    return {
        "gammas": [la.matrix_to_json(g) for g in chain.params.gammas],
        "h_dims": [s.dim for s in chain.h_chain],
        "iterates": [
            [serialize.system_to_json(s, s.classify().as_dict()) for s in family]
            for family in chain.families
        ],
        "terminated": chain.params.terminated,
        "residuals": dict(sorted(report.residuals.items())),
    }


def _run_analyze(cmd: Command) -> int:
    system = _load_system(cmd)
    out = {
        "dims": {"input": system.in_dim, "output": system.out_dim,
                 "state": system.state_dim},
        "classification": _classification_json(system),
        "defect_profile": _defect_profile_json(system, cmd.n_max),
    }
    _emit(cmd, serialize.dumps(out))
    return EXIT_OK


def _build_verified_chain(cmd: Command, system: DiscreteSystem):
    grid = disk_grid(cmd.grid_radii)
    chain = build_chain(system, cmd.n_max)
    report = verify_chain(chain, grid)
    return chain, report


def _run_schur(cmd: Command) -> int:
    system = _load_system(cmd)
    chain, report = _build_verified_chain(cmd, system)
    _emit(cmd, serialize.dumps(_chain_json(chain, report)))
    return EXIT_OK


def _run_realize(cmd: Command) -> int:
    system = _load_system(cmd)
    chain, _ = _build_verified_chain(cmd, system)
    out = {
        "h_dims": [s.dim for s in chain.h_chain],
        "terminated": chain.params.terminated,
        "iterates": [
            [serialize.system_to_json(s, s.classify().as_dict()) for s in family]
            for family in chain.families
        ],
    }
    _emit(cmd, serialize.dumps(out))
    return EXIT_OK


def _run_verify(cmd: Command) -> int:
    system = _load_system(cmd)
    full = system.colligation()
    gate = max(
        la.matnorm_diff(adj(full) @ full, la.eye(full.shape[1])),
        la.matnorm_diff(full @ adj(full), la.eye(full.shape[0])),
    )
    if gate > _VERIFY_GATE:
        out = {
            "classification": _classification_json(system),
            "defect_profile": None,
            "gammas": [],
            "termination_step": None,
            "residuals": {"colligation_unitarity": gate},
            "thresholds": {"colligation_unitarity": CHAIN_THRESHOLDS["colligation_unitarity"]},
            "pass": False,
        }
        _emit(cmd, serialize.dumps(out))
        return EXIT_RESIDUAL
    chain, report = _build_verified_chain(cmd, system)
    out = {
        "classification": _classification_json(system),
        "defect_profile": _defect_profile_json(system, cmd.n_max),
        "gammas": [la.matrix_to_json(g) for g in chain.params.gammas],
        "termination_step": chain.termination_step,
        "residuals": dict(sorted(report.residuals.items())),
        "thresholds": dict(sorted(report.thresholds.items())),
        "pass": report.ok,
    }
    _emit(cmd, serialize.dumps(out))
    return EXIT_OK if report.ok else EXIT_RESIDUAL


def _run_sample(cmd: Command) -> int:
    system = _load_system(cmd)
    grid = disk_grid(cmd.grid_radii)
    values = [(lam, system.transfer(lam)) for lam in grid]
    _emit(cmd, serialize.sample_csv(values))
    return EXIT_OK


def _run_random(cmd: Command) -> int:
    rng = np.random.default_rng(cmd.seed)
    system = random_conservative_system(
        cmd.state_dim, cmd.io_dim, rng, cmd.tolerance()
    )
    _emit(cmd, serialize.dumps(
        serialize.system_to_json(system, system.classify().as_dict())
    ))
    return EXIT_OK


_RUNNERS = {
    "analyze": _run_analyze,
    "schur": _run_schur,
    "realize": _run_realize,
    "verify": _run_verify,
    "sample": _run_sample,
    "random": _run_random,
}


def run(cmd: Command) -> int:
    """Execute a command; returns the process exit code."""
    try:
        cmd.tolerance()  # reject bad tolerance values before touching input
        return _RUNNERS[cmd.verb](cmd)
    except ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationFailure, SchurkitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def _parse_radii(text: str) -> tuple[float, ...]:
    try:
        radii = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad radii list {text!r}") from exc
    if not radii or any(not (0.0 < r < 1.0) for r in radii):
        raise argparse.ArgumentTypeError("radii must lie strictly inside (0, 1)")
    return radii


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schurkit",
        description="Schur parameters and conservative realizations of "
                    "matrix Schur-class functions",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, helptext in (
        ("analyze", "classification flags and defect profile of a system"),
        ("schur", "Schur parameters, subspace chain, and iterate realizations"),
        ("realize", "conservative realizations of the Schur iterates"),
        ("verify", "cross-verify the chain; exit 0 iff all residuals pass"),
        ("sample", "CSV of transfer values on the sampling grid"),
        ("random", "reproducible random simple conservative system"),
    ):
        p = sub.add_parser(verb, help=helptext)
        p.add_argument("--input", dest="input_path")
        p.add_argument("--output", dest="output_path")
        p.add_argument("--n-max", dest="n_max", type=int)
        p.add_argument("--rank-tol", dest="rank_tol", type=float, default=1e-10)
        p.add_argument("--eq-tol", dest="eq_tol", type=float, default=1e-9)
        p.add_argument("--grid-radii", dest="grid_radii", type=_parse_radii,
                       default=(0.3, 0.6, 0.9))
        p.add_argument("--seed", dest="seed", type=int, default=0)
        if verb == "random":
            p.add_argument("--state-dim", dest="state_dim", type=int, default=4)
            p.add_argument("--io-dim", dest="io_dim", type=int, default=2)
    return parser


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cmd = Command(
        verb=ns.verb,
        input_path=ns.input_path,
        output_path=ns.output_path,
        n_max=ns.n_max,
        rank_tol=ns.rank_tol,
        eq_tol=ns.eq_tol,
        grid_radii=tuple(ns.grid_radii),
        seed=ns.seed,
        state_dim=getattr(ns, "state_dim", 4),
        io_dim=getattr(ns, "io_dim", 2),
    )
    return run(cmd)


if __name__ == "__main__":
    sys.exit(main())
