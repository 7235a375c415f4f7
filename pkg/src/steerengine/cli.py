"""Command-line front end.

Every subcommand writes CSV or JSON to ``--out`` (or stdout).  File outputs
get a JSON sidecar ``<out>.manifest.json`` holding the resolved parameters
and the argument vector; ``steerengine rerun <manifest>`` replays it.

Exit codes: 0 success, 2 usage or parse error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, collision, engine, game, lhs, qcore

EXIT_USAGE = 2
EXIT_IO = 3
SCHEMA_PREFIX = "steerengine"


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:steps`` with both endpoints included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} is not of the form start:stop:steps")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"grid {text!r}: {exc}") from None
    if steps < 1 or (steps == 1 and start != stop):
        raise UsageError(f"grid {text!r} needs at least 2 steps for distinct endpoints")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError(f"grid {text!r} has non-finite endpoints")
    return np.linspace(start, stop, steps)


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.9g}"


def render_csv(schema: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA_PREFIX}.{schema}/v1\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _check_eta(eta: float) -> float:
    _check_etas([eta])
    return eta


def _check_etas(etas) -> None:
    etas = np.asarray(etas, dtype=float)
    bad = etas[(etas <= -1.0) | (etas >= 1.0)]
    if len(bad):
        raise UsageError(f"eta = {bad[0]} is outside (-1, 1)")
    hot = int((etas > 0).sum())
    if hot:
        print(f"warning: {hot} eta value(s) > 0 have no physical temperature", file=sys.stderr)


def emit(args, text: str, manifest: dict) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    manifest = {
        "subcommand": args.command,
        "version": __version__,
        "argv": args.argv,
        **manifest,
        "outputs": [str(out)],
    }
    try:
        out.write_text(text)
        Path(str(out) + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {out}: {exc}") from exc


def _eta_values(args) -> np.ndarray:
    if args.eta_grid is not None:
        values = parse_grid(args.eta_grid)
    elif args.eta is not None:
        values = np.array([args.eta])
    else:
        raise UsageError("give --eta or --eta-grid")
    _check_etas(values)
    return values


# subcommands ------------------------------------------------------------

def cmd_bound(args) -> None:
    etas = _eta_values(args)
    threshold = engine.violation_threshold_eta()
    rows = [(e, engine.classical_bound(e), engine.optimal_work(e), e > threshold) for e in etas]
    cols = ("eta", "bound", "w_opt", "threshold_flag")
    if args.format == "json":
        text = json.dumps([dict(zip(cols, (float(r[0]), r[1], r[2], bool(r[3])))) for r in rows], indent=2) + "\n"
    else:
        text = render_csv("bound", cols, rows)
    emit(args, text, {"params": {"eta": [float(e) for e in etas], "format": args.format, "threshold_eta": threshold}})


def cmd_region(args) -> None:
    etas = parse_grid(args.eta_grid)
    qs = parse_grid(args.q_grid)
    _check_etas(etas)
    if qs.min() < 0 or qs.max() > 1:
        raise UsageError("q grid must lie inside [0, 1]")
    rows = [("grid", r.eta, r.q, r.w_qu, r.bound, r.violation) for r in game.sweep_region(etas, qs)]
    rows += [("boundary", e, q, None, None, None) for e, q in game.region_boundary(etas)]
    text = render_csv("region", ("kind", "eta", "q", "w_qu", "bound", "violation"), rows)
    emit(args, text, {"params": {"eta_grid": args.eta_grid, "q_grid": args.q_grid}})


def _strategy(args, eta: float):
    if args.strategy == "quantum":
        return game.Quantum(args.q)
    if args.strategy == "classical":
        if args.ensemble_file is None:
            raise UsageError("--strategy classical needs --ensemble-file")
        try:
            ens = lhs.HiddenStateEnsemble.load(args.ensemble_file)
        except OSError as exc:
            raise UsageError(f"cannot read ensemble file: {exc}") from None
        except lhs.EnsembleError as exc:
            raise UsageError(f"{args.ensemble_file}: {exc}") from None
        if abs(ens.eta - eta) > 1e-12:
            raise UsageError(f"{args.ensemble_file}: ensemble eta {ens.eta} differs from --eta {eta}")
        return game.ClassicalLHS(ens)
    return game.FixedDecomposition(args.strategy.upper())


def cmd_game(args) -> None:
    eta = _check_eta(args.eta)
    if not 0 <= args.q <= 1:
        raise UsageError("--q must lie in [0, 1]")
    params = engine.EngineParams(eta, args.q, args.c)
    strategy = _strategy(args, eta)
    try:
        cfg = game.GameConfig.from_cells(
            params, args.cells, mode=args.mode, seed=args.seed, strategy=strategy,
            collision_steps=args.collision_steps,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    summary = game.run_game(cfg)
    params_doc = {
        "eta": eta, "q": args.q, "c": params.ratio, "cells": args.cells, "mode": args.mode,
        "strategy": args.strategy, "ensemble_file": args.ensemble_file,
        "collision_steps": args.collision_steps,
    }
    emit(args, summary.to_json() + "\n", {"params": params_doc, "seed": args.seed})


def cmd_lhs_search(args) -> None:
    eta = _check_eta(args.eta)
    if args.budget < 1:
        raise UsageError("--budget must be at least 1")
    res = lhs.search_max_classical_work(eta, args.budget, seed=args.seed, c=args.c, workers=args.workers)
    doc = {
        "eta": eta,
        "c": engine.default_ratio(eta) if args.c is None else args.c,
        "max_found": res.value,
        "bound": res.bound,
        "margin": res.margin,
        "best": res.best.to_dict(),
    }
    params_doc = {"eta": eta, "budget": args.budget, "workers": args.workers, "c": args.c}
    emit(args, json.dumps(doc, indent=2) + "\n", {"params": params_doc, "seed": args.seed})


def cmd_collide(args) -> None:
    if args.mode == "work":
        r = (args.x, args.y, args.z)
        try:
            rho = qcore.bloch_to_density(r)
            cfg = collision.WorkCollisionConfig(args.phi, args.steps, args.scale)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        run = collision.run_work_extraction(rho, cfg)
        gains = np.array([rec.mean_energy_gain for rec in run.records])
        cumulative = np.cumsum(gains)
        rows = [
            (k + 1, rec.mean_energy_gain, rec.excitation_probability, cum)
            for k, (rec, cum) in enumerate(zip(run.records, cumulative))
        ]
        delta_e = collision.energy_change(rho, run.final_state)
        text = render_csv("collide-work", ("k", "mean_gain", "excitation_p", "cumulative_work"), rows)
        params_doc = {"mode": "work", "bloch": list(r), "phi": args.phi, "steps": args.steps, "scale": args.scale}
        extra = {
            "total_mean_work": run.total_mean_work,
            "system_energy_change": delta_e,
            "conservation_residual": run.total_mean_work + delta_e,
            "final_bloch": list(qcore.density_to_bloch(run.final_state)),
        }
        emit(args, text, {"params": params_doc, "result": extra})
        return

    eta = _check_eta(args.eta)
    try:
        cfg = collision.ThermalizationConfig(eta, args.theta, args.steps, args.scheme)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.start == "fixed":
        rho0 = collision.subenv_state(eta)
    else:
        rho0 = qcore.projector(qcore.ket("00"))
    run = collision.run_thermalization(rho0, cfg, tol=args.tol)
    rows = [
        (k + 1, d, b[0], b[2]) for k, (d, b) in enumerate(zip(run.distances, run.bloch_s))
    ]
    text = render_csv("collide-thermalize", ("step", "trace_distance", "s_bloch_x", "s_bloch_z"), rows)
    params_doc = {
        "mode": "thermalize", "eta": eta, "theta": args.theta, "steps": args.steps,
        "scheme": args.scheme, "start": args.start, "tol": args.tol,
    }
    emit(args, text, {"params": params_doc, "result": {"converged_step": run.converged_step}})


def cmd_rerun(args) -> None:
    try:
        manifest = json.loads(Path(args.manifest).read_text())
        argv = manifest["argv"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
    code = main(argv)
    if code:
        raise SystemExit(code)


# parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steerengine", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="classical work bound versus eta")
    b.add_argument("--eta", type=float)
    b.add_argument("--eta-grid")
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bound)

    r = sub.add_parser("region", help="violation region over (eta, q)")
    r.add_argument("--eta-grid", required=True)
    r.add_argument("--q-grid", default="0:1:101")
    r.add_argument("--out")
    r.set_defaults(func=cmd_region)

    g = sub.add_parser("game", help="simulate the red/blue cell protocol")
    g.add_argument("--eta", type=float, required=True)
    g.add_argument("--q", type=float, default=1.0)
    g.add_argument("--c", type=float, help="override the blue/red ratio (voids the verdict)")
    g.add_argument("--cells", type=int, default=100000)
    g.add_argument("--mode", choices=game.MODES, default="analytic")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--strategy", choices=("quantum", "classical", "d1", "d2"), default="quantum")
    g.add_argument("--ensemble-file")
    g.add_argument("--collision-steps", type=int, default=game.DEFAULT_COLLISION_STEPS)
    g.add_argument("--out")
    g.set_defaults(func=cmd_game)

    s = sub.add_parser("lhs-search", help="search hidden-state ensembles for the classical maximum")
    s.add_argument("--eta", type=float, required=True)
    s.add_argument("--budget", type=int, default=100000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--c", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_lhs_search)

    c = sub.add_parser("collide", help="collision-model trajectories")
    c.add_argument("--mode", choices=("work", "thermalize"), required=True)
    c.add_argument("--x", type=float, default=0.0)
    c.add_argument("--y", type=float, default=0.0)
    c.add_argument("--z", type=float, default=1.0)
    c.add_argument("--phi", type=float, default=math.pi)
    c.add_argument("--steps", type=int, default=10000)
    c.add_argument("--scale", type=float, default=0.5, help="ancilla Hamiltonian scale * sigma_z")
    c.add_argument("--eta", type=float, default=0.0)
    c.add_argument("--theta", type=float, default=0.1)
    c.add_argument("--scheme", choices=collision.SCHEMES, default="joint")
    c.add_argument("--start", choices=("ground", "fixed"), default="ground")
    c.add_argument("--tol", type=float)
    c.add_argument("--out")
    c.set_defaults(func=cmd_collide)

    m = sub.add_parser("rerun", help="replay the command recorded in a manifest")
    m.add_argument("manifest")
    m.set_defaults(func=cmd_rerun)
    return p


def _join_grid_values(argv: list[str]) -> list[str]:
    # "--eta-grid -0.9:0:10" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--eta-grid", "--q-grid"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    argv = _join_grid_values(argv)
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        args.func(args)
    except UsageError as exc:
        print(f"steerengine {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as exc:
        print(f"steerengine {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
