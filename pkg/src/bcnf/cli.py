"""Command-line surface: verification, point finding, scenario checks, sweeps, portraits.

Exit codes: 0 on success, 1 when a check or certification fails, 2 for
invalid input (argparse reserves 2 for usage errors as well).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import presets
from .codim3 import check_codim3
from .codim4 import check_codim4, candidates_to_json, eigenline_directions, find_codim4
from .core import Params, UnitEigenvalueError, cycle_to_csv, solve_cycle
from .quadfield import verify_proposition, verify_threshold_float
from .sweep import (
    Scenario,
    kappa_at,
    ratios_to_csv,
    run_sweep,
    sweep_to_csv,
    sweep_to_json,
)
from .svgplot import scatter_svg, sweep_svg
from .words import family_word, parse_word

DEFAULT_CHECK_TOL = {
    "paramF": 1e-9,
    "paramI": 1e-6,
    "paramC": 1e-6,
    "paramA": 1e-9,
    "paramB": 1e-6,
    "paramK": 1e-9,
    "paramSi10": 1e-6,
}

RATIO_TARGETS = {Scenario.CODIM3: None, Scenario.CODIM4: 0.25}


class InputError(Exception):
    """Invalid command input (exit code 2)."""


def _load_config(path: str | None, allowed: set[str]) -> dict:
    if path is None:
        return {}
    obj = json.loads(Path(path).read_text())
    if not isinstance(obj, dict):
        raise InputError("config file must hold a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    return obj


def _out_dir(spec: str | None) -> Path | None:
    if spec is None:
        return None
    out = Path(spec)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(out: Path | None, name: str, text: str) -> None:
    if out is not None:
        (out / name).write_text(text)


def cmd_verify(args) -> int:
    example = args.example.upper()
    k_max = args.kmax
    if example in ("A", "K"):
        cert = verify_proposition(example, k_max)
    elif example == "B":
        p = presets.get_params("paramB")
        x, y = presets.get_words("paramB")
        cert = verify_threshold_float(p, x, y, expected=4, k_max=k_max)
    else:
        raise InputError(f"unknown example {example!r}: choose A, B or K")
    print(cert.to_json())
    _write(_out_dir(args.out), f"certificate_{example}.json", cert.to_json())
    return 0 if cert.certified else 1


def cmd_find_codim4(args) -> int:
    cfg = _load_config(
        args.config,
        {"x", "y", "mu", "tauR", "deltaR", "grid", "kProbe"},
    )
    x = parse_word(args.x or cfg.get("x", ""))
    y = parse_word(args.y or cfg.get("y", ""))
    mu = args.mu if args.mu is not None else cfg.get("mu", 1.0)
    tau_range = tuple(cfg.get("tauR", (args.tau_min, args.tau_max)))
    delta_range = tuple(cfg.get("deltaR", (args.delta_min, args.delta_max)))
    grid = args.grid or cfg.get("grid", 200)
    roots = find_codim4(x, y, mu, tau_range, delta_range, grid=grid,
                        k_probe=cfg.get("kProbe", 64))
    text = candidates_to_json(roots)
    print(text)
    _write(_out_dir(args.out), "codim4_candidates.json", text)
    return 0 if roots else 1


def _resolve_point(args) -> tuple[Params, str, str, float]:
    if args.preset:
        p = presets.get_params(args.preset)
        x, y = presets.get_words(args.preset)
        tol = args.tol if args.tol is not None else DEFAULT_CHECK_TOL[args.preset]
        return p, x, y, tol
    if not (args.params and args.x and args.y):
        raise InputError("need --preset or all of --params/--x/--y")
    p = Params.from_json(Path(args.params).read_text())
    tol = args.tol if args.tol is not None else 1e-9
    return p, parse_word(args.x), parse_word(args.y), tol


def cmd_check(args) -> int:
    p, x, y, tol = _resolve_point(args)
    if args.scenario == "codim3":
        report = check_codim3(p, x, y, tol)
    else:
        report = check_codim4(p, x, y, tol)
    print(report.to_json())
    _write(_out_dir(args.out), f"check_{args.scenario}.json", report.to_json())
    return 0 if report.passed else 1


def cmd_sweep(args) -> int:
    if not args.preset:
        raise InputError("sweep requires --preset")
    fam = presets.get_family(args.preset)
    scenario = presets.get_scenario(args.preset)
    tol_check = DEFAULT_CHECK_TOL[args.preset]
    if scenario is Scenario.CODIM3:
        gate = check_codim3(fam.base, fam.x, fam.y, tol_check, direction=fam.direction)
    else:
        gate = check_codim4(fam.base, fam.x, fam.y, tol_check)
    if not gate.passed:
        print(gate.to_json())
        print(f"scenario diagnostic failed at eps=0 for {args.preset}", file=sys.stderr)
        return 1
    result = run_sweep(
        fam,
        k_max=args.kmax,
        eps_star=args.eps_star,
        tol=args.tol if args.tol is not None else 1e-10,
        scenario=scenario,
        workers=args.workers,
    )
    if scenario is Scenario.CODIM3:
        from .codim3 import eigen_basis

        target = 1.0 / eigen_basis(fam.base, fam.x).lambda2
        law = "eps_{K+1}/eps_K"
    else:
        target = 0.25
        law = "eps_{2K}/eps_K"
    print(f"# ratio law {law}, target {target:.6f}")
    print("K,epsK,ratio")
    ratio_by_k = dict(result.ratios)
    for idx, eps in enumerate(result.eps_k, start=1):
        r = ratio_by_k.get(idx)
        print(f"{idx},{eps:.6e},{'' if r is None else f'{r:.6f}'}")
    out = _out_dir(args.out)
    _write(out, "sweep_intervals.csv", sweep_to_csv(result))
    _write(out, "sweep_ratios.csv", ratios_to_csv(result))
    _write(out, "sweep_summary.json", sweep_to_json(result))
    _write(out, "sweep_diagram.svg", sweep_svg(result))
    return 0


def cmd_portrait(args) -> int:
    if args.preset:
        p = presets.get_params(args.preset)
        x, y = presets.get_words(args.preset)
    else:
        if not (args.params and args.x and args.y):
            raise InputError("need --preset or all of --params/--x/--y")
        p = Params.from_json(Path(args.params).read_text())
        x, y = parse_word(args.x), parse_word(args.y)
    ks = [int(tok) for tok in args.k.split(",") if tok.strip()] if args.k else []
    if not ks:
        raise InputError("portrait requires a nonempty --k list, e.g. --k 8,9,10")
    out = _out_dir(args.out)
    lines = ["k,i,symbol,x,y"]
    series = {}
    solved = 0
    for k in ks:
        word = family_word(x, k, y)
        try:
            cyc = solve_cycle(p, word, family=(x, k, y))
        except UnitEigenvalueError as exc:
            print(f"k={k}: {exc}", file=sys.stderr)
            continue
        solved += 1
        series[f"k={k}"] = list(cyc.points)
        for i, (s, (px, py)) in enumerate(zip(word, cyc.points)):
            lines.append(f"{k},{i},{s},{px!r},{py!r}")
    if solved == 0:
        print("no requested cycle could be solved", file=sys.stderr)
        return 1
    _write(out, "portrait_points.csv", "\n".join(lines) + "\n")
    try:
        eigenlines = eigenline_directions(p, x)
    except Exception as exc:  # vertical eigenspace or no unit eigenvalue
        print(f"eigenlines unavailable: {exc}", file=sys.stderr)
        eigenlines = []
    eig_csv = ["m,symbol,dirx,diry"]
    for m, sym, (dx, dy) in eigenlines:
        eig_csv.append(f"{m},{sym},{dx!r},{dy!r}")
    _write(out, "portrait_eigenlines.csv", "\n".join(eig_csv) + "\n")
    if args.svg:
        svg = scatter_svg(series, [(dx, dy, f"m={m}") for m, _, (dx, dy) in eigenlines])
        _write(out, "portrait.svg", svg)
    if out is None:
        print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bcnf",
        description="Periodic-solution tooling for the planar border-collision normal form",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="certify an admissibility threshold")
    v.add_argument("example", choices=["A", "B", "K"])
    v.add_argument("--kmax", type=int, default=100)
    v.add_argument("--out")
    v.set_defaults(fn=cmd_verify)

    f = sub.add_parser("find-codim4", help="scan for repeated-unit-eigenvalue points")
    f.add_argument("--config")
    f.add_argument("--x")
    f.add_argument("--y")
    f.add_argument("--mu", type=float)
    f.add_argument("--tau-min", type=float, default=-3.0)
    f.add_argument("--tau-max", type=float, default=3.0)
    f.add_argument("--delta-min", type=float, default=0.5)
    f.add_argument("--delta-max", type=float, default=2.0)
    f.add_argument("--grid", type=int)
    f.add_argument("--out")
    f.set_defaults(fn=cmd_find_codim4)

    c = sub.add_parser("check", help="run a scenario condition report")
    c.add_argument("scenario", choices=["codim3", "codim4"])
    c.add_argument("--preset", choices=sorted(presets.PARAMS))
    c.add_argument("--params", help="JSON file with tauL/deltaL/tauR/deltaR/mu")
    c.add_argument("--x")
    c.add_argument("--y")
    c.add_argument("--tol", type=float)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_check)

    s = sub.add_parser("sweep", help="compute validity intervals and scaling ratios")
    s.add_argument("--preset", choices=sorted(presets.FAMILY_DIRECTION))
    s.add_argument("--kmax", type=int, default=60)
    s.add_argument("--eps-star", type=float, default=None)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("portrait", help="emit cycle points and eigenspace lines")
    p.add_argument("--preset", choices=sorted(presets.PARAMS))
    p.add_argument("--params")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--k", help="comma-separated cycle indices, e.g. 8,9,10")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_portrait)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
