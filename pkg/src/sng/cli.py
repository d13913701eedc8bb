"""Command-line front end.

Five subcommands: ``solve`` (one universal bound state), ``spectrum``
(states 0..n_max), ``rescale`` (universal solution to physical units),
``evolve`` (Crank–Nicolson time evolution), and ``check`` (release-gate
suites).  Data goes to JSON summaries and CSV tables; identical flags
produce byte-identical files, so no timestamps appear anywhere.

Exit codes: 0 success; 1 check-suite failure; 2 invalid flags or input
schema; 3 no eigenvalue bracket found; 4 convergence failure; 5 evolution
step rejected (a suggested smaller dt is printed).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .checks import SUITES, run_suites
from .errors import (
    ConvergenceError,
    InvalidArgumentError,
    InvalidBracketError,
    InvalidFieldError,
    SngError,
    StepRejectedError,
    WrongStateError,
)
from .evolution import NonlinearityKind, evolve, gaussian_state, state_from_profile
from .grids import RadialField, make_grid
from .physical import (
    PhysicalParams,
    energy_breakdown,
    gravitational_bohr_radius,
    half_max_radius,
    rescale_to_physical,
    rms_radius,
)
from .shooting import UniversalSolution, find_bracket, scan_brackets, shoot_gamma0

__all__ = ["main"]

_GENERATED_BY = f"sng {__version__}"


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    """17 significant digits, scientific — round-trips any double."""
    return f"{x:.16e}"


def _write_csv(path: str, header: str, columns: list[np.ndarray]) -> None:
    rows = zip(*columns)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _emit_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _solution_summary(sol: UniversalSolution) -> dict:
    return {
        "n": sol.n,
        "gamma0": sol.gamma0,
        "gamma1": sol.gamma1,
        "epsilon_star": sol.epsilon_star,
        "node_count": sol.node_count,
        "bracket_width": sol.bracket_width,
        "grid": {"rho_max": sol.grid.rho_max, "points": sol.grid.n_points},
        "generated_by": _GENERATED_BY,
    }


def _write_profile_csv(sol: UniversalSolution, path: str) -> None:
    _write_csv(path, "rho,f_star,g_star",
               [sol.grid.nodes, sol.f_star.values, sol.g_star.values])


# ---------------------------------------------------------------------------
# physical-parameter flags (shared by rescale and evolve)
# ---------------------------------------------------------------------------

def _add_params_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--natural", action="store_true",
                     help="natural units: mass = hbar = G = particle count = 1")
    sub.add_argument("--mass-kg", type=float, default=None,
                     help="constituent particle mass in kg")
    sub.add_argument("--n-particles", type=float, default=None,
                     help="number of particles in the condensate")


def _params_from_flags(args, required: bool) -> PhysicalParams:
    physical = args.mass_kg is not None or args.n_particles is not None
    if args.natural and physical:
        raise InvalidArgumentError("--natural excludes --mass-kg/--n-particles")
    if physical and (args.mass_kg is None or args.n_particles is None):
        raise InvalidArgumentError("--mass-kg and --n-particles go together")
    if physical:
        return PhysicalParams(mass=args.mass_kg, n_particles=args.n_particles)
    if args.natural or not required:
        return PhysicalParams.natural_units()
    raise InvalidArgumentError("pick units: --natural, or --mass-kg with --n-particles")


# ---------------------------------------------------------------------------
# reading a solve summary back
# ---------------------------------------------------------------------------

def _load_solution(json_path: str) -> UniversalSolution:
    """Rebuild a UniversalSolution from a solve JSON and its profile CSV."""
    try:
        with open(json_path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgumentError(f"cannot read {json_path}: {exc}") from exc
    try:
        n = int(data["n"])
        gamma0 = float(data["gamma0"])
        gamma1 = float(data["gamma1"])
        epsilon_star = float(data["epsilon_star"])
        node_count = int(data["node_count"])
        bracket_width = float(data["bracket_width"])
        rho_max = float(data["grid"]["rho_max"])
        points = int(data["grid"]["points"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{json_path} is not a solve summary: {exc}") from exc
    csv_name = data.get("x_csv")
    if not csv_name:
        raise InvalidArgumentError(
            f"{json_path} carries no profile table (x_csv); "
            "re-run solve with --out-json to get the companion CSV"
        )
    csv_path = os.path.join(os.path.dirname(os.path.abspath(json_path)), csv_name)
    try:
        table = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    except OSError as exc:
        raise InvalidArgumentError(f"profile table missing: {exc}") from exc
    if table.ndim != 2 or table.shape[1] != 3 or table.shape[0] != points:
        raise InvalidArgumentError(
            f"{csv_path} does not match the summary grid ({points} points)"
        )
    grid = make_grid(rho_max, points)
    if not np.allclose(table[:, 0], grid.nodes, rtol=0.0, atol=1e-9 * rho_max):
        raise InvalidArgumentError(f"{csv_path} rho column disagrees with the grid")
    return UniversalSolution(
        n=n,
        gamma0=gamma0,
        gamma1=gamma1,
        epsilon_star=epsilon_star,
        f_star=RadialField(grid, table[:, 1]),
        g_star=RadialField(grid, table[:, 2]),
        node_count=node_count,
        bracket_width=bracket_width,
        grid=grid,
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _solve_one(n: int, rho_max: float, points: int, tol: float) -> UniversalSolution:
    grid = make_grid(rho_max, points)
    bracket = find_bracket(n, grid=grid)
    return shoot_gamma0(n, bracket, grid=grid, tol=tol)


def _cmd_solve(args) -> int:
    sol = _solve_one(args.n, args.rho_max, args.points, args.tol)
    summary = _solution_summary(sol)
    csv_path = args.out_csv
    if csv_path is None and args.out_json is not None:
        csv_path = os.path.splitext(args.out_json)[0] + ".csv"
    if csv_path is not None:
        _write_profile_csv(sol, csv_path)
        summary["x_csv"] = os.path.basename(csv_path)
    _emit_json(summary, args.out_json)
    return 0


def _cmd_spectrum(args) -> int:
    grid = make_grid(args.rho_max, args.points)
    found = {}
    for candidate, bracket in scan_brackets(grid=grid):
        found.setdefault(candidate, bracket)

    def solve_state(n: int) -> UniversalSolution:
        bracket = found.get(n) or find_bracket(n, grid=grid)
        return shoot_gamma0(n, bracket, grid=grid, tol=args.tol)

    workers = os.environ.get("SNG_THREADS")
    max_workers = int(workers) if workers else (os.cpu_count() or 1)
    ns = range(args.n_max + 1)
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        solutions = list(pool.map(solve_state, ns))
    gammas = [s.gamma0 for s in solutions]
    if not all(a > b for a, b in zip(gammas, gammas[1:])):
        raise WrongStateError(f"gamma0 sequence is not strictly decreasing: {gammas}")
    _emit_json([_solution_summary(s) for s in solutions], args.out_json)
    return 0


def _cmd_rescale(args) -> int:
    sol = _load_solution(args.in_json)
    params = _params_from_flags(args, required=True)
    profile = rescale_to_physical(sol, params)
    eb = energy_breakdown(profile)
    summary = {
        "bohr_radius_m": gravitational_bohr_radius(params),
        "half_max_radius_m": half_max_radius(profile),
        "rms_radius_m": rms_radius(profile),
        "e_kinetic_J": eb.e_kinetic,
        "e_gravity_J": eb.e_gravity,
        "e_total_J": eb.e_total,
        "epsilon_J": eb.epsilon,
        "e_single_J": eb.e_single,
        "virial_residual": abs(2.0 * eb.e_kinetic / abs(eb.e_gravity) - 1.0),
        "renormalized": profile.renormalized,
        "x_norm": profile.norm,
        "x_phi_tail_shift": profile.phi_tail_shift,
        "generated_by": _GENERATED_BY,
    }
    if args.out_csv is not None:
        _write_csv(args.out_csv, "r_m,f,phi",
                   [profile.f.grid.nodes, profile.f.values, profile.phi.values])
        summary["x_csv"] = os.path.basename(args.out_csv)
    _emit_json(summary, args.out_json)
    return 0


def _cmd_evolve(args) -> int:
    if (args.gaussian_sigma is None) == (args.from_json is None):
        raise InvalidArgumentError("pick an initial state: --gaussian-sigma or --from")
    if args.cubic and args.kappa is None:
        raise InvalidArgumentError("--cubic needs --kappa (and --sign, default +1)")

    params = _params_from_flags(args, required=False)
    if args.free:
        nl = NonlinearityKind.free()
    elif args.cubic:
        nl = NonlinearityKind.cubic(kappa=args.kappa, sign=args.sign)
    else:
        nl = NonlinearityKind.gravity(G=params.G, n_particles=params.n_particles)

    profile = None
    if args.from_json is not None:
        sol = _load_solution(args.from_json)
        profile = rescale_to_physical(sol, params)
        state = state_from_profile(profile)
    else:
        grid = make_grid(args.r_max, args.points)
        state = gaussian_state(grid, args.gaussian_sigma,
                               mass=params.mass, hbar=params.hbar)

    if args.dt is not None:
        dt = args.dt
    elif profile is not None:
        eb = energy_breakdown(profile)
        dt = 2.0 * np.pi * params.hbar / abs(eb.e_single) / 200.0
    else:
        dt = 2.0 * state.mass * args.gaussian_sigma**2 / (200.0 * state.hbar)

    series = evolve(state, t_final=state.time + args.steps * dt, dt=dt, nl=nl,
                    observe_every=args.observe_every,
                    snapshot_every=args.snapshot_every)
    _write_csv(args.out_csv, "t,norm,energy,rms_width",
               [series.times, series.norms, series.energies, series.widths])
    if series.snapshots is not None:
        stem = os.path.splitext(args.out_csv)[0]
        for idx, (_, field) in enumerate(series.snapshots):
            _write_csv(f"{stem}_snap_{idx:04d}.csv", "r,density",
                       [field.grid.nodes, field.values])
    return 0


def _cmd_check(args) -> int:
    names = list(dict.fromkeys(args.suites)) if args.suites else list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        sys.stderr.write(
            f"unknown suite(s): {', '.join(unknown)}; "
            f"valid: {', '.join(SUITES)}\n"
        )
        return 2
    rows = run_suites(names)
    width = max(len(r.name) for r in rows)
    for row in rows:
        flag = "PASS" if row.passed else "FAIL"
        print(f"{flag}  {row.suite:12s} {row.name:{width}s} "
              f"measured={row.measured:.3e} bound={row.bound:.3e}")
    failed = sum(not r.passed for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sng",
        description="Self-gravitating bound states: solve, rescale, evolve, check.",
    )
    parser.add_argument("--version", action="version", version=_GENERATED_BY)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_grid_flags(p):
        p.add_argument("--rho-max", type=float, default=40.0,
                       help="outer radius of the universal grid")
        p.add_argument("--points", type=int, default=8001,
                       help="grid points including both ends")
        p.add_argument("--tol", type=float, default=1e-10,
                       help="bisection bracket-width target")

    p = sub.add_parser("solve", help="solve one universal bound state")
    p.add_argument("--n", type=int, required=True, help="number of radial nodes")
    add_grid_flags(p)
    p.add_argument("--out-json", default=None, help="summary path (default: stdout)")
    p.add_argument("--out-csv", default=None,
                   help="profile table path (default: alongside --out-json)")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("spectrum", help="solve states n = 0..n_max")
    p.add_argument("--n-max", type=int, required=True)
    add_grid_flags(p)
    p.add_argument("--out-json", default=None, help="summary-array path (default: stdout)")
    p.set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("rescale", help="map a solve summary to physical units")
    p.add_argument("in_json", help="JSON written by solve (with its profile CSV)")
    _add_params_flags(p)
    p.add_argument("--out-json", default=None, help="summary path (default: stdout)")
    p.add_argument("--out-csv", default=None, help="physical profile table path")
    p.set_defaults(fn=_cmd_rescale)

    p = sub.add_parser("evolve", help="integrate the time-dependent equation")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--free", action="store_true", help="no interaction")
    kind.add_argument("--cubic", action="store_true", help="local |psi|^2 interaction")
    kind.add_argument("--gravity", action="store_true", help="self-gravity interaction")
    p.add_argument("--kappa", type=float, default=None,
                   help="cubic coupling strength (with --cubic)")
    p.add_argument("--sign", type=int, choices=(-1, 1), default=1,
                   help="cubic interaction sign: +1 repulsive, -1 attractive")
    p.add_argument("--gaussian-sigma", type=float, default=None,
                   help="start from a Gaussian with this per-axis width")
    p.add_argument("--from", dest="from_json", default=None,
                   help="start from a solve summary (rescaled to the given units)")
    p.add_argument("--r-max", type=float, default=60.0,
                   help="domain radius for --gaussian-sigma starts")
    p.add_argument("--points", type=int, default=4001,
                   help="grid points for --gaussian-sigma starts")
    _add_params_flags(p)
    p.add_argument("--dt", type=float, default=None,
                   help="time step (default: 1/200 of the natural timescale)")
    p.add_argument("--steps", type=int, default=200, help="number of steps")
    p.add_argument("--observe-every", type=int, default=1,
                   help="record observables every k steps")
    p.add_argument("--snapshot-every", type=int, default=None,
                   help="write a density snapshot every k steps")
    p.add_argument("--out-csv", default="evolve.csv",
                   help="observable table path (snapshots share its stem)")
    p.set_defaults(fn=_cmd_evolve)

    p = sub.add_parser("check", help="run release-gate check suites")
    p.add_argument("--suites", nargs="+", default=None,
                   help=f"subset to run (default: all of {', '.join(SUITES)})")
    p.set_defaults(fn=_cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InvalidArgumentError, InvalidFieldError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except InvalidBracketError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (ConvergenceError, WrongStateError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4
    except StepRejectedError as exc:
        sys.stderr.write(f"error: {exc}\n"
                         f"suggested dt: {exc.suggested_dt:.6e}\n")
        return 5
    except SngError as exc:  # pragma: no cover - safety net
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
