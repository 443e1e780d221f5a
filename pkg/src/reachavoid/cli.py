"""Command-line front end: solve, simulate, bench, and verify subcommands.

Scenario files are JSON documents; trajectory output is CSV with a JSON
events sidecar; each report path also renders a figure next to the
delimited output.  Exit codes: 0 success, 2 usage, 3 parse/validation,
4 runtime failure, 5 property failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import game
from .assignment import (
    brute_force_assignment,
    build_payoff_matrix,
    solve_assignment_lp,
)
from .core import (
    DEFAULT_TIE_TOLERANCE,
    BruteForceCapError,
    IntegrationDivergedError,
    InvalidScenarioError,
    NoTerminationError,
    Player,
    ReachAvoidError,
    Role,
    Scenario,
    Vec3,
    validate_scenario,
)
from .generate import random_scenario
from .plots import render_bench_figure, render_trajectory_figure
from .sim import EvaderPolicy, StrategyProfile, Trajectory, simulate
from .verify import run_random_suite, run_scenario_suite

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_RUNTIME = 4
EXIT_PROPERTY = 5

DEFAULT_BENCH_SIZES = "(3,3),(10,8),(20,15)"


class UsageError(Exception):
    """Bad flag combination or value; maps to exit code 2."""


class ScenarioFormatError(ReachAvoidError):
    """A scenario document is structurally invalid; names the offending key."""


# ---------------------------------------------------------------------------
# Scenario file I/O


def _player_from_dict(entry: dict, role: Role, key: str) -> Player:
    if not isinstance(entry, dict):
        raise ScenarioFormatError(f"{key}: expected an object, got {type(entry).__name__}")
    try:
        pid = int(entry["id"])
    except KeyError:
        raise ScenarioFormatError(f"{key}.id: missing") from None
    except (TypeError, ValueError):
        raise ScenarioFormatError(f"{key}.id: expected an integer, got {entry['id']!r}") from None
    pos = entry.get("position")
    if not (isinstance(pos, (list, tuple)) and len(pos) == 3):
        raise ScenarioFormatError(f"{key}.position: expected [x, y, z], got {pos!r}")
    try:
        vec = Vec3.of(pos)
    except (TypeError, ValueError) as err:
        raise ScenarioFormatError(f"{key}.position: {err}") from None
    try:
        speed = float(entry["speed"])
    except KeyError:
        raise ScenarioFormatError(f"{key}.speed: missing") from None
    except (TypeError, ValueError):
        raise ScenarioFormatError(f"{key}.speed: expected a number, got {entry['speed']!r}") from None
    return Player(id=pid, role=role, position=vec, speed=speed)


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioFormatError(f"top level: expected an object, got {type(doc).__name__}")
    known = {"pursuers", "evaders", "penalty_L", "capture_radius", "target_radius", "tie_tolerance", "seed"}
    for key in doc:
        if key not in known:
            raise ScenarioFormatError(f"unknown key {key!r} (known keys: {sorted(known)})")
    teams = {}
    for key, role in (("pursuers", Role.PURSUER), ("evaders", Role.EVADER)):
        raw = doc.get(key)
        if not isinstance(raw, list) or not raw:
            raise ScenarioFormatError(f"{key}: expected a non-empty list")
        teams[key] = tuple(
            _player_from_dict(entry, role, f"{key}[{k}]") for k, entry in enumerate(raw)
        )

    def optional_number(key: str) -> Optional[float]:
        if doc.get(key) is None:
            return None
        try:
            return float(doc[key])
        except (TypeError, ValueError):
            raise ScenarioFormatError(f"{key}: expected a number, got {doc[key]!r}") from None

    kwargs = {}
    if optional_number("tie_tolerance") is not None:
        kwargs["tie_tolerance"] = float(doc["tie_tolerance"])
    seed = doc.get("seed")
    if seed is not None:
        kwargs["seed"] = int(seed)
    return Scenario(
        evaders=teams["evaders"],
        pursuers=teams["pursuers"],
        penalty_L=optional_number("penalty_L"),
        capture_radius_override=optional_number("capture_radius"),
        target_radius_override=optional_number("target_radius"),
        **kwargs,
    )


def scenario_to_dict(s: Scenario) -> dict:
    doc = {
        "pursuers": [
            {"id": p.id, "position": list(p.position.as_tuple()), "speed": p.speed}
            for p in s.pursuers
        ],
        "evaders": [
            {"id": e.id, "position": list(e.position.as_tuple()), "speed": e.speed}
            for e in s.evaders
        ],
    }
    if s.penalty_L is not None:
        doc["penalty_L"] = s.penalty_L
    if s.capture_radius_override is not None:
        doc["capture_radius"] = s.capture_radius_override
    if s.target_radius_override is not None:
        doc["target_radius"] = s.target_radius_override
    if s.tie_tolerance != DEFAULT_TIE_TOLERANCE:
        doc["tie_tolerance"] = s.tie_tolerance
    if s.seed is not None:
        doc["seed"] = s.seed
    return doc


def load_scenario(path: str) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ScenarioFormatError(f"cannot read {path}: {err}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioFormatError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from None
    scenario = scenario_from_dict(doc)
    problems = validate_scenario(scenario)
    if problems:
        raise InvalidScenarioError(problems)
    return scenario


# ---------------------------------------------------------------------------
# solve


def _assignment_json(a) -> list[list[int]]:
    return [[i, j] for i, j in a.pairs]


def cmd_solve(args) -> int:
    s = load_scenario(args.scenario)
    t0 = time.perf_counter()
    sol = game.solve(s)
    elapsed = time.perf_counter() - t0
    print(f"winner: {sol.winner.value}")
    print(f"barrier value: {sol.barrier_value:.6g}")
    print(f"game value: {sol.value:.6g}" + ("" if sol.value_certified else "  [uncertified]"))
    print(f"optimal assignments (gamma*): {', '.join(str(a) for a in sol.gamma_star)}")
    print(f"refined assignments (theta*): {', '.join(str(a) for a in sol.theta_star)}")
    print(f"dispersal surface: {sol.on_dispersal_surface}")
    for po in sol.per_pair:
        print(
            f"  pair E{po.i}-P{po.j}: region={po.region.value} alpha={po.alpha:.4f} value={po.pair_value:.6g}"
        )
    print(f"solved in {elapsed * 1e3:.1f} ms")
    report = {
        "winner": sol.winner.value,
        "barrier_value": sol.barrier_value,
        "value": sol.value,
        "value_certified": sol.value_certified,
        "on_dispersal_surface": sol.on_dispersal_surface,
        "gamma_star": [_assignment_json(a) for a in sol.gamma_star],
        "theta_star": [_assignment_json(a) for a in sol.theta_star],
        "chosen": _assignment_json(sol.chosen),
        "team_payoff": sol.gamma_star.team_payoff,
        "penalty_L_used": sol.payoff.L_used,
        "payoff_matrix": sol.payoff.a.tolist(),
        "value_matrix": sol.value_matrix.v.tolist(),
        "per_pair": [
            {"i": po.i, "j": po.j, "region": po.region.value, "alpha": po.alpha, "value": po.pair_value}
            for po in sol.per_pair
        ],
        "solve_seconds": elapsed,
    }
    out = args.out or str(Path(args.scenario).with_suffix("")) + ".solution.json"
    Path(out).write_text(json.dumps(report, indent=2) + "\n")
    print(f"report written to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def _write_trajectory_csv(traj: Trajectory, path: str) -> None:
    s = traj.scenario
    header = ["t"]
    for p in s.pursuers:
        header += [f"P{p.id}.x", f"P{p.id}.y", f"P{p.id}.z"]
    for e in s.evaders:
        header += [f"E{e.id}.x", f"E{e.id}.y", f"E{e.id}.z"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, t in enumerate(traj.times):
            row = [repr(float(t))]
            row += [repr(float(c)) for c in traj.P_positions[k].ravel()]
            row += [repr(float(c)) for c in traj.E_positions[k].ravel()]
            writer.writerow(row)


def _events_json(traj: Trajectory) -> list[dict]:
    out = []
    for ev in traj.events:
        if isinstance(ev, game.Capture):
            out.append({"type": "capture", "t": ev.t, "i": ev.i, "j": ev.j, "point": list(ev.point)})
        elif isinstance(ev, game.Reach):
            out.append({"type": "reach", "t": ev.t, "i": ev.i})
        else:
            out.append({"type": "game_over", "t": ev.t})
    return out


def cmd_simulate(args) -> int:
    if args.step is not None and args.step <= 0:
        raise UsageError("--step must be positive")
    s = load_scenario(args.scenario)
    sol = game.solve(s)
    profile = StrategyProfile(
        evaders=EvaderPolicy.STRAIGHT_TO_TARGET
        if args.profile == "straight-evaders"
        else EvaderPolicy.OPTIMAL
    )
    traj = simulate(s, sol.chosen, profile, step=args.step)
    print(f"assignment: {sol.chosen}")
    print(f"realized payoff: {traj.realized_payoff:.6g}")
    print(f"t_f: {traj.t_f:.6g} s  ({len(traj.times)} samples)")
    base = args.out or str(Path(args.scenario).with_suffix("")) + "_trajectory"
    csv_path = base + ".csv"
    events_path = base + ".events.json"
    figure_path = base + ".png"
    _write_trajectory_csv(traj, csv_path)
    Path(events_path).write_text(json.dumps(_events_json(traj), indent=2) + "\n")
    render_trajectory_figure(traj, figure_path, title=f"{args.profile} play, realized {traj.realized_payoff:.4g}")
    print(f"trajectory written to {csv_path}")
    print(f"events written to {events_path}")
    print(f"figure written to {figure_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench


def _parse_sizes(text: str) -> list[tuple[int, int]]:
    cleaned = text.replace(" ", "")
    if not cleaned:
        raise UsageError("--sizes must not be empty")
    sizes = []
    for chunk in cleaned.strip(",").split("),("):
        chunk = chunk.strip("()")
        parts = chunk.split(",")
        if len(parts) != 2:
            raise UsageError(f"bad size {chunk!r}: expected (n,m)")
        try:
            n, m = int(parts[0]), int(parts[1])
        except ValueError:
            raise UsageError(f"bad size {chunk!r}: expected integers") from None
        if not (n >= m >= 1):
            raise UsageError(f"bad size ({n},{m}): need n >= m >= 1")
        sizes.append((n, m))
    return sizes


def _bench_one(task: tuple[int, int, int, int, int]) -> dict:
    """One trial: generate a scenario, time payoff build, LP, and brute force."""
    n, m, seed, trial, cap = task
    rng = np.random.default_rng((seed, n, m, trial))
    s = random_scenario(rng, n, m, penalty_L=100.0)
    t0 = time.perf_counter()
    p = build_payoff_matrix(s)
    build_seconds = time.perf_counter() - t0
    t0 = time.perf_counter()
    solve_assignment_lp(p)
    lp_seconds = time.perf_counter() - t0
    brute_seconds: Optional[float] = None
    if math.perm(n, m) <= cap:
        t0 = time.perf_counter()
        brute_force_assignment(p, cap=cap)
        brute_seconds = time.perf_counter() - t0
    return {
        "n": n,
        "m": m,
        "build_seconds": build_seconds,
        "lp_seconds": lp_seconds,
        "brute_force_seconds": brute_seconds,
    }


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    tasks = [
        (n, m, args.seed, trial, args.cap)
        for n, m in sizes
        for trial in range(args.trials)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            raw = list(pool.map(_bench_one, tasks))
    else:
        raw = [_bench_one(t) for t in tasks]

    rows = []
    for n, m in sizes:
        mine = [r for r in raw if r["n"] == n and r["m"] == m]
        brutes = [r["brute_force_seconds"] for r in mine]
        rows.append(
            {
                "n": n,
                "m": m,
                "brute_force_seconds": (
                    None if any(b is None for b in brutes) else sum(brutes) / len(brutes)
                ),
                "lp_seconds": sum(r["lp_seconds"] for r in mine) / len(mine),
                "payoff_matrix_build_seconds": sum(r["build_seconds"] for r in mine) / len(mine),
            }
        )

    def fmt(x: Optional[float]) -> str:
        return "NA" if x is None else f"{x:.6f}"

    print(f"{'(n,m)':>10}  {'brute_force_s':>14}  {'lp_s':>10}  {'payoff_build_s':>15}")
    for r in rows:
        print(
            f"({r['n']},{r['m']})".rjust(10)
            + f"  {fmt(r['brute_force_seconds']):>14}  {fmt(r['lp_seconds']):>10}"
            + f"  {fmt(r['payoff_matrix_build_seconds']):>15}"
        )
    base = args.out or "bench_report"
    csv_path = base + ".csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "m", "brute_force_seconds", "lp_seconds", "payoff_matrix_build_seconds"])
        for r in rows:
            writer.writerow(
                [
                    r["n"],
                    r["m"],
                    "NA" if r["brute_force_seconds"] is None else repr(r["brute_force_seconds"]),
                    repr(r["lp_seconds"]),
                    repr(r["payoff_matrix_build_seconds"]),
                ]
            )
    figure_path = base + ".png"
    render_bench_figure(rows, figure_path)
    print(f"bench table written to {csv_path}")
    print(f"figure written to {figure_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    if (args.scenario is None) == (args.random is None):
        raise UsageError("give exactly one of a scenario file or --random N M TRIALS SEED")
    if args.scenario is not None:
        s = load_scenario(args.scenario)
        results = run_scenario_suite(s)
    else:
        n, m, trials, seed = args.random
        if not (n >= m >= 1):
            raise UsageError(f"--random needs n >= m >= 1, got n={n}, m={m}")
        results = run_random_suite(n, m, trials, seed)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} properties passed")
    return EXIT_OK if not failed else EXIT_PROPERTY


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reachavoid",
        description="Solve and simulate multiplayer reach-avoid pursuit games in 3D.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="classify the winner and compute the game value")
    p_solve.add_argument("scenario", help="scenario JSON file")
    p_solve.add_argument("--out", help="report path (default: <scenario>.solution.json)")
    p_solve.set_defaults(func=cmd_solve)

    p_sim = sub.add_parser("simulate", help="integrate the closed-loop trajectories")
    p_sim.add_argument("scenario", help="scenario JSON file")
    p_sim.add_argument(
        "--profile",
        choices=["optimal", "straight-evaders"],
        default="optimal",
        help="strategy profile (default: optimal)",
    )
    p_sim.add_argument("--step", type=float, default=None, help="integration step in seconds")
    p_sim.add_argument("--out", help="output base path (default: <scenario>_trajectory)")
    p_sim.set_defaults(func=cmd_simulate)

    p_bench = sub.add_parser("bench", help="time the assignment solvers on random scenarios")
    p_bench.add_argument("--sizes", default=DEFAULT_BENCH_SIZES, help='e.g. "(3,3),(10,8)"')
    p_bench.add_argument("--trials", type=int, default=3)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--cap", type=int, default=10_000_000, help="brute-force enumeration cap")
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.add_argument("--out", help="output base path (default: bench_report)")
    p_bench.set_defaults(func=cmd_bench)

    p_verify = sub.add_parser("verify", help="run the property suites")
    p_verify.add_argument("scenario", nargs="?", help="scenario JSON file")
    p_verify.add_argument(
        "--random",
        nargs=4,
        type=int,
        metavar=("N", "M", "TRIALS", "SEED"),
        help="run the random-instance suite instead of a file",
    )
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioFormatError, InvalidScenarioError) as err:
        print(f"scenario error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (IntegrationDivergedError, NoTerminationError, BruteForceCapError) as err:
        print(f"runtime error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
