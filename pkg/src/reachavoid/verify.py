"""Runnable property suites: the invariants every release must satisfy.

Each check returns a structured result with the worst residual it saw, so
the CLI can print one pass/fail line per property.  The random suites are
fully seeded and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assignment import (
    PayoffMatrix,
    brute_force_assignment,
    build_payoff_matrix,
    build_value_matrix,
    enumerate_optimal_set,
    pair_region,
    pair_state,
    refine_theta_star,
    refinement_bound_Lbar,
    best_case_payoff_Lstar,
    solve_assignment_lp,
    team_payoff,
)
from .core import DegenerateGeometryError, Scenario
from .duel import DuelState, Region, barrier_1v1, value_for_region
from .game import Capture, Team, solve
from .generate import random_payoff_matrix, random_scenario
from .geometry import ApolloniusSphere, apollonius_locus, closest_point_to_origin, sample_locus
from .sim import (
    EvaderPolicy,
    StrategyProfile,
    default_step,
    simulate,
    straightness_check,
    value_conservation_check,
)

__all__ = ["CheckResult", "run_random_suite", "run_scenario_suite"]

HJI_TOL = 1e-9
GRAD_REL_TOL = 1e-5
SPHERE_REL_TOL = 1e-9
STRAIGHTNESS_TOL = 1e-6
DRIFT_TOL = 1e-4


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: Optional[float] = None
    detail: str = ""
    skipped: int = 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = f"  worst={self.worst:.3e}" if self.worst is not None else ""
        skipped = f"  skipped={self.skipped}" if self.skipped else ""
        detail = f"  ({self.detail})" if self.detail else ""
        return f"[{status}] {self.name}{worst}{skipped}{detail}"


# ---------------------------------------------------------------------------
# Random-state duel properties


def _random_duel_states(rng: np.random.Generator, count: int, region: Region) -> list[DuelState]:
    states: list[DuelState] = []
    while len(states) < count:
        x_E = rng.uniform(-10, 10, 3)
        x_P = rng.uniform(-10, 10, 3)
        V = rng.uniform(1.0, 2.5)
        # Keep a margin from the equal-speed switchover: the sphere formula
        # amplifies roundoff as the ratio approaches 1, which would swamp a
        # finite-difference comparison without saying anything about the math.
        U = V * rng.uniform(0.1, 0.995)
        if np.linalg.norm(x_E - x_P) < 1e-3 or np.linalg.norm(x_P) < 1e-3:
            continue
        ds = DuelState(x_E, x_P, U, V)
        b = barrier_1v1(ds)
        if region is Region.PURSUER_WINS and b > 1e-6:
            locus = apollonius_locus(ds.x_E, ds.x_P, ds.alpha)
            if isinstance(locus, ApolloniusSphere):
                margin = float(np.linalg.norm(locus.center)) - locus.radius
                if margin < 1e-3:
                    continue
            states.append(ds)
        elif region is Region.EVADER_WINS and b <= -1e-6:
            states.append(ds)
    return states


def check_hji_residual(rng: np.random.Generator, count: int = 1000) -> CheckResult:
    """Reduced optimality condition: the gradient norms satisfy rho_P = alpha rho_E."""
    worst = 0.0
    for region in Region:
        for ds in _random_duel_states(rng, count, region):
            dv = value_for_region(ds, region)
            rho_E = float(np.linalg.norm(dv.grad_E))
            rho_P = float(np.linalg.norm(dv.grad_P))
            worst = max(worst, abs(-ds.alpha * rho_E + rho_P))
    return CheckResult("hji_residual", worst < HJI_TOL, worst, f"{count} states per region, tol {HJI_TOL}")


def _fd_gradients(ds: DuelState, region: Region, h: float) -> tuple[np.ndarray, np.ndarray]:
    def value_at(x_E, x_P) -> float:
        return value_for_region(DuelState(x_E, x_P, ds.U, ds.V), region).value

    gE = np.zeros(3)
    gP = np.zeros(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        gE[k] = (value_at(ds.x_E + e, ds.x_P) - value_at(ds.x_E - e, ds.x_P)) / (2 * h)
        gP[k] = (value_at(ds.x_E, ds.x_P + e) - value_at(ds.x_E, ds.x_P - e)) / (2 * h)
    return gE, gP


def check_gradients_fd(rng: np.random.Generator, count: int = 1000) -> CheckResult:
    """Analytic gradients against central differences, both regions."""
    worst = 0.0
    for region in Region:
        for ds in _random_duel_states(rng, count, region):
            scale = max(ds.R_E, ds.R_P, 1.0)
            dv = value_for_region(ds, region)
            gE, gP = _fd_gradients(ds, region, 1e-6 * scale)
            for analytic, fd in ((dv.grad_E, gE), (dv.grad_P, gP)):
                denom = max(1.0, float(np.linalg.norm(analytic)))
                worst = max(worst, float(np.linalg.norm(analytic - fd)) / denom)
    return CheckResult(
        "gradient_finite_difference", worst < GRAD_REL_TOL, worst,
        f"{count} states per region, rel tol {GRAD_REL_TOL}",
    )


def check_sphere_definition(rng: np.random.Generator, count: int = 200) -> CheckResult:
    """Sampled locus points are reached by both players in equal time."""
    worst = 0.0
    for _ in range(count):
        x_E = rng.uniform(-10, 10, 3)
        x_P = rng.uniform(-10, 10, 3)
        if np.linalg.norm(x_E - x_P) < 1e-3:
            continue
        V = rng.uniform(1.0, 2.5)
        alpha = rng.uniform(0.1, 0.999)
        U = alpha * V
        locus = apollonius_locus(x_E, x_P, alpha)
        for x in sample_locus(locus, 100):
            t_E = float(np.linalg.norm(x - x_E)) / U
            t_P = float(np.linalg.norm(x - x_P)) / V
            worst = max(worst, abs(t_E - t_P) / max(t_E, 1e-12))
    return CheckResult("equal_time_locus", worst < SPHERE_REL_TOL, worst, f"rel tol {SPHERE_REL_TOL}")


def check_closest_point(rng: np.random.Generator, count: int = 200) -> CheckResult:
    """The returned point lies on the locus and no sampled point is closer."""
    worst = 0.0
    for _ in range(count):
        x_E = rng.uniform(-10, 10, 3)
        x_P = rng.uniform(-10, 10, 3)
        if np.linalg.norm(x_E - x_P) < 1e-3:
            continue
        alpha = rng.uniform(0.1, 1.0)
        ds = DuelState(x_E, x_P, alpha, 1.0)
        if barrier_1v1(ds) <= 0:
            continue
        locus = apollonius_locus(x_E, x_P, alpha)
        point, dist = closest_point_to_origin(locus)
        if isinstance(locus, ApolloniusSphere):
            on = abs(float(np.linalg.norm(point - locus.center)) - locus.radius) / locus.radius
        else:
            on = abs(float(point @ locus.unit_normal) - locus.offset)
        worst = max(worst, on)
        sampled_min = min(float(np.linalg.norm(x)) for x in sample_locus(locus, 200))
        worst = max(worst, max(0.0, dist - sampled_min - 1e-9) / max(dist, 1e-12))
    return CheckResult("closest_point_optimality", worst < 1e-6, worst)


# ---------------------------------------------------------------------------
# Assignment properties


def check_oracle_equivalence(rng: np.random.Generator, trials: int = 200) -> CheckResult:
    """Matching optimum equals the brute-force optimum, payoff-exactly."""
    worst = 0.0
    for _ in range(trials):
        m = int(rng.integers(1, 7))
        n = int(rng.integers(m, 7))
        p = random_payoff_matrix(rng, m, n)
        lp_payoff = team_payoff(p, solve_assignment_lp(p))
        bf_payoff = brute_force_assignment(p).team_payoff
        worst = max(worst, abs(lp_payoff - bf_payoff))
    return CheckResult("oracle_equivalence", worst == 0.0, worst, f"{trials} random instances")


def _loss_count(p: PayoffMatrix, pairs) -> int:
    return sum(1 for i, j in pairs if p.a[i - 1, j - 1] == -p.L_used)


def check_assignment_game_properties(
    rng: np.random.Generator, n: int, m: int, trials: int = 50
) -> list[CheckResult]:
    """Scenario-driven checks: minimum leakage, equal loss counts, barrier
    invariance, refinement subset and its faster-evader minimality."""
    leak_ok = True
    equal_ok = True
    sign_ok = True
    subset_ok = True
    lemma6_ok = True
    skipped = 0
    for _ in range(trials):
        s = random_scenario(rng, n, m)
        try:
            p = build_payoff_matrix(s)
            v = build_value_matrix(s)
        except DegenerateGeometryError:
            skipped += 1
            continue
        gamma = enumerate_optimal_set(p, s.tie_tolerance)
        theta = refine_theta_star(gamma, v, s.tie_tolerance)
        brute = brute_force_assignment(p)
        # Corollary: every optimal assignment loses the same number of pairs.
        counts = {_loss_count(p, a.pairs) for a in gamma}
        equal_ok &= len(counts) == 1
        # Minimum leakage against every feasible assignment.
        gamma_losses = min(counts)
        best_losses = min(
            _loss_count(p, a.pairs)
            for a in _all_assignments(m, n)
        )
        leak_ok &= gamma_losses == best_losses
        # Barrier sign is invariant across the optimal set.
        signs = {min(p.a[i - 1, j - 1] for i, j in a.pairs) > 0 for a in gamma}
        sign_ok &= len(signs) == 1
        # Refinement is a subset and minimizes the faster-evader pair count.
        subset_ok &= all(a in gamma for a in theta)
        alpha_counts = {
            a: sum(1 for i, j in a.pairs if s.evader(i).speed / s.pursuer(j).speed > 1.0)
            for a in gamma
        }
        lemma6_ok &= all(alpha_counts[a] == min(alpha_counts.values()) for a in theta)
        # The brute-force optimum agrees with the generator's.
        equal_ok &= abs(brute.team_payoff - gamma.team_payoff) <= 1e-9 * max(1.0, abs(brute.team_payoff))
    return [
        CheckResult("minimum_leakage", leak_ok, None, f"{trials} scenarios {n}v{m}", skipped),
        CheckResult("equal_loss_counts", equal_ok, None, "", skipped),
        CheckResult("barrier_sign_invariance", sign_ok, None, "", skipped),
        CheckResult("refinement_subset", subset_ok, None, "", skipped),
        CheckResult("refinement_minimizes_fast_evader_pairs", lemma6_ok, None, "", skipped),
    ]


def _all_assignments(m: int, n: int):
    import itertools

    from .core import Assignment

    for perm in itertools.permutations(range(1, n + 1), m):
        yield Assignment(tuple((i + 1, perm[i]) for i in range(m)))


def check_enumeration_matches_brute(rng: np.random.Generator, trials: int = 100) -> CheckResult:
    """The tie-window generator finds exactly the brute-force optimal set."""
    ok = True
    for _ in range(trials):
        m = int(rng.integers(1, 6))
        n = int(rng.integers(m, 6))
        p = random_payoff_matrix(rng, m, n)
        gen = enumerate_optimal_set(p)
        brute = brute_force_assignment(p)
        ok &= set(gen.assignments) >= set(brute.assignments)
        ok &= abs(gen.team_payoff - brute.team_payoff) <= 1e-12 * max(1.0, abs(brute.team_payoff))
    return CheckResult("enumeration_matches_brute_force", ok, None, f"{trials} random instances")


# ---------------------------------------------------------------------------
# Scenario (instance) checks


def run_scenario_suite(s: Scenario, step: Optional[float] = None) -> list[CheckResult]:
    """Instance-level checks on one scenario: solve, simulate, verify invariants."""
    results: list[CheckResult] = []
    try:
        sol = solve(s)
    except DegenerateGeometryError as err:
        return [CheckResult("solve", True, None, f"skipped: {err}", skipped=1)]
    results.append(
        CheckResult(
            "classification",
            True,
            sol.barrier_value,
            f"winner={sol.winner.value}, value={sol.value:.4f}, dispersal={sol.on_dispersal_surface}",
        )
    )
    results.append(CheckResult("refinement_subset", all(a in sol.gamma_star for a in sol.theta_star)))
    signs = {min(sol.payoff.a[i - 1, j - 1] for i, j in a.pairs) > 0 for a in sol.gamma_star}
    results.append(CheckResult("barrier_sign_invariance", len(signs) == 1))

    traj = simulate(s, sol.chosen, step=step)
    dev = max(straightness_check(traj).values())
    results.append(CheckResult("straight_line_optimal_play", dev < STRAIGHTNESS_TOL, dev, f"tol {STRAIGHTNESS_TOL}"))

    drift = value_conservation_check(s, sol.chosen, step=step)
    results.append(CheckResult("value_conservation", drift < DRIFT_TOL, drift, f"tol {DRIFT_TOL}"))

    worst_capture = 0.0
    used_step = step if step is not None else default_step(s)
    for ev in traj.events:
        if isinstance(ev, Capture):
            ds = pair_state(s, ev.i, ev.j)
            if pair_region(s, ev.i, ev.j) is Region.PURSUER_WINS and ds.alpha <= 1.0:
                locus = apollonius_locus(ds.x_E, ds.x_P, ds.alpha)
                I, _ = closest_point_to_origin(locus)
                tol = s.capture_radius + used_step * (ds.U + ds.V)
                err = float(np.linalg.norm(np.array(ev.point) - I))
                worst_capture = max(worst_capture, err - tol)
    results.append(CheckResult("capture_point_consistency", worst_capture <= 0.0, worst_capture))

    if sol.winner is Team.PURSUERS:
        deviated = simulate(s, sol.chosen, StrategyProfile(evaders=EvaderPolicy.STRAIGHT_TO_TARGET), step=step)
        margin = deviated.realized_payoff - sol.value
        results.append(
            CheckResult("saddle_one_sided_bound", margin >= -1e-6 * max(1.0, abs(sol.value)), margin,
                        "straight-evader deviation never helps the evaders")
        )
        gap = abs(traj.realized_payoff - sol.value)
        results.append(CheckResult("realized_equals_value", gap < 1e-3 * max(1.0, abs(sol.value)), gap))
    return results


def run_random_suite(n: int, m: int, trials: int, seed: int) -> list[CheckResult]:
    """The full deterministic property battery used by the verify command."""
    rng = np.random.default_rng(seed)
    results = [
        check_sphere_definition(rng),
        check_closest_point(rng),
        check_hji_residual(rng),
        check_gradients_fd(rng, count=200),
        check_oracle_equivalence(rng, trials=max(trials, 100)),
        check_enumeration_matches_brute(rng),
    ]
    results.extend(check_assignment_game_properties(rng, n, m, trials=trials))
    return results
