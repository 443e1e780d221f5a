"""Pursuer-to-evader role assignment as a maximum-weight bipartite matching.

The payoff matrix awards each matchable pair the pursuer-region 1v1 value
when the pursuer can actually win it, and a flat penalty ``-L`` otherwise.
Maximizing the summed payoff over feasible matchings is an assignment game
whose linear-programming relaxation has integral optima, so it is solved
here as a rectangular maximum-weight matching.  The complete optimal set
(needed for dispersal-surface detection) is enumerated with a best-first
partitioning scheme, and a plain exhaustive search is kept alongside as an
independent oracle and timing baseline.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (
    Assignment,
    BruteForceCapError,
    DegenerateGeometryError,
    InvalidScenarioError,
    Scenario,
    DEFAULT_TIE_TOLERANCE,
)
from .duel import DuelState, Region, barrier_1v1, value_evader_region, value_pursuer_region
from .geometry import PLANE_SWITCH

__all__ = [
    "PayoffMatrix",
    "ValueMatrix",
    "OptimalAssignmentSet",
    "pair_state",
    "pair_region",
    "build_payoff_matrix",
    "build_value_matrix",
    "best_case_payoff_Lstar",
    "refinement_bound_Lbar",
    "default_penalty",
    "solve_assignment_lp",
    "enumerate_optimal_set",
    "refine_theta_star",
    "brute_force_assignment",
    "team_payoff",
    "BRUTE_FORCE_CAP",
]

BRUTE_FORCE_CAP = 10_000_000


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    """m-by-n matrix of pursuer payoffs; losing or unwinnable pairs hold ``-L``."""

    a: np.ndarray
    L_used: float

    def __post_init__(self):
        arr = np.array(self.a, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True, eq=False)
class ValueMatrix:
    """m-by-n matrix of 1v1 values: pursuer-region, evader-region, or ``-L``."""

    v: np.ndarray
    L_used: float

    def __post_init__(self):
        arr = np.array(self.v, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "v", arr)


@dataclass(frozen=True)
class OptimalAssignmentSet:
    """All payoff-maximizing assignments, canonically ordered, plus their payoff."""

    assignments: tuple[Assignment, ...]
    team_payoff: float

    def __post_init__(self):
        ordered = tuple(sorted(self.assignments, key=lambda a: a.pairs))
        object.__setattr__(self, "assignments", ordered)

    def __len__(self) -> int:
        return len(self.assignments)

    def __iter__(self):
        return iter(self.assignments)

    def __contains__(self, a: Assignment) -> bool:
        return a in self.assignments

    def first(self) -> Assignment:
        """Lexicographically first member; the deterministic pick."""
        return self.assignments[0]


def pair_state(s: Scenario, i: int, j: int) -> DuelState:
    """1v1 state of evader ``i`` against pursuer ``j`` (1-based)."""
    e, p = s.evader(i), s.pursuer(j)
    return DuelState(
        np.array(e.position.as_tuple()), np.array(p.position.as_tuple()), e.speed, p.speed
    )


def pair_region(s: Scenario, i: int, j: int) -> Region:
    """Winning region of the (i, j) pair at the scenario's initial state."""
    return Region.PURSUER_WINS if barrier_1v1(pair_state(s, i, j)) > 0.0 else Region.EVADER_WINS


def _winnable(ds: DuelState) -> bool:
    return ds.alpha <= 1.0 + PLANE_SWITCH and barrier_1v1(ds) > 0.0


def default_penalty(s: Scenario) -> float:
    """Penalty large enough for both assignment-optimality guarantees.

    The minimum-leakage and refinement results hold once the penalty
    dominates the best achievable payoff sums, so an omitted penalty
    defaults to ten times the larger of those bounds.
    """
    return 10.0 * max(best_case_payoff_Lstar(s), refinement_bound_Lbar(s), 1.0)


def _resolved_penalty(s: Scenario) -> float:
    return s.penalty_L if s.penalty_L is not None else default_penalty(s)


def build_payoff_matrix(s: Scenario) -> PayoffMatrix:
    """Entry (i, j) is the pursuer-region 1v1 value if P_j can win, else ``-L``."""
    s.require_valid()
    L = _resolved_penalty(s)
    a = np.full((s.m, s.n), -L)
    for i in range(1, s.m + 1):
        for j in range(1, s.n + 1):
            ds = pair_state(s, i, j)
            if _winnable(ds):
                try:
                    a[i - 1, j - 1] = value_pursuer_region(ds, min_separation=s.capture_radius).value
                except DegenerateGeometryError as err:
                    raise DegenerateGeometryError(f"pair (E{i}, P{j}): {err}") from err
    return PayoffMatrix(a=a, L_used=L)


def build_value_matrix(s: Scenario) -> ValueMatrix:
    """Entry (i, j) is the 1v1 value of whichever region the pair starts in.

    Pairs with a speed ratio above 1 have no value function and hold ``-L``.
    """
    s.require_valid()
    L = _resolved_penalty(s)
    v = np.full((s.m, s.n), -L)
    for i in range(1, s.m + 1):
        for j in range(1, s.n + 1):
            ds = pair_state(s, i, j)
            if ds.alpha > 1.0 + PLANE_SWITCH:
                continue
            try:
                if barrier_1v1(ds) > 0.0:
                    v[i - 1, j - 1] = value_pursuer_region(ds, min_separation=s.capture_radius).value
                else:
                    v[i - 1, j - 1] = value_evader_region(ds).value
            except DegenerateGeometryError as err:
                raise DegenerateGeometryError(f"pair (E{i}, P{j}): {err}") from err
    return ValueMatrix(v=v, L_used=L)


def best_case_payoff_Lstar(s: Scenario) -> float:
    """Best payoff sum the pursuers could reach ignoring matching feasibility.

    Each evader contributes the largest pursuer-region value among pursuers
    that can actually win against it, or nothing if there is none.
    """
    s.require_valid()
    total = 0.0
    for i in range(1, s.m + 1):
        best = 0.0
        for j in range(1, s.n + 1):
            ds = pair_state(s, i, j)
            if _winnable(ds):
                best = max(best, value_pursuer_region(ds, min_separation=s.capture_radius).value)
        total += best
    return total


def refinement_bound_Lbar(s: Scenario) -> float:
    """Twice the sum over evaders of the largest value magnitude among
    pursuers at least as fast; the penalty threshold for the refinement."""
    s.require_valid()
    total = 0.0
    for i in range(1, s.m + 1):
        best = 0.0
        for j in range(1, s.n + 1):
            ds = pair_state(s, i, j)
            if ds.alpha > 1.0 + PLANE_SWITCH:
                continue
            if barrier_1v1(ds) > 0.0:
                val = value_pursuer_region(ds, min_separation=s.capture_radius).value
            else:
                val = value_evader_region(ds).value
            best = max(best, abs(val))
        total += best
    return 2.0 * total


def team_payoff(p: PayoffMatrix, assignment: Assignment) -> float:
    """Summed payoff of an assignment, accumulated in canonical pair order."""
    return float(sum(p.a[i - 1, j - 1] for i, j in assignment.pairs))


def _tie_window(optimum: float, tie_tolerance: float) -> float:
    # Relative when the optimum is appreciable, absolute near zero.
    return tie_tolerance * max(1.0, abs(optimum))


def solve_assignment_lp(p: PayoffMatrix) -> Assignment:
    """One maximizer of the summed payoff over feasible assignments.

    Solved as a rectangular maximum-weight matching; the assignment-game
    structure guarantees the matching optimum equals the LP optimum.
    """
    m, n = p.m, p.n
    if m > n:
        raise InvalidScenarioError([f"need at least as many pursuers as evaders, got m={m} > n={n}"])
    rows, cols = linear_sum_assignment(p.a, maximize=True)
    return Assignment(tuple((int(r) + 1, int(c) + 1) for r, c in zip(rows, cols)))


def _solve_masked(a: np.ndarray) -> Optional[tuple[float, list[tuple[int, int]]]]:
    """Best matching of a matrix that may hold -inf forbidden cells, or None."""
    if a.size == 0:
        return 0.0, []
    if np.any(np.all(np.isneginf(a), axis=1)):
        return None
    try:
        rows, cols = linear_sum_assignment(a, maximize=True)
    except ValueError:
        return None
    if np.any(np.isneginf(a[rows, cols])):
        return None
    return float(a[rows, cols].sum()), list(zip(rows.tolist(), cols.tolist()))


def enumerate_optimal_set(
    p: PayoffMatrix, tie_tolerance: float = DEFAULT_TIE_TOLERANCE
) -> OptimalAssignmentSet:
    """All feasible assignments whose payoff ties the maximum.

    Matchings are generated in non-increasing payoff order by best-first
    partitioning: each emitted solution splits its subproblem into children
    that forbid one of its pairs and force the preceding ones.  Generation
    stops as soon as the payoff drops out of the tie window.
    """
    m, n = p.m, p.n
    if m > n:
        raise InvalidScenarioError([f"need at least as many pursuers as evaders, got m={m} > n={n}"])
    base = p.a.astype(float)
    first = _solve_masked(base)
    assert first is not None  # finite m <= n matrices are always feasible
    _, best_pairs = first
    best_payoff = float(sum(base[i, j] for i, j in sorted(best_pairs)))
    window = _tie_window(best_payoff, tie_tolerance)

    # Heap entries: (-payoff, counter, solution pairs, forced pairs, matrix).
    counter = itertools.count()
    heap = [(-best_payoff, next(counter), best_pairs, [], base)]
    found: list[Assignment] = []
    while heap:
        neg, _, pairs, forced, matrix = heapq.heappop(heap)
        payoff = -neg
        if payoff < best_payoff - window:
            break
        found.append(Assignment(tuple((i + 1, j + 1) for i, j in pairs)))
        free = [pair for pair in pairs if pair not in forced]
        child_forced = list(forced)
        for r, c in free:
            child = matrix.copy()
            child[r, c] = -np.inf
            solved = _solve_masked(_apply_forced(child, child_forced))
            if solved is not None:
                sub_payoff, sub_pairs = solved
                forced_payoff = float(sum(matrix[i, j] for i, j in child_forced))
                full = sorted(child_forced + _expand(sub_pairs, child, child_forced))
                heapq.heappush(
                    heap,
                    (-(forced_payoff + sub_payoff), next(counter), full, list(child_forced), child),
                )
            child_forced.append((r, c))
    return OptimalAssignmentSet(tuple(dict.fromkeys(found)), best_payoff)


def _apply_forced(matrix: np.ndarray, forced: list[tuple[int, int]]) -> np.ndarray:
    """Drop forced rows and columns, leaving the free subproblem."""
    rows = [r for r in range(matrix.shape[0]) if all(r != fr for fr, _ in forced)]
    cols = [c for c in range(matrix.shape[1]) if all(c != fc for _, fc in forced)]
    return matrix[np.ix_(rows, cols)]


def _expand(
    sub_pairs: list[tuple[int, int]], matrix: np.ndarray, forced: list[tuple[int, int]]
) -> list[tuple[int, int]]:
    """Map subproblem indices back to the full matrix's indices."""
    rows = [r for r in range(matrix.shape[0]) if all(r != fr for fr, _ in forced)]
    cols = [c for c in range(matrix.shape[1]) if all(c != fc for _, fc in forced)]
    return [(rows[r], cols[c]) for r, c in sub_pairs]


def refine_theta_star(
    gamma_star: OptimalAssignmentSet,
    v: ValueMatrix,
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE,
) -> OptimalAssignmentSet:
    """Members of the optimal set that also maximize the value-matrix sum.

    Breaks payoff ties in favor of assignments whose losing pairs leave the
    pursuers closest to the target; always a subset of the input set.
    """
    if len(gamma_star) == 0:
        raise ValueError("gamma_star must be non-empty")
    totals = {
        a: float(sum(v.v[i - 1, j - 1] for i, j in a.pairs)) for a in gamma_star
    }
    best = max(totals.values())
    window = _tie_window(best, tie_tolerance)
    kept = tuple(a for a in gamma_star if totals[a] >= best - window)
    return OptimalAssignmentSet(kept, best)


def brute_force_assignment(p: PayoffMatrix, cap: int = BRUTE_FORCE_CAP) -> OptimalAssignmentSet:
    """Exhaustive search over every feasible assignment; the exact oracle.

    Deliberately unpruned so it can double as the factorial-time baseline in
    benchmarks.  Refuses instances whose feasible count exceeds ``cap``.
    """
    m, n = p.m, p.n
    if m > n:
        raise InvalidScenarioError([f"need at least as many pursuers as evaders, got m={m} > n={n}"])
    count = math.perm(n, m)
    if count > cap:
        raise BruteForceCapError(
            f"{count} feasible assignments exceed the cap of {cap}; raise the cap to force it"
        )
    rows = [list(map(float, p.a[i])) for i in range(m)]
    best_payoff = -math.inf
    best_perms: list[tuple[int, ...]] = []
    for perm in itertools.permutations(range(n), m):
        payoff = 0.0
        for i in range(m):
            payoff += rows[i][perm[i]]
        if payoff > best_payoff:
            best_payoff = payoff
            best_perms = [perm]
        elif payoff == best_payoff:
            best_perms.append(perm)
    exact = tuple(
        Assignment(tuple((i + 1, perm[i] + 1) for i in range(m))) for perm in best_perms
    )
    return OptimalAssignmentSet(exact, best_payoff)
