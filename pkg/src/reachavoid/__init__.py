"""Solver and simulator for multiplayer reach-avoid pursuit games in 3D.

A team of evaders tries to reach a stationary target at the origin while a
team of at-least-as-many pursuers tries to capture them first.  The package
classifies which team wins, computes the optimal pursuer-to-evader
assignment and the game value, and simulates the closed-form state-feedback
optimal trajectories.
"""

from .core import (
    Assignment,
    BruteForceCapError,
    DegenerateGeometryError,
    IntegrationDivergedError,
    InvalidAssignmentError,
    InvalidScenarioError,
    NoTerminationError,
    Player,
    ReachAvoidError,
    RegionMismatchError,
    Role,
    Scenario,
    SingularControlError,
    SingularGradientError,
    SpeedRatio,
    UnsupportedRegimeError,
    Vec3,
    speed_ratio,
    validate_scenario,
)
from .geometry import (
    ApolloniusSphere,
    BisectorPlane,
    apollonius_locus,
    closest_point_to_origin,
)
from .duel import (
    Control,
    DuelState,
    DuelValue,
    Region,
    barrier_1v1,
    optimal_controls,
    value_evader_region,
    value_pursuer_region,
)
from .assignment import (
    OptimalAssignmentSet,
    PayoffMatrix,
    ValueMatrix,
    best_case_payoff_Lstar,
    brute_force_assignment,
    build_payoff_matrix,
    build_value_matrix,
    enumerate_optimal_set,
    refine_theta_star,
    refinement_bound_Lbar,
    solve_assignment_lp,
)
from .game import (
    Capture,
    GameOver,
    GameSolution,
    Reach,
    Team,
    classify,
    multiplayer_barrier,
    solve,
    team_controls,
    termination_check,
)
from .sim import (
    EvaderPolicy,
    PursuerPolicy,
    StrategyProfile,
    Trajectory,
    simulate,
    straightness_check,
    value_conservation_check,
)

__version__ = "0.1.0"
