"""Keller-Segel equilibria on the unit disc.

Thin re-export of the compiled core: steady solves of the nonlocal elliptic
problem, multistart censuses, pseudo-arclength continuation, level-set
inequality verification, Liouville-bubble checks, variational descent, and
radial evolution runs.
"""

from ._core import (  # noqa: F401
    __version__,
    ConfigError,
    NumericalError,
    InvariantBreach,
    lambda_threshold,
    g_profile_ratio_bound,
    disc_isoperimetric_profile,
    bifurcation_lambda_star,
    bubble_value,
    bubble_mass,
    bol_deficit_bubble,
    solve_steady,
    multistart_census,
    continue_branch,
    run_evolution,
    verify_levelset,
    minimize_energy,
)

__all__ = [
    "__version__",
    "ConfigError",
    "NumericalError",
    "InvariantBreach",
    "lambda_threshold",
    "g_profile_ratio_bound",
    "disc_isoperimetric_profile",
    "bifurcation_lambda_star",
    "bubble_value",
    "bubble_mass",
    "bol_deficit_bubble",
    "solve_steady",
    "multistart_census",
    "continue_branch",
    "run_evolution",
    "verify_levelset",
    "minimize_energy",
]
