"""Metasurface-aided spectrum-sharing localization toolkit."""

from ._core import (
    FIGURE_IDS,
    STAGES,
    ConfigError,
    InfeasibleError,
    NumericalError,
    ScenarioConfig,
    budget_eps,
    default_scenario,
    inner_solve,
    load_scenario,
    parse_scenario_text,
    principal_eigenpair,
    run_pipeline,
    scenario_hash_hex,
    solve_spd,
    steering_vector,
    validate_scenario,
    wrap_angle,
    write_figure,
    __version__,
)

__all__ = [
    "FIGURE_IDS",
    "STAGES",
    "ConfigError",
    "InfeasibleError",
    "NumericalError",
    "ScenarioConfig",
    "budget_eps",
    "default_scenario",
    "inner_solve",
    "load_scenario",
    "parse_scenario_text",
    "principal_eigenpair",
    "run_pipeline",
    "scenario_hash_hex",
    "solve_spd",
    "steering_vector",
    "validate_scenario",
    "wrap_angle",
    "write_figure",
    "__version__",
]
