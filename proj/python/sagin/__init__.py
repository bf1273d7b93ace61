"""Python front end for the sagin optimizer.

Configuration is passed as dicts using the same keys as the text config files,
for example ``{"bs.power_dbm": 25}`` or ``{"optimizer.max_outer": 10}``.
"""

from ._sagin import (
    CSV_HEADER,
    ConfigError,
    InfeasibleError,
    OptimizeResult,
    SaginError,
    Scenario,
    allocate_rates,
    generate_scenario,
    optimize,
    run_experiment,
)

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "InfeasibleError",
    "OptimizeResult",
    "SaginError",
    "Scenario",
    "allocate_rates",
    "generate_scenario",
    "optimize",
    "run_experiment",
]
