"""Pool-based genetic algorithm with local optimization, benchmark functions
and randomized Gaussian landscapes."""

from ._core import (
    GrungeLandscape,
    InitializationError,
    LocalOptResult,
    MinimaCatalog,
    ParseError,
    PowerLawFit,
    RunRecord,
    ValidationError,
    fit_power_law,
    function_names,
    gradient,
    grunge_enumerate,
    grunge_generate,
    grunge_load,
    minimize,
    run,
    value,
)

__all__ = [
    "GrungeLandscape",
    "InitializationError",
    "LocalOptResult",
    "MinimaCatalog",
    "ParseError",
    "PowerLawFit",
    "RunRecord",
    "ValidationError",
    "fit_power_law",
    "function_names",
    "gradient",
    "grunge_enumerate",
    "grunge_generate",
    "grunge_load",
    "minimize",
    "run",
    "value",
]
