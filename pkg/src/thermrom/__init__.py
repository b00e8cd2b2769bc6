"""Grey-box second-order thermal models of building zones.

Core workflow: generate or load indoor/outdoor temperature series, fit the
four-coefficient model, inspect its modal and steady-state behavior, and
validate against the built-in nonlinear RC-network reference simulator.
"""

from .errors import DataError
from .timeseries import TimeSeries, read_csv, write_csv
from .metrics import peak_lag, rmse_percent, rmse_percent_range
from .model import (
    ModalParameters,
    RomCoefficients,
    StateSpaceModel,
    REGIME_CRITICAL,
    REGIME_OVERDAMPED,
    REGIME_UNDERDAMPED,
    from_state_space,
    load_model,
    modal_analysis,
    save_model,
    steady_state,
    to_state_space,
)
from .simulate import (
    METHOD_EXACT_ZOH,
    METHOD_RK4,
    SimConfig,
    default_initial_state,
    simulate,
    step_matrix,
)
from .fit import DEFAULT_BOUNDS, FitOptions, FitResult, fit, objective
from .refsim import (
    AMBIENT,
    PRESET_NAMES,
    WEATHER_PROFILES,
    Conduction,
    RadiationSurface,
    SolarAperture,
    WeatherSeries,
    ZoneNetwork,
    ZoneNode,
    aggregate_zones,
    preset,
    simulate_network,
    synth_weather,
)

__version__ = "0.1.0"

__all__ = [
    "AMBIENT",
    "Conduction",
    "DataError",
    "DEFAULT_BOUNDS",
    "FitOptions",
    "FitResult",
    "METHOD_EXACT_ZOH",
    "METHOD_RK4",
    "ModalParameters",
    "PRESET_NAMES",
    "RadiationSurface",
    "REGIME_CRITICAL",
    "REGIME_OVERDAMPED",
    "REGIME_UNDERDAMPED",
    "RomCoefficients",
    "SimConfig",
    "SolarAperture",
    "StateSpaceModel",
    "TimeSeries",
    "WeatherSeries",
    "WEATHER_PROFILES",
    "ZoneNetwork",
    "ZoneNode",
    "aggregate_zones",
    "default_initial_state",
    "fit",
    "from_state_space",
    "load_model",
    "modal_analysis",
    "objective",
    "peak_lag",
    "preset",
    "read_csv",
    "rmse_percent",
    "rmse_percent_range",
    "save_model",
    "simulate",
    "simulate_network",
    "steady_state",
    "step_matrix",
    "synth_weather",
    "to_state_space",
    "write_csv",
    "__version__",
]
