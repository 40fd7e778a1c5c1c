"""SLO-aware bandwidth allocation and trace-driven simulation for
vehicle-to-cloud inference offloading."""

from .allocation import (
    AllocationProblem,
    AllocationResult,
    Grant,
    brute_force_oracle,
    solve_exact,
    solve_greedy,
    solve_max_min,
)
from .cost import (
    CostBreakdown,
    CountryPrice,
    break_even_years,
    data_gb_per_hour,
    load_country_prices,
    network_cost_per_hour,
    simulate_cost,
)
from .latency import (
    LatencyBreakdown,
    meets_slo,
    min_feasible_bandwidth,
    speedup,
    total_latency,
    transmit_ms,
)
from .profiles import (
    ConfigError,
    ConfigParseError,
    ConfigValidationError,
    Configuration,
    DanglingReferenceError,
    EconomicParams,
    HardwareProfile,
    Location,
    ModelOption,
    ModelProfile,
    NetworkConditions,
    ServiceSpec,
    load_config,
    payload_bits,
    serialize_config,
)
from .simulator import (
    Mode,
    SimulationSummary,
    Solver,
    TickRecord,
    TraceError,
    TracePoint,
    load_trace,
    run,
)
from .utility import Breakpoint, UtilityCurve, compose, model_curve, service_curve, utility_at

__version__ = "0.1.0"

__all__ = [
    "AllocationProblem",
    "AllocationResult",
    "Breakpoint",
    "ConfigError",
    "ConfigParseError",
    "ConfigValidationError",
    "Configuration",
    "CostBreakdown",
    "CountryPrice",
    "DanglingReferenceError",
    "EconomicParams",
    "Grant",
    "HardwareProfile",
    "LatencyBreakdown",
    "Location",
    "Mode",
    "ModelOption",
    "ModelProfile",
    "NetworkConditions",
    "ServiceSpec",
    "SimulationSummary",
    "Solver",
    "TickRecord",
    "TraceError",
    "TracePoint",
    "UtilityCurve",
    "break_even_years",
    "brute_force_oracle",
    "compose",
    "data_gb_per_hour",
    "load_config",
    "load_country_prices",
    "load_trace",
    "meets_slo",
    "min_feasible_bandwidth",
    "model_curve",
    "network_cost_per_hour",
    "payload_bits",
    "run",
    "serialize_config",
    "service_curve",
    "simulate_cost",
    "solve_exact",
    "solve_greedy",
    "solve_max_min",
    "speedup",
    "total_latency",
    "transmit_ms",
    "utility_at",
]
