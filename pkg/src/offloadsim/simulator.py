"""Trace-driven replay: re-allocate the uplink each tick and score the result.

A trace is a sequence of (timestamp, uplink, RTT) samples; conditions hold
until the next sample (zero-order hold). The simulator issues one inference
request per service per tick, re-deriving curves and the allocation from the
tick's conditions. It is fully deterministic: stochastic traces are
generated offline and checked in as fixtures.

Oracle mode allocates with the tick's true conditions, so every grant is
feasible by construction. Estimate mode allocates with the previous tick's
observed conditions (the first tick has nothing older than itself), then
scores against the truth: the realized share of a grant scales with how far
the true uplink deviates from the estimate, and a request whose realized
latency misses its SLO falls back to the service's local model and scores
the local accuracy. Payload bits count whenever a cloud upload was
attempted, including ticks that end in fallback.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .allocation import AllocationProblem, AllocationResult, solve_exact, solve_greedy, solve_max_min
from .cost import BITS_PER_GB, CostBreakdown
from .latency import meets_slo, transmit_ms
from .profiles import Configuration, HardwareProfile, Location, NetworkConditions
from .utility import service_curve

MS_PER_HOUR = 3.6e6


class TraceError(Exception):
    """A trace file is unreadable or violates the trace schema."""


@dataclass(frozen=True)
class TracePoint:
    """Network conditions observed at one instant."""

    t_ms: int
    uplink_mbps: float
    rtt_ms: float

    def __post_init__(self) -> None:
        if self.t_ms < 0:
            raise ValueError(f"t_ms must be nonnegative, got {self.t_ms}")
        if self.uplink_mbps <= 0:
            raise ValueError(f"uplink_mbps must be positive, got {self.uplink_mbps}")
        if self.rtt_ms < 0:
            raise ValueError(f"rtt_ms must be nonnegative, got {self.rtt_ms}")

    @property
    def conditions(self) -> NetworkConditions:
        return NetworkConditions(self.uplink_mbps, self.rtt_ms)


class Solver(str, Enum):
    EXACT = "exact"
    GREEDY = "greedy"
    MAX_MIN = "max_min"


class Mode(str, Enum):
    ORACLE = "oracle"
    ESTIMATE = "estimate"


_SOLVERS = {
    Solver.EXACT: solve_exact,
    Solver.GREEDY: solve_greedy,
    Solver.MAX_MIN: solve_max_min,
}

TRACE_HEADER = ("t_ms", "uplink_mbps", "rtt_ms")


@dataclass(frozen=True)
class ServiceTick:
    """One service's outcome in one tick."""

    service: str
    option_id: str
    granted_mbps: float
    utility: float
    slo_met: bool
    fell_back: bool


@dataclass(frozen=True)
class TickRecord:
    """Everything that happened in one tick."""

    t_ms: int
    services: tuple[ServiceTick, ...]
    total_utility: float
    bits_transmitted: int


@dataclass(frozen=True)
class SimulationSummary:
    """Aggregates over a whole run."""

    num_ticks: int
    duration_ms: int
    mean_total_utility: float
    min_total_utility: float
    fallback_count: int
    slo_miss_count: int
    total_bits: int
    cost: CostBreakdown


def load_trace(path: str | Path) -> list[TracePoint]:
    """Read a trace CSV (header ``t_ms,uplink_mbps,rtt_ms``).

    Raises TraceError naming the offending line for malformed rows and for
    timestamps that fail to strictly increase.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise TraceError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise TraceError(f"{path}:1: missing header; expected {','.join(TRACE_HEADER)}")
    header = tuple(cell.strip() for cell in lines[0].split(","))
    if header != TRACE_HEADER:
        raise TraceError(
            f"{path}:1: bad header {lines[0]!r}; expected {','.join(TRACE_HEADER)}"
        )
    points: list[TracePoint] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = [cell.strip() for cell in line.split(",")]
        if len(cells) != 3:
            raise TraceError(f"{path}:{lineno}: expected 3 comma-separated fields, got {len(cells)}")
        try:
            t_ms = int(cells[0])
            uplink = float(cells[1])
            rtt = float(cells[2])
        except ValueError as exc:
            raise TraceError(f"{path}:{lineno}: {exc}") from None
        try:
            point = TracePoint(t_ms, uplink, rtt)
        except ValueError as exc:
            raise TraceError(f"{path}:{lineno}: {exc}") from None
        if points and point.t_ms <= points[-1].t_ms:
            raise TraceError(
                f"{path}:{lineno}: timestamps must strictly increase "
                f"({points[-1].t_ms} then {point.t_ms})"
            )
        points.append(point)
    return points


def conditions_at(trace: Sequence[TracePoint], t_ms: int) -> NetworkConditions:
    """Zero-order-hold lookup: the most recent sample at or before ``t_ms``."""
    if not trace:
        raise ValueError("trace must contain at least one point")
    if t_ms < trace[0].t_ms:
        raise ValueError(f"t_ms {t_ms} precedes the first trace sample {trace[0].t_ms}")
    timestamps = [point.t_ms for point in trace]
    return trace[bisect_right(timestamps, t_ms) - 1].conditions


def billed_cloud_hardware(config: Configuration) -> HardwareProfile | None:
    """The single cloud hardware profile a run rents, or None if all-local.

    Cost accounting models one rented machine; configurations whose services
    reference several distinct cloud hardware profiles are rejected.
    """
    cloud: dict[str, HardwareProfile] = {}
    for service in config.services:
        for option in service.remote_options:
            if option.hardware.location is Location.CLOUD:
                cloud[option.hardware.id] = option.hardware
    if not cloud:
        return None
    if len(cloud) > 1:
        raise ValueError(
            f"cost accounting supports one cloud hardware profile per run, "
            f"found {sorted(cloud)}"
        )
    return next(iter(cloud.values()))


def run(
    config: Configuration,
    trace: Sequence[TracePoint],
    solver: Solver = Solver.EXACT,
    mode: Mode = Mode.ORACLE,
    tick_ms: int = 100,
) -> tuple[list[TickRecord], SimulationSummary]:
    """Replay a trace, re-allocating every ``tick_ms`` milliseconds.

    Ticks run from the first trace timestamp to the last, inclusive; the
    reported duration is ``num_ticks * tick_ms`` (each tick owns one tick
    interval). Returns per-tick records and the run summary.
    """
    if not trace:
        raise ValueError("trace must contain at least one point")
    if not isinstance(tick_ms, int) or isinstance(tick_ms, bool) or tick_ms <= 0:
        raise ValueError(f"tick_ms must be a positive integer, got {tick_ms!r}")
    if not config.services:
        raise ValueError("configuration has no services to simulate")
    solve = _SOLVERS[Solver(solver)]
    mode = Mode(mode)
    hardware = billed_cloud_hardware(config)
    price = config.economics.network_price_usd_per_gb

    t_first = trace[0].t_ms
    t_last = trace[-1].t_ms
    num_ticks = (t_last - t_first) // tick_ms + 1

    records: list[TickRecord] = []
    total_bits = 0
    network_usd = 0.0
    data_gb = 0.0
    fallback_count = 0
    slo_miss_count = 0
    utility_sum = 0.0
    min_utility = None
    previous: NetworkConditions | None = None

    for k in range(num_ticks):
        t = t_first + k * tick_ms
        truth = conditions_at(trace, t)
        estimate = truth if (mode is Mode.ORACLE or previous is None) else previous
        curves = tuple(
            (service.name, service_curve(service, estimate.rtt_ms))
            for service in config.services
        )
        problem = AllocationProblem(curves, budget_mbps=estimate.uplink_mbps)
        allocation: AllocationResult = solve(problem)

        service_ticks: list[ServiceTick] = []
        tick_bits = 0
        tick_utility = 0.0
        for name, grant in allocation.grants.items():
            service = config.service_by_name(name)
            if not grant.is_remote:
                outcome = ServiceTick(name, grant.option_id, 0.0, grant.utility, True, False)
            else:
                option = service.option_by_id(grant.option_id)
                realized_mbps = grant.bandwidth_mbps * (truth.uplink_mbps / estimate.uplink_mbps)
                latency = (
                    transmit_ms(grant.payload_bits, realized_mbps)
                    + truth.rtt_ms
                    + option.model.exec_time_ms[option.hardware.id]
                )
                tick_bits += grant.payload_bits
                if meets_slo(latency, service.slo_ms):
                    outcome = ServiceTick(
                        name, grant.option_id, grant.bandwidth_mbps, grant.utility, True, False
                    )
                else:
                    outcome = ServiceTick(
                        name,
                        grant.option_id,
                        grant.bandwidth_mbps,
                        service.local_option.model.accuracy,
                        False,
                        True,
                    )
            service_ticks.append(outcome)
            tick_utility += outcome.utility
            fallback_count += outcome.fell_back
            slo_miss_count += not outcome.slo_met

        records.append(TickRecord(t, tuple(service_ticks), tick_utility, tick_bits))
        total_bits += tick_bits
        network_usd += tick_bits / BITS_PER_GB * price
        data_gb += tick_bits / BITS_PER_GB
        utility_sum += tick_utility
        if min_utility is None or tick_utility < min_utility:
            min_utility = tick_utility
        previous = truth

    duration_ms = num_ticks * tick_ms
    hours = duration_ms / MS_PER_HOUR
    cost = CostBreakdown(
        network_usd_per_hour=network_usd / hours,
        compute_usd_per_hour=hardware.hourly_cost_usd if hardware is not None else 0.0,
        data_gb_per_hour=data_gb / hours,
    )
    summary = SimulationSummary(
        num_ticks=num_ticks,
        duration_ms=duration_ms,
        mean_total_utility=utility_sum / num_ticks,
        min_total_utility=min_utility if min_utility is not None else 0.0,
        fallback_count=fallback_count,
        slo_miss_count=slo_miss_count,
        total_bits=total_bits,
        cost=cost,
    )
    return records, summary
