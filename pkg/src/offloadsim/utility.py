"""Utility curves: accuracy as a step function of granted uplink bandwidth.

A curve is piecewise constant, right continuous and non-decreasing, with its
first breakpoint at bandwidth 0. A single cloud option steps from 0 to its
accuracy at its minimum feasible bandwidth; a service's curve is the
pointwise maximum over its options and therefore floors at the guaranteed
local accuracy. Curves are pure values, recomputed whenever the RTT changes.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .latency import min_feasible_bandwidth
from .profiles import Location, ModelOption, ServiceSpec, payload_bits

# option_id of a breakpoint that grants nothing (the zero floor of a pure
# cloud-option curve, where insufficient bandwidth yields no result).
NO_OPTION = ""


@dataclass(frozen=True)
class Breakpoint:
    """From ``bandwidth_mbps`` onward, ``option_id`` is available at ``utility``."""

    bandwidth_mbps: float
    utility: float
    option_id: str
    payload_bits: int


@dataclass(frozen=True)
class UtilityCurve:
    """Canonical step curve: strictly increasing bandwidths and utilities."""

    breakpoints: tuple[Breakpoint, ...]

    def __post_init__(self) -> None:
        if not self.breakpoints:
            raise ValueError("a utility curve needs at least its floor breakpoint")
        first = self.breakpoints[0]
        if first.bandwidth_mbps != 0.0:
            raise ValueError(
                f"first breakpoint must sit at bandwidth 0, got {first.bandwidth_mbps}"
            )
        for prev, cur in zip(self.breakpoints, self.breakpoints[1:]):
            if cur.bandwidth_mbps <= prev.bandwidth_mbps:
                raise ValueError(
                    f"breakpoint bandwidths must strictly increase: "
                    f"{prev.bandwidth_mbps} then {cur.bandwidth_mbps}"
                )
            if cur.utility <= prev.utility:
                raise ValueError(
                    f"breakpoint utilities must strictly increase: "
                    f"{prev.utility} then {cur.utility}"
                )

    @property
    def floor(self) -> Breakpoint:
        return self.breakpoints[0]

    def breakpoint_at(self, bandwidth_mbps: float) -> Breakpoint:
        """The breakpoint in effect at this bandwidth (closed steps)."""
        if bandwidth_mbps < 0:
            raise ValueError(f"bandwidth must be nonnegative, got {bandwidth_mbps}")
        bandwidths = [bp.bandwidth_mbps for bp in self.breakpoints]
        return self.breakpoints[bisect_right(bandwidths, bandwidth_mbps) - 1]

    def value_at(self, bandwidth_mbps: float) -> float:
        return self.breakpoint_at(bandwidth_mbps).utility


def utility_at(curve: UtilityCurve, bandwidth_mbps: float) -> float:
    """Utility obtained when granted this much bandwidth."""
    return curve.value_at(bandwidth_mbps)


def canonical(points: Iterable[Breakpoint]) -> UtilityCurve:
    """Reduce candidate breakpoints to canonical form.

    Each candidate means "this utility is available from this bandwidth on";
    the result is their pointwise maximum with dominated candidates dropped.
    Ties at equal bandwidth and utility keep the smaller payload, then the
    lexicographically smaller option id. Non-finite bandwidths (options that
    can never meet their deadline) are discarded.
    """
    ordered = sorted(
        (p for p in points if math.isfinite(p.bandwidth_mbps)),
        key=lambda p: (p.bandwidth_mbps, -p.utility, p.payload_bits, p.option_id),
    )
    kept: list[Breakpoint] = []
    for point in ordered:
        if kept and point.utility <= kept[-1].utility:
            continue
        kept.append(point)
    if not kept or kept[0].bandwidth_mbps != 0.0:
        raise ValueError("candidate breakpoints must include a floor at bandwidth 0")
    return UtilityCurve(tuple(kept))


def model_curve(service: ServiceSpec, option: ModelOption, rtt_ms: float) -> UtilityCurve:
    """Step curve of a single option under the service's SLO.

    An on-vehicle option is flat at its accuracy. A cloud option is 0 until
    its minimum feasible bandwidth and its accuracy from there on; a cloud
    option that can never meet the deadline stays flat at 0.
    """
    ids = [opt.id for opt in service.options()]
    if option.id not in ids:
        raise ValueError(f"option {option.id!r} does not belong to service {service.name!r}")
    if option.hardware.location is Location.ON_VEHICLE:
        return UtilityCurve(
            (Breakpoint(0.0, option.model.accuracy, option.id, payload_bits(option.model)),)
        )
    floor = Breakpoint(0.0, 0.0, NO_OPTION, 0)
    step = min_feasible_bandwidth(option.model, option.hardware, service.slo_ms, rtt_ms)
    if not math.isfinite(step):
        return UtilityCurve((floor,))
    if option.model.accuracy == 0.0:
        return UtilityCurve((floor,))
    return UtilityCurve(
        (floor, Breakpoint(step, option.model.accuracy, option.id, payload_bits(option.model)))
    )


def service_curve(service: ServiceSpec, rtt_ms: float) -> UtilityCurve:
    """Compose a service's options into one curve at a given RTT.

    Pointwise maximum over the local and remote option curves: the local
    option forms the floor at bandwidth 0, and each remote option that can
    meet the SLO contributes a candidate at its minimum feasible bandwidth.
    Remote options that never beat a cheaper alternative are dropped.
    """
    local = service.local_option
    candidates = [
        Breakpoint(0.0, local.model.accuracy, local.id, payload_bits(local.model))
    ]
    for option in service.remote_options:
        step = min_feasible_bandwidth(option.model, option.hardware, service.slo_ms, rtt_ms)
        if not math.isfinite(step):
            continue
        candidates.append(
            Breakpoint(step, option.model.accuracy, option.id, payload_bits(option.model))
        )
    return canonical(candidates)


def compose(curves: Sequence[UtilityCurve]) -> UtilityCurve:
    """Pointwise maximum of several curves, in canonical form."""
    if not curves:
        raise ValueError("compose needs at least one curve")
    return canonical(bp for curve in curves for bp in curve.breakpoints)


def sampled_values(curve: UtilityCurve, sorted_samples: Sequence[float]) -> list[float]:
    """Evaluate the curve at many nondecreasing sample bandwidths in one walk."""
    values: list[float] = []
    idx = 0
    last = len(curve.breakpoints) - 1
    for sample in sorted_samples:
        if sample < 0:
            raise ValueError(f"bandwidth must be nonnegative, got {sample}")
        while idx < last and curve.breakpoints[idx + 1].bandwidth_mbps <= sample:
            idx += 1
        values.append(curve.breakpoints[idx].utility)
    return values
