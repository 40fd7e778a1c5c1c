"""End-to-end latency arithmetic and SLO feasibility.

All times are milliseconds; bandwidth is Mbps with 1 Mbps = 10^6 bits per
second, so a payload of ``bits`` takes ``bits / (mbps * 1e3)`` ms on the
wire. Result download is excluded from the latency math: outputs are small
and ride the much faster downlink.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .profiles import HardwareProfile, Location, ModelProfile, NetworkConditions, payload_bits

# Relative tolerance when comparing a latency against its SLO. A transfer at
# exactly the minimum feasible bandwidth must count as meeting the deadline
# even when the division reintroduces a one-ulp overshoot.
SLO_REL_TOL = 1e-9


@dataclass(frozen=True)
class LatencyBreakdown:
    """Additive components of one request's end-to-end latency."""

    transmit_ms: float
    rtt_ms: float
    exec_ms: float

    @property
    def total_ms(self) -> float:
        return self.transmit_ms + self.rtt_ms + self.exec_ms


def transmit_ms(bits: int | float, uplink_mbps: float) -> float:
    """Serialization delay to push ``bits`` up a link of ``uplink_mbps``."""
    if uplink_mbps <= 0:
        raise ValueError(f"uplink_mbps must be positive, got {uplink_mbps}")
    if bits < 0:
        raise ValueError(f"bits must be nonnegative, got {bits}")
    return bits / (uplink_mbps * 1e3)


def _exec_ms(model: ModelProfile, hardware: HardwareProfile) -> float:
    try:
        return model.exec_time_ms[hardware.id]
    except KeyError:
        raise KeyError(
            f"model {model.id!r} has no execution time for hardware {hardware.id!r}"
        ) from None


def total_latency(
    model: ModelProfile,
    hardware: HardwareProfile,
    net: NetworkConditions | None = None,
) -> LatencyBreakdown:
    """Latency of one request on the given hardware.

    On-vehicle hardware costs only execution time and ignores ``net``. Cloud
    hardware adds the input upload and one network round trip and therefore
    requires ``net``.
    """
    exec_ms = _exec_ms(model, hardware)
    if hardware.location is Location.ON_VEHICLE:
        return LatencyBreakdown(0.0, 0.0, exec_ms)
    if net is None:
        raise ValueError(f"network conditions required for cloud hardware {hardware.id!r}")
    return LatencyBreakdown(
        transmit_ms(payload_bits(model), net.uplink_mbps), net.rtt_ms, exec_ms
    )


def meets_slo(latency_ms: float, slo_ms: float) -> bool:
    """Closed-boundary SLO check: exactly on the deadline counts as met."""
    return latency_ms <= slo_ms * (1.0 + SLO_REL_TOL)


def min_bandwidth_for_bits(bits: int | float, slo_ms: float, rtt_ms: float, exec_ms: float) -> float:
    """Minimum uplink Mbps to move ``bits`` within the remaining latency budget.

    Returns +inf when the RTT and execution time already exhaust the SLO,
    and 0 for an empty payload.
    """
    budget_ms = slo_ms - rtt_ms - exec_ms
    if budget_ms <= 0:
        return math.inf
    return bits / (budget_ms * 1e3)


def min_feasible_bandwidth(
    model: ModelProfile,
    hardware: HardwareProfile,
    slo_ms: float,
    rtt_ms: float,
) -> float:
    """Bandwidth at which offloading this model tips into SLO feasibility.

    Only meaningful for cloud hardware; on-vehicle placements need no
    bandwidth and asking for their tipping point is a usage error. Returns
    +inf when no finite bandwidth can meet the deadline. Evaluating
    total_latency at the returned bandwidth lands on the SLO to within
    floating-point tolerance.
    """
    if hardware.location is Location.ON_VEHICLE:
        raise ValueError(
            f"hardware {hardware.id!r} is on-vehicle; it has no minimum feasible bandwidth"
        )
    return min_bandwidth_for_bits(
        payload_bits(model), slo_ms, rtt_ms, _exec_ms(model, hardware)
    )


def speedup(
    model: ModelProfile,
    local_hw: HardwareProfile,
    cloud_hw: HardwareProfile,
    net: NetworkConditions,
) -> float:
    """How much faster the cloud serves this model, network time included."""
    local = total_latency(model, local_hw)
    remote = total_latency(model, cloud_hw, net)
    return local.total_ms / remote.total_ms
