"""Economics: hourly network and compute cost, and purchase amortization.

Data volume is decimal: 1 GB = 10^9 bytes = 8*10^9 bits. A year is 365 days
(8760 hours, no leap handling). At 50 Mbps a sustained uplink moves
50 * 3600 / 8000 = 22.5 GB per hour.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .profiles import (
    ConfigParseError,
    ConfigValidationError,
    EconomicParams,
    HardwareProfile,
)

BITS_PER_GB = 8e9
HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class CostBreakdown:
    """Hourly cost rates of keeping one vehicle's offloading running."""

    network_usd_per_hour: float
    compute_usd_per_hour: float
    data_gb_per_hour: float

    @property
    def total_usd_per_hour(self) -> float:
        return self.network_usd_per_hour + self.compute_usd_per_hour


def data_gb_per_hour(uplink_mbps: float) -> float:
    """Decimal gigabytes moved per hour at a sustained uplink rate."""
    if uplink_mbps < 0:
        raise ValueError(f"uplink_mbps must be nonnegative, got {uplink_mbps}")
    return uplink_mbps * 3600.0 / 8000.0


def network_cost_per_hour(uplink_mbps: float, price_usd_per_gb: float) -> float:
    """Hourly cost of a sustained uplink at a per-gigabyte price."""
    if price_usd_per_gb < 0:
        raise ValueError(f"price_usd_per_gb must be nonnegative, got {price_usd_per_gb}")
    return data_gb_per_hour(uplink_mbps) * price_usd_per_gb


def break_even_years(purchase_usd: float, hourly_usd: float, utilization_fraction: float) -> float:
    """Years of rented operation that add up to the purchase price.

    ``utilization_fraction`` is the fraction of wall-clock time the vehicle
    is actually in use; rental only accrues then.
    """
    if purchase_usd < 0:
        raise ValueError(f"purchase_usd must be nonnegative, got {purchase_usd}")
    if hourly_usd <= 0:
        raise ValueError(f"hourly_usd must be positive, got {hourly_usd}")
    if not 0.0 < utilization_fraction <= 1.0:
        raise ValueError(
            f"utilization_fraction must be in (0, 1], got {utilization_fraction}"
        )
    return purchase_usd / (hourly_usd * utilization_fraction * HOURS_PER_YEAR)


def simulate_cost(
    total_bits: int | float,
    hours: float,
    params: EconomicParams,
    hardware: HardwareProfile | None = None,
) -> CostBreakdown:
    """Hourly cost rates realized by an actual run.

    Network cost charges the bits actually transmitted (not the nominal
    bandwidth); compute cost is the hardware's hourly rental rate, or zero
    when no cloud hardware was involved.
    """
    if hours <= 0:
        raise ValueError(f"hours must be positive, got {hours}")
    if total_bits < 0:
        raise ValueError(f"total_bits must be nonnegative, got {total_bits}")
    gb = total_bits / BITS_PER_GB
    return CostBreakdown(
        network_usd_per_hour=gb * params.network_price_usd_per_gb / hours,
        compute_usd_per_hour=hardware.hourly_cost_usd if hardware is not None else 0.0,
        data_gb_per_hour=gb / hours,
    )


@dataclass(frozen=True)
class CountryPrice:
    """One row of the shipped mobile-data price table."""

    name: str
    usd_per_gb: float
    published_usd_per_hour: float | None = None


def load_country_prices(path: str | Path) -> tuple[CountryPrice, ...]:
    """Load the per-country mobile data price table (JSON).

    Schema: {"countries": [{"name", "usd_per_gb", "published_usd_per_hour"?}]}.
    Row order is preserved; it drives report ordering.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or set(data) != {"countries"}:
        raise ConfigValidationError(f"{path}: expected a single top-level key 'countries'")
    rows: list[CountryPrice] = []
    seen: set[str] = set()
    for entry in data["countries"]:
        if not isinstance(entry, dict):
            raise ConfigValidationError(f"{path}: country entries must be objects")
        unknown = sorted(set(entry) - {"name", "usd_per_gb", "published_usd_per_hour"})
        if unknown:
            raise ConfigValidationError(f"{path}: unknown key(s) {unknown} in country entry")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigValidationError(f"{path}: country name must be a non-empty string")
        if name in seen:
            raise ConfigValidationError(f"{path}: duplicate country {name!r}")
        seen.add(name)
        price = entry.get("usd_per_gb")
        if isinstance(price, bool) or not isinstance(price, (int, float)) or price < 0:
            raise ConfigValidationError(f"{path}: {name!r} needs a nonnegative usd_per_gb")
        published = entry.get("published_usd_per_hour")
        if published is not None and (
            isinstance(published, bool) or not isinstance(published, (int, float)) or published < 0
        ):
            raise ConfigValidationError(
                f"{path}: {name!r} published_usd_per_hour must be a nonnegative number"
            )
        rows.append(CountryPrice(name, float(price), None if published is None else float(published)))
    if not rows:
        raise ConfigValidationError(f"{path}: country table is empty")
    return tuple(rows)


def country_by_name(rows: tuple[CountryPrice, ...], name: str) -> CountryPrice:
    for row in rows:
        if row.name == name:
            return row
    raise KeyError(f"unknown country {name!r}")
