"""Command-line front end: reproducible reports over the library.

Five subcommands (feasibility, curves, allocate, simulate, cost) read a
configuration file and emit a report on stdout in one of three formats. The
csv and json formats are deterministic contracts: stable row ordering and
fixed decimal places (USD 2, milliseconds 1, Mbps 2, utility 1). The table
format is for humans and may change freely.

Exit codes: 0 success, 1 computation error, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Sequence

from . import allocation, cost, simulator
from .datafiles import packaged_path
from .latency import total_latency
from .profiles import ConfigError, Configuration, Location, NetworkConditions, load_config
from .utility import service_curve

DEFAULT_PRICES = "country_prices.json"


class UsageError(Exception):
    """Bad flag values or references; maps to exit code 2."""


def _fmt(value: float | None, places: int) -> str:
    return "" if value is None else f"{value:.{places}f}"


def _round(value: float | None, places: int) -> float | None:
    return None if value is None else round(value, places)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _json_text(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def _table_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _render(fmt: str, header: Sequence[str], rows: Sequence[Sequence[str]], document: Any) -> str:
    if fmt == "csv":
        return _csv_text(header, rows)
    if fmt == "json":
        return _json_text(document)
    return _table_text(header, rows)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_feasibility(config: Configuration, args: argparse.Namespace) -> str:
    """Latency breakdown per (model, cloud hardware) at fixed conditions."""
    if args.bandwidth_mbps <= 0:
        raise UsageError(f"--bandwidth-mbps must be positive, got {args.bandwidth_mbps}")
    if args.rtt_ms < 0:
        raise UsageError(f"--rtt-ms must be nonnegative, got {args.rtt_ms}")
    net = NetworkConditions(args.bandwidth_mbps, args.rtt_ms)
    local_hw = [hw for hw in config.hardware if hw.location is Location.ON_VEHICLE]
    cloud_hw = [hw for hw in config.hardware if hw.location is Location.CLOUD]

    header = [
        "model",
        "cloud_hardware",
        "exec_local_ms",
        "exec_cloud_ms",
        "transfer_ms",
        "total_ms",
        "speedup",
    ]
    rows: list[list[str]] = []
    entries: list[dict[str, Any]] = []
    for model in config.models:
        local = next((hw for hw in local_hw if hw.id in model.exec_time_ms), None)
        for hw in cloud_hw:
            if hw.id not in model.exec_time_ms:
                continue
            remote = total_latency(model, hw, net)
            transfer_ms = remote.transmit_ms + remote.rtt_ms
            exec_local = model.exec_time_ms[local.id] if local is not None else None
            ratio = exec_local / remote.total_ms if exec_local is not None else None
            rows.append(
                [
                    model.id,
                    hw.id,
                    _fmt(exec_local, 1),
                    _fmt(remote.exec_ms, 1),
                    _fmt(transfer_ms, 1),
                    _fmt(remote.total_ms, 1),
                    _fmt(ratio, 2),
                ]
            )
            entries.append(
                {
                    "model": model.id,
                    "cloud_hardware": hw.id,
                    "exec_local_ms": _round(exec_local, 1),
                    "exec_cloud_ms": _round(remote.exec_ms, 1),
                    "transfer_ms": _round(transfer_ms, 1),
                    "total_ms": _round(remote.total_ms, 1),
                    "speedup": _round(ratio, 2),
                }
            )
    document = {
        "bandwidth_mbps": _round(args.bandwidth_mbps, 2),
        "rtt_ms": _round(args.rtt_ms, 1),
        "rows": entries,
    }
    return _render(args.format, header, rows, document)


def cmd_curves(config: Configuration, args: argparse.Namespace) -> str:
    """Composed utility curve breakpoints, with option provenance."""
    if args.rtt_ms < 0:
        raise UsageError(f"--rtt-ms must be nonnegative, got {args.rtt_ms}")
    if args.service is not None:
        try:
            services = (config.service_by_name(args.service),)
        except KeyError:
            raise UsageError(f"unknown service {args.service!r}") from None
    else:
        services = config.services
    header = ["service", "bandwidth_mbps", "utility", "option_id"]
    rows: list[list[str]] = []
    entries: list[dict[str, Any]] = []
    for service in services:
        curve = service_curve(service, args.rtt_ms)
        breakpoints = []
        for bp in curve.breakpoints:
            rows.append([service.name, _fmt(bp.bandwidth_mbps, 2), _fmt(bp.utility, 1), bp.option_id])
            breakpoints.append(
                {
                    "bandwidth_mbps": _round(bp.bandwidth_mbps, 2),
                    "utility": _round(bp.utility, 1),
                    "option_id": bp.option_id,
                    "payload_bits": bp.payload_bits,
                }
            )
        entries.append({"service": service.name, "breakpoints": breakpoints})
    document = {"rtt_ms": _round(args.rtt_ms, 1), "services": entries}
    return _render(args.format, header, rows, document)


def cmd_allocate(config: Configuration, args: argparse.Namespace) -> str:
    """Solve one allocation at fixed conditions and report the grants."""
    if args.budget_mbps < 0:
        raise UsageError(f"--budget-mbps must be nonnegative, got {args.budget_mbps}")
    if args.rtt_ms < 0:
        raise UsageError(f"--rtt-ms must be nonnegative, got {args.rtt_ms}")
    if not config.services:
        raise UsageError("configuration has no services to allocate for")
    curves = tuple(
        (service.name, service_curve(service, args.rtt_ms)) for service in config.services
    )
    problem = allocation.AllocationProblem(curves, budget_mbps=args.budget_mbps)
    solve = {
        "exact": allocation.solve_exact,
        "greedy": allocation.solve_greedy,
        "max_min": allocation.solve_max_min,
    }[args.solver]
    result = solve(problem)
    header = ["service", "option_id", "bandwidth_mbps", "utility", "payload_bits"]
    rows = [
        [name, grant.option_id, _fmt(grant.bandwidth_mbps, 2), _fmt(grant.utility, 1), str(grant.payload_bits)]
        for name, grant in result.grants.items()
    ]
    document = {
        "budget_mbps": _round(args.budget_mbps, 2),
        "rtt_ms": _round(args.rtt_ms, 1),
        "solver": args.solver,
        "optimal": result.optimal,
        "grants": {
            name: {
                "bandwidth_mbps": _round(grant.bandwidth_mbps, 2),
                "utility": _round(grant.utility, 1),
                "option_id": grant.option_id,
                "payload_bits": grant.payload_bits,
            }
            for name, grant in result.grants.items()
        },
        "total_bandwidth_mbps": _round(result.total_bandwidth_mbps, 2),
        "total_utility": _round(result.total_utility, 1),
    }
    return _render(args.format, header, rows, document)


def cmd_simulate(config: Configuration, args: argparse.Namespace) -> str:
    """Replay a trace; csv emits per-tick rows, json the run summary."""
    if args.tick_ms <= 0:
        raise UsageError(f"--tick-ms must be positive, got {args.tick_ms}")
    trace = simulator.load_trace(args.trace)
    if not trace:
        raise UsageError(f"trace {args.trace} has no samples")
    records, summary = simulator.run(
        config,
        trace,
        solver=simulator.Solver(args.solver),
        mode=simulator.Mode(args.mode),
        tick_ms=args.tick_ms,
    )
    header = ["t_ms", "service", "option_id", "granted_mbps", "utility", "slo_met", "fell_back"]
    rows = [
        [
            str(record.t_ms),
            tick.service,
            tick.option_id,
            _fmt(tick.granted_mbps, 2),
            _fmt(tick.utility, 1),
            str(tick.slo_met).lower(),
            str(tick.fell_back).lower(),
        ]
        for record in records
        for tick in record.services
    ]
    document = {
        "trace": str(args.trace),
        "solver": args.solver,
        "mode": args.mode,
        "tick_ms": args.tick_ms,
        "num_ticks": summary.num_ticks,
        "duration_ms": summary.duration_ms,
        "mean_total_utility": _round(summary.mean_total_utility, 1),
        "min_total_utility": _round(summary.min_total_utility, 1),
        "fallback_count": summary.fallback_count,
        "slo_miss_count": summary.slo_miss_count,
        "total_bits": summary.total_bits,
        "cost": {
            "network_usd_per_hour": _round(summary.cost.network_usd_per_hour, 2),
            "compute_usd_per_hour": _round(summary.cost.compute_usd_per_hour, 2),
            "total_usd_per_hour": _round(summary.cost.total_usd_per_hour, 2),
            "data_gb_per_hour": _round(summary.cost.data_gb_per_hour, 3),
        },
    }
    if args.format == "table":
        lines = [
            f"ticks            {summary.num_ticks}",
            f"duration_ms      {summary.duration_ms}",
            f"mean utility     {summary.mean_total_utility:.1f}",
            f"min utility      {summary.min_total_utility:.1f}",
            f"fallbacks        {summary.fallback_count}",
            f"slo misses       {summary.slo_miss_count}",
            f"total bits       {summary.total_bits}",
            f"network $/hour   {summary.cost.network_usd_per_hour:.2f}",
            f"compute $/hour   {summary.cost.compute_usd_per_hour:.2f}",
            f"total $/hour     {summary.cost.total_usd_per_hour:.2f}",
            f"data GB/hour     {summary.cost.data_gb_per_hour:.3f}",
        ]
        return "\n".join(lines) + "\n"
    return _render(args.format, header, rows, document)


def cmd_cost(config: Configuration, args: argparse.Namespace) -> str:
    """Hourly network cost per country (or one price) plus amortization."""
    if args.uplink_mbps < 0:
        raise UsageError(f"--uplink-mbps must be nonnegative, got {args.uplink_mbps}")
    prices_path = args.prices if args.prices is not None else packaged_path(DEFAULT_PRICES)

    break_even = None
    if args.purchase is not None:
        if args.purchase < 0:
            raise UsageError(f"--purchase must be nonnegative, got {args.purchase}")
        if args.compute_hourly is None:
            raise UsageError("--purchase requires --compute-hourly (the hourly cost to amortize)")
        if args.compute_hourly <= 0:
            raise UsageError(f"--compute-hourly must be positive, got {args.compute_hourly}")
        utilization = (
            args.utilization
            if args.utilization is not None
            else config.economics.utilization_fraction
        )
        if not 0.0 < utilization <= 1.0:
            raise UsageError(f"utilization must be in (0, 1], got {utilization}")
        break_even = {
            "purchase_usd": _round(args.purchase, 2),
            "hourly_usd": _round(args.compute_hourly, 2),
            "utilization_fraction": utilization,
            "break_even_years": _round(
                cost.break_even_years(args.purchase, args.compute_hourly, utilization), 1
            ),
        }

    header = ["name", "usd_per_gb", "network_usd_per_hour", "published_usd_per_hour"]
    gb_hour = cost.data_gb_per_hour(args.uplink_mbps)
    compute_hourly = args.compute_hourly if args.compute_hourly is not None else 0.0

    if args.price_per_gb is not None:
        if args.price_per_gb < 0:
            raise UsageError(f"--price-per-gb must be nonnegative, got {args.price_per_gb}")
        selected = [cost.CountryPrice("", args.price_per_gb)]
    else:
        table = cost.load_country_prices(prices_path)
        if args.country is not None:
            try:
                selected = [cost.country_by_name(table, args.country)]
            except KeyError:
                raise UsageError(f"unknown country {args.country!r} in {prices_path}") from None
        else:
            selected = list(table)

    rows: list[list[str]] = []
    entries: list[dict[str, Any]] = []
    for row in selected:
        hourly = cost.network_cost_per_hour(args.uplink_mbps, row.usd_per_gb)
        rows.append(
            [row.name, f"{row.usd_per_gb}", _fmt(hourly, 2), _fmt(row.published_usd_per_hour, 2)]
        )
        entries.append(
            {
                "name": row.name,
                "usd_per_gb": row.usd_per_gb,
                "network_usd_per_hour": _round(hourly, 2),
                "published_usd_per_hour": _round(row.published_usd_per_hour, 2),
                "total_usd_per_hour": _round(hourly + compute_hourly, 2),
            }
        )
    document: dict[str, Any] = {
        "uplink_mbps": _round(args.uplink_mbps, 2),
        "data_gb_per_hour": _round(gb_hour, 3),
        "compute_usd_per_hour": _round(compute_hourly, 2),
        "countries": entries,
    }
    if break_even is not None:
        document["break_even"] = break_even
    text = _render(args.format, header, rows, document)
    if break_even is not None and args.format == "table":
        text += (
            f"\nbreak-even: {break_even['break_even_years']:.1f} years "
            f"(purchase ${args.purchase:.2f} at ${args.compute_hourly:.2f}/hour, "
            f"utilization {break_even['utilization_fraction']})\n"
        )
    return text


# ---------------------------------------------------------------------------
# Parser and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offloadsim",
        description="SLO-aware bandwidth allocation and trace replay for vehicle-to-cloud offloading.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="configuration JSON file")
        p.add_argument(
            "--format",
            choices=("table", "csv", "json"),
            default="table",
            help="output format (csv/json are stable; table is for humans)",
        )

    p = sub.add_parser("feasibility", help="latency breakdown per model at fixed conditions")
    common(p)
    p.add_argument("--bandwidth-mbps", type=float, default=200.0, help="uplink bandwidth (default 200)")
    p.add_argument("--rtt-ms", type=float, default=12.0, help="round-trip time (default 12)")

    p = sub.add_parser("curves", help="utility curve breakpoints per service")
    common(p)
    p.add_argument("--service", help="limit to one service (default: all)")
    p.add_argument("--rtt-ms", type=float, default=12.0, help="round-trip time (default 12)")

    p = sub.add_parser("allocate", help="allocate a bandwidth budget across services")
    common(p)
    p.add_argument("--budget-mbps", type=float, required=True, help="uplink budget to divide")
    p.add_argument(
        "--solver", choices=("exact", "greedy", "max_min"), default="exact", help="allocation strategy"
    )
    p.add_argument("--rtt-ms", type=float, default=12.0, help="round-trip time (default 12)")

    p = sub.add_parser("simulate", help="replay a network trace tick by tick")
    common(p)
    p.add_argument("--trace", required=True, help="trace CSV (t_ms,uplink_mbps,rtt_ms)")
    p.add_argument(
        "--solver", choices=("exact", "greedy", "max_min"), default="exact", help="allocation strategy"
    )
    p.add_argument(
        "--mode",
        choices=("oracle", "estimate"),
        default="oracle",
        help="allocate with true (oracle) or one-tick-lagged (estimate) conditions",
    )
    p.add_argument("--tick-ms", type=int, default=100, help="re-allocation period (default 100)")

    p = sub.add_parser("cost", help="hourly network cost and purchase amortization")
    common(p)
    p.add_argument("--uplink-mbps", type=float, default=50.0, help="sustained uplink (default 50)")
    p.add_argument("--prices", help="country price table JSON (default: packaged table)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--country", help="report a single country from the price table")
    group.add_argument("--price-per-gb", type=float, help="report a single custom $/GB price")
    p.add_argument("--compute-hourly", type=float, help="hourly cost of the rented resources")
    p.add_argument("--purchase", type=float, help="hardware purchase price to amortize")
    p.add_argument(
        "--utilization",
        type=float,
        help="vehicle utilization fraction (default: from the config's economics)",
    )
    return parser


_COMMANDS = {
    "feasibility": cmd_feasibility,
    "curves": cmd_curves,
    "allocate": cmd_allocate,
    "simulate": cmd_simulate,
    "cost": cmd_cost,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        text = _COMMANDS[args.command](config, args)
    except (ConfigError, simulator.TraceError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # computation failure: report, do not traceback
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
