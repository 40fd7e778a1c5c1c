"""Bandwidth allocation across services as a multiple-choice knapsack.

Each service contributes exactly one breakpoint from its utility curve; the
chosen breakpoints' bandwidths must fit the shared uplink budget. Floors sit
at bandwidth 0, so every budget admits at least the all-local assignment,
and allocating strictly between breakpoints never helps (curves are step
functions), so solutions are restricted to breakpoint bandwidths and any
leftover budget stays unallocated.

Ties are broken identically everywhere: higher total utility first, then
lower total bandwidth, then the lexicographically smallest option-id vector
taken in sorted service-name order. ``solve_exact`` and
``brute_force_oracle`` must return identical results; they exist as
independent routes to the same answer.
"""

from __future__ import annotations

import itertools
from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping, Sequence

from .utility import Breakpoint, UtilityCurve

MAX_ENUMERATED_COMBOS = 1_000_000


@dataclass(frozen=True)
class AllocationProblem:
    """Services with their curves, a shared budget, and optional caps."""

    services: tuple[tuple[str, UtilityCurve], ...]
    budget_mbps: float
    per_service_cap_mbps: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        names = [name for name, _ in self.services]
        if len(set(names)) != len(names):
            raise ValueError("service names must be unique")
        if self.budget_mbps < 0:
            raise ValueError(f"budget_mbps must be nonnegative, got {self.budget_mbps}")
        if self.per_service_cap_mbps is not None:
            for name, cap in self.per_service_cap_mbps.items():
                if name not in names:
                    raise ValueError(f"cap references unknown service {name!r}")
                if cap < 0:
                    raise ValueError(f"cap for service {name!r} must be nonnegative, got {cap}")


@dataclass(frozen=True)
class Grant:
    """One service's share of the uplink: a curve breakpoint made concrete."""

    bandwidth_mbps: float
    utility: float
    option_id: str
    payload_bits: int

    @property
    def is_remote(self) -> bool:
        return self.bandwidth_mbps > 0.0


@dataclass(frozen=True)
class AllocationResult:
    """A complete assignment, one grant per service, within the budget."""

    grants: dict[str, Grant]
    total_utility: float
    total_bandwidth_mbps: float
    optimal: bool


def _usable(problem: AllocationProblem) -> tuple[list[str], list[tuple[Breakpoint, ...]]]:
    """Service names in sorted order with cap-filtered breakpoints."""
    names = sorted(name for name, _ in problem.services)
    curves = dict(problem.services)
    caps = problem.per_service_cap_mbps or {}
    per_service: list[tuple[Breakpoint, ...]] = []
    for name in names:
        bps = curves[name].breakpoints
        cap = caps.get(name)
        if cap is not None:
            bps = tuple(bp for bp in bps if bp.bandwidth_mbps <= cap)
        per_service.append(bps)
    return names, per_service


def _finish(
    names: Sequence[str],
    choice: Sequence[Breakpoint],
    optimal: bool,
) -> AllocationResult:
    grants = {
        name: Grant(bp.bandwidth_mbps, bp.utility, bp.option_id, bp.payload_bits)
        for name, bp in zip(names, choice)
    }
    total_bw = 0.0
    total_util = 0.0
    for bp in choice:
        total_bw += bp.bandwidth_mbps
        total_util += bp.utility
    return AllocationResult(grants, total_util, total_bw, optimal)


def _combo_key(choice: Sequence[Breakpoint], total_bw: float, total_util: float):
    return (-total_util, total_bw, tuple(bp.option_id for bp in choice))


def _guard_combo_count(per_service: Sequence[tuple[Breakpoint, ...]], what: str) -> None:
    combos = 1
    for bps in per_service:
        combos *= len(bps)
        if combos > MAX_ENUMERATED_COMBOS:
            raise ValueError(
                f"instance has more than {MAX_ENUMERATED_COMBOS} breakpoint "
                f"combinations; {what} enumerates them all"
            )


def brute_force_oracle(problem: AllocationProblem) -> AllocationResult:
    """Reference solver: enumerate every breakpoint combination outright.

    Kept deliberately dumb so it can arbitrate disagreements with the
    branch-and-bound path. Refuses oversized instances.
    """
    names, per_service = _usable(problem)
    _guard_combo_count(per_service, "the oracle")
    budget = problem.budget_mbps
    best_key = None
    best_choice: tuple[Breakpoint, ...] = ()
    for choice in itertools.product(*per_service):
        total_bw = 0.0
        total_util = 0.0
        for bp in choice:
            total_bw += bp.bandwidth_mbps
            total_util += bp.utility
        if total_bw > budget:
            continue
        key = _combo_key(choice, total_bw, total_util)
        if best_key is None or key < best_key:
            best_key = key
            best_choice = choice
    return _finish(names, best_choice, optimal=True)


def solve_exact(problem: AllocationProblem) -> AllocationResult:
    """Utility-maximal allocation by depth-first branch and bound.

    Services are visited in sorted-name order and bandwidth totals accumulate
    left to right, so accepted totals are bit-identical to the oracle's.
    Pruning uses an admissible per-service bound (the best utility each
    remaining service could afford on its own) and discards a branch only
    when the bound falls strictly below the incumbent utility, which keeps
    tie-breaking exact.
    """
    names, per_service = _usable(problem)
    budget = problem.budget_mbps
    count = len(names)
    bandwidths = [[bp.bandwidth_mbps for bp in bps] for bps in per_service]

    def best_alone(index: int, used_bw: float) -> float:
        """Max utility service ``index`` could reach on top of ``used_bw``."""
        bws = bandwidths[index]
        idx = bisect_right(bws, budget - used_bw) - 1
        # The bisect guess uses a rounded remainder; settle it against the
        # exact accumulated comparison the search itself applies.
        while idx + 1 < len(bws) and used_bw + bws[idx + 1] <= budget:
            idx += 1
        while idx > 0 and used_bw + bws[idx] > budget:
            idx -= 1
        return per_service[index][idx].utility

    best_key = None
    best_choice: tuple[Breakpoint, ...] = ()
    choice: list[Breakpoint] = []

    def descend(index: int, used_bw: float, used_util: float) -> None:
        nonlocal best_key, best_choice
        if index == count:
            key = _combo_key(choice, used_bw, used_util)
            if best_key is None or key < best_key:
                best_key = key
                best_choice = tuple(choice)
            return
        if best_key is not None:
            bound = used_util
            for j in range(index, count):
                bound += best_alone(j, used_bw)
            if bound < -best_key[0]:
                return
        for bp in reversed(per_service[index]):
            new_bw = used_bw + bp.bandwidth_mbps
            if new_bw > budget:
                continue
            choice.append(bp)
            descend(index + 1, new_bw, used_util + bp.utility)
            choice.pop()

    descend(0, 0.0, 0.0)
    return _finish(names, best_choice, optimal=True)


def solve_greedy(problem: AllocationProblem) -> AllocationResult:
    """Heuristic allocation: start all-local, buy the best upgrade each round.

    An upgrade moves one service to any higher breakpoint; candidates are
    ranked by utility gained per Mbps spent, ties by smaller bandwidth step,
    then service name, then option id. Polynomial time, never infeasible,
    but may fall short of ``solve_exact``.
    """
    names, per_service = _usable(problem)
    budget = problem.budget_mbps
    chosen = [0] * len(names)

    def total_with(service: int, index: int) -> float:
        total = 0.0
        for svc, idx in enumerate(chosen):
            if svc == service:
                idx = index
            total += per_service[svc][idx].bandwidth_mbps
        return total

    while True:
        best = None
        for svc, bps in enumerate(per_service):
            cur = bps[chosen[svc]]
            for idx in range(chosen[svc] + 1, len(bps)):
                nxt = bps[idx]
                if total_with(svc, idx) > budget:
                    continue
                delta_util = nxt.utility - cur.utility
                delta_bw = nxt.bandwidth_mbps - cur.bandwidth_mbps
                rank = (-(delta_util / delta_bw), delta_bw, names[svc], nxt.option_id)
                if best is None or rank < best[0]:
                    best = (rank, svc, idx)
        if best is None:
            break
        chosen[best[1]] = best[2]
    final = [per_service[svc][idx] for svc, idx in enumerate(chosen)]
    return _finish(names, final, optimal=False)


def solve_max_min(problem: AllocationProblem) -> AllocationResult:
    """Fairness-first allocation: maximize the worst-off service.

    Lexicographic max-min over the sorted per-service utility vector (raise
    the minimum, then the second smallest, and so on), then the usual
    bandwidth and option-id tie-breaks. Enumerates combinations, so it is
    subject to the same size guard as the oracle. Optimal for the max-min
    objective.
    """
    names, per_service = _usable(problem)
    _guard_combo_count(per_service, "max-min solving")
    budget = problem.budget_mbps
    best_key = None
    best_choice: tuple[Breakpoint, ...] = ()
    for choice in itertools.product(*per_service):
        total_bw = 0.0
        for bp in choice:
            total_bw += bp.bandwidth_mbps
        if total_bw > budget:
            continue
        worst_first = sorted(bp.utility for bp in choice)
        key = (
            tuple(-u for u in worst_first),
            total_bw,
            tuple(bp.option_id for bp in choice),
        )
        if best_key is None or key < best_key:
            best_key = key
            best_choice = choice
    return _finish(names, best_choice, optimal=True)
