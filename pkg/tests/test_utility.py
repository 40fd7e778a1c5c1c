import math
import random

import pytest

from offloadsim.latency import min_feasible_bandwidth
from offloadsim.profiles import (
    HardwareProfile,
    Location,
    ModelOption,
    ModelProfile,
    ServiceSpec,
    load_config,
)
from offloadsim.utility import (
    NO_OPTION,
    Breakpoint,
    UtilityCurve,
    canonical,
    compose,
    model_curve,
    sampled_values,
    service_curve,
    utility_at,
)

EDGE = HardwareProfile("edge", Location.ON_VEHICLE)
GPU = HardwareProfile("gpu", Location.CLOUD, hourly_cost_usd=2.49)


def make_service(local_acc, remote_specs, slo=150.0):
    """remote_specs: list of (accuracy, exec_ms, width) tuples."""
    local_model = ModelProfile("local", local_acc, 640, 640, {"edge": 100.0})
    local = ModelOption(local_model, EDGE)
    remotes = []
    for i, (acc, exec_ms, width) in enumerate(remote_specs):
        m = ModelProfile(f"r{i}", acc, width, width, {"gpu": exec_ms})
        remotes.append(ModelOption(m, GPU))
    return ServiceSpec("svc", slo, local, tuple(remotes))


def test_curve_invariants_enforced():
    with pytest.raises(ValueError):
        UtilityCurve(())
    with pytest.raises(ValueError):
        UtilityCurve((Breakpoint(5.0, 10.0, "a", 1),))
    with pytest.raises(ValueError):
        UtilityCurve((Breakpoint(0.0, 10.0, "a", 1), Breakpoint(0.0, 20.0, "b", 1)))
    with pytest.raises(ValueError):
        UtilityCurve((Breakpoint(0.0, 10.0, "a", 1), Breakpoint(5.0, 10.0, "b", 1)))


def test_local_model_curve_is_flat():
    svc = make_service(40.2, [(47.2, 41.0, 896)])
    curve = model_curve(svc, svc.local_option, 12.0)
    assert len(curve.breakpoints) == 1
    assert curve.floor.utility == 40.2
    assert curve.floor.option_id == "local@edge"


def test_cloud_model_curve_steps_at_min_feasible_bandwidth():
    svc = make_service(40.2, [(47.2, 41.0, 896)])
    opt = svc.remote_options[0]
    curve = model_curve(svc, opt, 12.0)
    assert [bp.utility for bp in curve.breakpoints] == [0.0, 47.2]
    assert curve.breakpoints[0].option_id == NO_OPTION
    expected = min_feasible_bandwidth(opt.model, opt.hardware, 150.0, 12.0)
    assert curve.breakpoints[1].bandwidth_mbps == expected


def test_never_feasible_cloud_option_is_flat_zero():
    svc = make_service(40.2, [(60.0, 149.0, 896)])  # exec + rtt exceeds the SLO
    curve = model_curve(svc, svc.remote_options[0], 12.0)
    assert [bp.utility for bp in curve.breakpoints] == [0.0]


def test_model_curve_rejects_foreign_options():
    svc = make_service(40.2, [(47.2, 41.0, 896)])
    other = ModelOption(ModelProfile("x", 50.0, 64, 64, {"gpu": 5.0}), GPU)
    with pytest.raises(ValueError, match="does not belong"):
        model_curve(svc, other, 12.0)


def test_service_curve_golden_breakpoints(detection_config_path):
    config = load_config(detection_config_path)
    curve = service_curve(config.service_by_name("detection"), 12.0)
    assert [bp.option_id for bp in curve.breakpoints] == ["ED1@orin", "ED3@h100", "ED5@h100"]
    assert [bp.utility for bp in curve.breakpoints] == [40.2, 47.2, 51.2]
    assert curve.breakpoints[1].bandwidth_mbps == pytest.approx(4_816_896 / 97e3)
    assert curve.breakpoints[2].bandwidth_mbps == pytest.approx(8_000_000 / 73e3)


def test_dominated_remote_contributes_no_breakpoint():
    # the weaker cloud model is cheaper but never better than the local floor
    svc = make_service(40.2, [(34.3, 26.0, 512), (47.2, 41.0, 896)])
    curve = service_curve(svc, 12.0)
    assert [bp.utility for bp in curve.breakpoints] == [40.2, 47.2]


def test_curve_value_lookup_closed_steps(detection_config_path):
    config = load_config(detection_config_path)
    curve = service_curve(config.service_by_name("detection"), 12.0)
    step = curve.breakpoints[1].bandwidth_mbps
    assert utility_at(curve, 0.0) == 40.2
    assert utility_at(curve, step) == 47.2  # exactly on the step counts
    assert utility_at(curve, math.nextafter(step, 0.0)) == 40.2
    assert utility_at(curve, 60.0) == 47.2
    assert utility_at(curve, 1e9) == 51.2
    with pytest.raises(ValueError):
        utility_at(curve, -1.0)


def test_equal_utility_ties_prefer_smaller_payload_then_id():
    floor = Breakpoint(0.0, 10.0, "base", 100)
    heavy = Breakpoint(5.0, 20.0, "aa", 900)
    light = Breakpoint(5.0, 20.0, "zz", 100)
    curve = canonical([floor, heavy, light])
    assert curve.breakpoints[1].option_id == "zz"
    tie = canonical([floor, Breakpoint(5.0, 20.0, "b", 100), Breakpoint(5.0, 20.0, "a", 100)])
    assert tie.breakpoints[1].option_id == "a"


def test_equal_utility_at_higher_bandwidth_is_dropped():
    floor = Breakpoint(0.0, 10.0, "base", 100)
    early = Breakpoint(5.0, 20.0, "early", 100)
    late = Breakpoint(9.0, 20.0, "late", 50)
    curve = canonical([floor, early, late])
    assert [bp.option_id for bp in curve.breakpoints] == ["base", "early"]


def test_compose_matches_service_curve(detection_config_path):
    config = load_config(detection_config_path)
    svc = config.service_by_name("detection")
    curves = [model_curve(svc, opt, 12.0) for opt in svc.options()]
    assert compose(curves) == service_curve(svc, 12.0)
    with pytest.raises(ValueError):
        compose([])


def test_service_curve_is_pointwise_max_of_options():
    rng = random.Random(23)
    for _ in range(100):
        remotes = [
            (rng.uniform(0.1, 100.0), rng.uniform(1.0, 160.0), rng.randrange(64, 1600))
            for _ in range(rng.randrange(0, 5))
        ]
        svc = make_service(rng.uniform(0.1, 100.0), remotes, slo=rng.uniform(50.0, 300.0))
        rtt = rng.uniform(0.0, 40.0)
        curve = service_curve(svc, rtt)
        option_curves = [model_curve(svc, opt, rtt) for opt in svc.options()]
        for _ in range(50):
            b = rng.uniform(0.0, 400.0)
            expected = max(utility_at(c, b) for c in option_curves)
            assert utility_at(curve, b) == expected


def test_sampled_values_matches_pointwise_lookup():
    rng = random.Random(29)
    svc = make_service(40.2, [(47.2, 41.0, 896), (51.2, 65.0, 1280)])
    curve = service_curve(svc, 12.0)
    samples = sorted(rng.uniform(0.0, 300.0) for _ in range(500))
    assert sampled_values(curve, samples) == [utility_at(curve, b) for b in samples]
    with pytest.raises(ValueError):
        sampled_values(curve, [-1.0])


def test_utility_non_decreasing_in_bandwidth():
    svc = make_service(40.2, [(47.2, 41.0, 896), (51.2, 65.0, 1280)])
    curve = service_curve(svc, 12.0)
    previous = -math.inf
    for b in [x * 2.5 for x in range(100)]:
        value = utility_at(curve, b)
        assert value >= previous
        previous = value


def test_curves_shift_with_rtt():
    svc = make_service(40.2, [(47.2, 41.0, 896)])
    fast = service_curve(svc, 5.0)
    slow = service_curve(svc, 60.0)
    assert fast.breakpoints[1].bandwidth_mbps < slow.breakpoints[1].bandwidth_mbps
