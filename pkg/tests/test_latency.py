import math
import random

import pytest

from offloadsim.latency import (
    LatencyBreakdown,
    meets_slo,
    min_bandwidth_for_bits,
    min_feasible_bandwidth,
    speedup,
    total_latency,
    transmit_ms,
)
from offloadsim.profiles import (
    HardwareProfile,
    Location,
    ModelProfile,
    NetworkConditions,
    load_config,
)

EDGE = HardwareProfile("edge", Location.ON_VEHICLE)
GPU = HardwareProfile("gpu", Location.CLOUD, hourly_cost_usd=2.49)


def model(exec_edge=None, exec_gpu=None, width=640, height=640, bpp=6.0, accuracy=40.0):
    times = {}
    if exec_edge is not None:
        times["edge"] = exec_edge
    if exec_gpu is not None:
        times["gpu"] = exec_gpu
    return ModelProfile("m", accuracy, width, height, times, bits_per_pixel=bpp)


def test_transmit_ms_units():
    # 1 Mbit over a 1 Mbps link is one second
    assert transmit_ms(1_000_000, 1.0) == 1000.0
    assert transmit_ms(0, 10.0) == 0.0
    with pytest.raises(ValueError):
        transmit_ms(100, 0.0)
    with pytest.raises(ValueError):
        transmit_ms(-1, 1.0)


def test_breakdown_components_sum():
    bd = LatencyBreakdown(10.0, 12.0, 41.0)
    assert bd.total_ms == 10.0 + 12.0 + 41.0


def test_local_latency_ignores_network():
    m = model(exec_edge=136.0)
    bd = total_latency(m, EDGE)
    assert (bd.transmit_ms, bd.rtt_ms, bd.exec_ms) == (0.0, 0.0, 136.0)
    assert bd.total_ms == 136.0
    assert total_latency(m, EDGE, NetworkConditions(0.5, 900.0)).total_ms == 136.0


def test_cloud_latency_adds_transfer_and_rtt():
    m = model(exec_gpu=41.0, width=896, height=896)
    bd = total_latency(m, GPU, NetworkConditions(200.0, 12.0))
    assert bd.transmit_ms == pytest.approx(4_816_896 / 200e3)
    assert bd.rtt_ms == 12.0
    assert bd.exec_ms == 41.0
    assert bd.total_ms == bd.transmit_ms + bd.rtt_ms + bd.exec_ms


def test_cloud_latency_requires_conditions():
    with pytest.raises(ValueError):
        total_latency(model(exec_gpu=41.0), GPU)


def test_missing_exec_entry_is_an_error():
    with pytest.raises(KeyError, match="gpu"):
        total_latency(model(exec_edge=100.0), GPU, NetworkConditions(100.0, 10.0))
    with pytest.raises(KeyError, match="edge"):
        total_latency(model(exec_gpu=10.0), EDGE)


def test_cloud_latency_decreases_with_bandwidth():
    m = model(exec_gpu=41.0)
    previous = math.inf
    for mbps in (10.0, 50.0, 200.0, 1000.0):
        total = total_latency(m, GPU, NetworkConditions(mbps, 12.0)).total_ms
        assert total < previous
        previous = total


def test_min_feasible_bandwidth_round_trip():
    m = model(exec_gpu=41.0, width=896, height=896)
    b_step = min_feasible_bandwidth(m, GPU, 150.0, 12.0)
    assert b_step == pytest.approx(4_816_896 / 97e3)
    total = total_latency(m, GPU, NetworkConditions(b_step, 12.0)).total_ms
    assert total == pytest.approx(150.0, rel=1e-9)
    assert meets_slo(total, 150.0)


def test_min_feasible_bandwidth_infeasible_and_degenerate():
    assert min_feasible_bandwidth(model(exec_gpu=150.0), GPU, 150.0, 0.0) == math.inf
    assert min_feasible_bandwidth(model(exec_gpu=160.0), GPU, 150.0, 12.0) == math.inf
    assert min_bandwidth_for_bits(0, 150.0, 12.0, 41.0) == 0.0
    with pytest.raises(ValueError):
        min_feasible_bandwidth(model(exec_edge=100.0), EDGE, 150.0, 12.0)


def test_monotone_separation_around_the_step():
    rng = random.Random(11)
    for _ in range(200):
        m = model(
            exec_gpu=rng.uniform(1.0, 80.0),
            width=rng.randrange(64, 1600),
            height=rng.randrange(64, 1600),
            bpp=rng.choice([4.0, 6.0, 8.0]),
        )
        slo = rng.uniform(60.0, 400.0)
        rtt = rng.uniform(0.0, slo / 4)
        b_step = min_feasible_bandwidth(m, GPU, slo, rtt)
        if not math.isfinite(b_step):
            continue
        above = total_latency(m, GPU, NetworkConditions(b_step * 1.01, rtt)).total_ms
        below = total_latency(m, GPU, NetworkConditions(b_step * 0.99, rtt)).total_ms
        assert meets_slo(above, slo)
        assert not meets_slo(below, slo)


def test_meets_slo_boundary_tolerance():
    assert meets_slo(150.0, 150.0)
    assert meets_slo(150.0 * (1 + 1e-10), 150.0)
    assert not meets_slo(150.0 * (1 + 1e-8), 150.0)


def test_speedup_against_reference_ratios(detection_config_path):
    config = load_config(detection_config_path)
    orin = config.hardware_by_id("orin")
    h100 = config.hardware_by_id("h100")
    net = NetworkConditions(200.0, 12.0)
    ratios = {m.id: speedup(m, orin, h100, net) for m in config.models}
    assert ratios["ED0"] == pytest.approx(2.4, abs=0.1)
    assert ratios["ED5"] == pytest.approx(9.1, abs=0.1)
    assert ratios["ED7"] == pytest.approx(10.6, abs=0.1)


def test_speedup_is_one_for_identical_placement():
    m = ModelProfile("m", 10.0, 1, 1, {"edge": 20.0, "gpu": 20.0}, bits_per_pixel=0.0001)
    # payload rounds up to a single bit; at huge bandwidth and zero RTT the
    # ratio collapses to the exec-time ratio
    ratio = speedup(m, EDGE, GPU, NetworkConditions(1e9, 0.0))
    assert ratio == pytest.approx(1.0, rel=1e-9)
