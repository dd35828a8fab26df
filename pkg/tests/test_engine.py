"""Metric chain and swing detector tests.

The expected metric values are frozen from the independent oracle below,
which re-derives the physics directly (deg/s -> rad/s, v = r*omega, unit
conversion, kinetic energies) without touching the engine code.
"""
import math
import random

import pytest

from swingmeter.engine import (
    DetectorConfig,
    NormalizerState,
    SwingDetector,
    angular_speed_dps,
    detect_swings,
    normalize_power,
    raw_power_joules,
    swing_speed_mph,
)
from swingmeter.model import ImuSample, PhysicalConfig
from swingmeter.traceio import PulseSpec, generate_trace


# -- independent oracle -------------------------------------------------------

RADIUS_M = 0.68
MASS_KG = 0.2
INERTIA_KGM2 = 0.045
CAL_FACTOR = 1.15
MPS_TO_MPH = 2.23694


def oracle_speed_mph(omega_dps: float, cal: float = CAL_FACTOR) -> float:
    omega_rad = omega_dps * math.pi / 180.0
    v_mps = RADIUS_M * omega_rad
    return v_mps * MPS_TO_MPH * cal


def oracle_power_joules(omega_dps: float, cal: float = CAL_FACTOR) -> float:
    omega_rad = omega_dps * math.pi / 180.0
    v_mps = RADIUS_M * omega_rad * cal
    return 0.5 * MASS_KG * v_mps ** 2 + 0.5 * INERTIA_KGM2 * omega_rad ** 2


# -- angular speed ---------------------------------------------------------------

def test_angular_speed_zero_vector():
    assert angular_speed_dps(ImuSample(0, 0.0, 0.0, 0.0)) == 0.0


def test_angular_speed_345_triple():
    assert angular_speed_dps(ImuSample(0, 3.0, 4.0, 0.0)) == 5.0


def test_angular_speed_single_axis():
    assert angular_speed_dps(ImuSample(0, 100.0, 0.0, 0.0)) == 100.0
    assert angular_speed_dps(ImuSample(0, 0.0, -100.0, 0.0)) == 100.0


# -- speed -------------------------------------------------------------------------

def test_speed_zero():
    assert swing_speed_mph(0.0, PhysicalConfig()) == 0.0


def test_speed_100_dps():
    # frozen from oracle_speed_mph(100) = 3.05308...
    assert swing_speed_mph(100.0, PhysicalConfig()) == pytest.approx(3.0531, abs=1e-3)
    assert swing_speed_mph(100.0, PhysicalConfig()) == pytest.approx(oracle_speed_mph(100.0), rel=1e-12)


def test_speed_1000_dps_linearity():
    assert swing_speed_mph(1000.0, PhysicalConfig()) == pytest.approx(30.531, abs=1e-2)


def test_speed_is_linear():
    cfg = PhysicalConfig()
    base = swing_speed_mph(137.0, cfg)
    for k in (2.0, 5.0, 17.5):
        assert swing_speed_mph(137.0 * k, cfg) == pytest.approx(base * k, rel=1e-12)


# -- power --------------------------------------------------------------------------

def test_power_zero():
    assert raw_power_joules(0.0, PhysicalConfig()) == 0.0


def test_power_at_10_rad_per_s_uncalibrated():
    # omega = 10 rad/s, calibration factor 1: 0.1 * 6.8^2 + 0.0225 * 100 = 6.874 J
    omega_dps = 10.0 * 180.0 / math.pi
    value = raw_power_joules(omega_dps, PhysicalConfig(speed_calibration_factor=1.0))
    assert value == pytest.approx(6.874, abs=1e-3)
    assert value == pytest.approx(oracle_power_joules(omega_dps, cal=1.0), rel=1e-12)
    # disabling the power-path calibration switch is equivalent
    assert raw_power_joules(omega_dps, PhysicalConfig(calibrated_power=False)) == pytest.approx(
        value, rel=1e-12
    )


def test_power_is_quadratic():
    cfg = PhysicalConfig()
    for omega in (50.0, 333.0, 871.0):
        ratio = raw_power_joules(2 * omega, cfg) / raw_power_joules(omega, cfg)
        assert abs(ratio - 4.0) < 4.0 * 1e-12


# -- normalisation -------------------------------------------------------------------

def test_first_swing_reads_100():
    pct, state = normalize_power(5.0, NormalizerState())
    assert pct == 100.0
    assert state == NormalizerState(0.0, 5.0, 1)


def test_max_updates_when_exceeded():
    _, state = normalize_power(5.0, NormalizerState())
    pct, state = normalize_power(8.0, state)
    assert pct == 100.0
    assert state.max_power_observed == 8.0


def test_midrange_value():
    pct, _ = normalize_power(4.0, NormalizerState(0.0, 8.0, 2))
    assert pct == 50.0


def test_degenerate_range_reads_100():
    _, state = normalize_power(0.0, NormalizerState())
    pct, state = normalize_power(0.0, state)
    assert pct == 100.0
    assert state.swing_count == 2


def test_normalizer_state_invariants():
    with pytest.raises(ValueError):
        NormalizerState(1.0, None, 1)
    with pytest.raises(ValueError):
        NormalizerState(None, None, 3)
    with pytest.raises(ValueError):
        NormalizerState(5.0, 1.0, 2)


def reference_normalize(raws):
    """Straight re-implementation of the min-max rule, kept test-local."""
    outputs = []
    low = high = None
    for i, raw in enumerate(raws):
        if i == 0:
            low, high = 0.0, raw
            outputs.append(100.0)
            continue
        low = min(low, raw)
        high = max(high, raw)
        if high == low:
            outputs.append(100.0)
        else:
            outputs.append(max(0.0, min(100.0, (raw - low) / (high - low) * 100.0)))
    return outputs


def test_normalize_randomized_against_reference():
    rng = random.Random(7)
    for _ in range(500):
        raws = [rng.uniform(0, 50) for _ in range(rng.randint(1, 30))]
        state = NormalizerState()
        outputs = []
        max_seen = []
        for raw in raws:
            pct, state = normalize_power(raw, state)
            outputs.append(pct)
            max_seen.append(state.max_power_observed)
        assert outputs[0] == 100.0
        assert all(0.0 <= pct <= 100.0 for pct in outputs)
        assert outputs == pytest.approx(reference_normalize(raws), abs=1e-9)
        assert max_seen == sorted(max_seen)  # max is non-decreasing
        assert state.min_power_observed <= state.max_power_observed
        assert state.swing_count == len(raws)


# -- detection ---------------------------------------------------------------------

def pulse_train(peaks, duration_ms=300, rest_ms=1000):
    pulses = []
    t = rest_ms
    for peak in peaks:
        pulses.append(PulseSpec(peak, duration_ms, t))
        t += duration_ms + rest_ms
    return pulses


def test_all_zero_stream_no_events():
    samples = [ImuSample(t * 10, 0.0, 0.0, 0.0) for t in range(500)]
    assert detect_swings(samples) == []


def test_three_pulse_trace_three_events():
    pulses = pulse_train([400.0, 400.0, 400.0])
    trace = generate_trace(pulses, sample_rate_hz=100, noise_dps=0.0)
    events = detect_swings(trace.samples)
    assert len(events) == 3
    step_ms = 10
    for event, pulse in zip(events, pulses):
        quantization = pulse.peak_dps * (1 - math.cos(math.pi * step_ms / pulse.duration_ms))
        assert abs(event.peak_omega_dps - pulse.peak_dps) <= quantization


def test_two_pulse_powers_100_then_25():
    trace = generate_trace(pulse_train([400.0, 200.0]), noise_dps=0.0)
    events = detect_swings(trace.samples)
    assert len(events) == 2
    assert events[0].peak_power_pct == 100.0
    # energy scales with omega^2: (200/400)^2 of the range anchored at 0
    assert events[1].peak_power_pct == pytest.approx(25.0, abs=0.5)


def test_short_twitch_discarded():
    # 60 ms pulse stays above the start threshold for well under min_duration
    trace = generate_trace([PulseSpec(400.0, 60, 1000)], noise_dps=0.0)
    assert detect_swings(trace.samples) == []


def test_casual_waggle_ignored_real_stroke_detected():
    trace = generate_trace(pulse_train([100.0, 350.0]), noise_dps=0.0)
    events = detect_swings(trace.samples)
    assert len(events) == 1
    assert events[0].peak_omega_dps == pytest.approx(350.0, abs=10.0)


def test_windows_ordered_and_disjoint():
    trace = generate_trace(pulse_train([300.0, 500.0, 250.0, 640.0]), noise_dps=0.0)
    events = detect_swings(trace.samples)
    assert len(events) == 4
    for first, second in zip(events, events[1:]):
        assert first.end_ms <= second.start_ms
        assert first.start_ms < second.start_ms


def test_randomized_pulse_trains_recovered():
    rng = random.Random(99)
    for _ in range(50):
        count = rng.randint(1, 6)
        peaks = [rng.uniform(200.0, 800.0) for _ in range(count)]
        duration = rng.choice([250, 300, 400])
        rest = rng.randint(1000, 2000)
        pulses = pulse_train(peaks, duration_ms=duration, rest_ms=rest)
        trace = generate_trace(pulses, noise_dps=0.0, seed=rng.randint(0, 10**6))
        events = detect_swings(trace.samples)
        assert len(events) == count
        step_ms = 10
        for event, pulse in zip(events, pulses):
            quantization = pulse.peak_dps * (1 - math.cos(math.pi * step_ms / pulse.duration_ms))
            assert abs(event.peak_omega_dps - pulse.peak_dps) <= quantization + 1e-9


def test_stream_end_flushes_open_window():
    # pulse runs to the end of the trace with no quiet tail
    pulse = PulseSpec(400.0, 300, 200)
    trace = generate_trace([pulse], duration_ms=350, noise_dps=0.0)
    machine = SwingDetector()
    for sample in trace.samples:
        assert machine.push(sample) == []
    events = machine.finish()
    assert len(events) == 1
    assert events[0].peak_omega_dps == pytest.approx(400.0, abs=6.0)


def test_incremental_matches_batch():
    trace = generate_trace(pulse_train([420.0, 260.0, 710.0]), noise_dps=0.0)
    machine = SwingDetector()
    incremental = []
    for sample in trace.samples:
        incremental.extend(machine.push(sample))
    incremental.extend(machine.finish())
    assert incremental == detect_swings(trace.samples)


def test_detector_config_validation():
    with pytest.raises(ValueError):
        DetectorConfig(start_threshold_dps=50.0, end_threshold_dps=60.0)
    with pytest.raises(ValueError):
        DetectorConfig(min_duration_ms=0)


def test_event_metrics_consistent_with_peak():
    cfg = PhysicalConfig()
    trace = generate_trace(pulse_train([500.0]), noise_dps=0.0)
    (event,) = detect_swings(trace.samples, physical=cfg)
    assert event.peak_speed_mph == pytest.approx(swing_speed_mph(event.peak_omega_dps, cfg), rel=1e-12)
