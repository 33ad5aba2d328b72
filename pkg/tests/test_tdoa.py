import math

import numpy as np
import pytest

from einu.errors import Degenerate, NoSignal
from einu.localize import (
    MicArray,
    ArrivalSet,
    simulate_arrivals,
    pair_bearing,
    azimuth_from_cross,
    multilaterate,
    detect_onsets,
)

ARRAY = MicArray()


def test_arrival_at_mic_position():
    mic0 = ARRAY.positions[0]
    arr = simulate_arrivals(mic0, emission_time=1.5, array=ARRAY)
    assert arr.times[0] == pytest.approx(1.5, abs=1e-15)


def test_arrivals_equal_at_origin():
    arr = simulate_arrivals((0.0, 0.0), 0.0, ARRAY)
    assert len(set(arr.times)) == 1


def test_far_field_delay_approaches_limit():
    arr = simulate_arrivals((100 * ARRAY.spacing, 0.0), 0.0, ARRAY)
    assert arr.dt_x == pytest.approx(ARRAY.max_delay, rel=1e-4)


def test_pair_bearing_basic():
    d, v = ARRAY.spacing, ARRAY.speed_of_sound
    assert pair_bearing(0.0, d, v) == pytest.approx(math.pi / 2)
    assert pair_bearing(d / v, d, v) == pytest.approx(0.0, abs=1e-7)
    # overshoot clamps instead of raising (1e-9 relative may round to 1 ulp
    # under 1.0; a clear overshoot must clamp to exactly 0)
    assert pair_bearing((d / v) * (1 + 1e-9), d, v) < 1e-7
    assert pair_bearing((d / v) * (1 + 1e-6), d, v) == 0.0
    assert pair_bearing(-(d / v) * (1 + 1e-6), d, v) == pytest.approx(math.pi)


def test_pair_bearing_cos_consistency():
    d, v = ARRAY.spacing, ARRAY.speed_of_sound
    rng = np.random.default_rng(0)
    for dt in rng.uniform(-d / v, d / v, size=100):
        assert math.cos(pair_bearing(dt, d, v)) == pytest.approx(dt * v / d, abs=1e-12)


def test_azimuth_axis_cases():
    d, v = ARRAY.spacing, ARRAY.speed_of_sound
    b = azimuth_from_cross(d / v, 0.0, ARRAY)
    assert b.azimuth == pytest.approx(0.0)
    b = azimuth_from_cross(0.0, -d / v, ARRAY)
    assert b.azimuth == pytest.approx(3 * math.pi / 2)


def test_azimuth_degenerate_confidence_zero():
    b = azimuth_from_cross(0.0, 0.0, ARRAY)
    assert b.confidence == 0.0


def test_azimuth_sweep_far_field():
    # 36 sources at range 100d: max azimuth error < 0.5 degrees
    r = 100 * ARRAY.spacing
    worst = 0.0
    for k in range(36):
        az = 2 * math.pi * k / 36
        src = (r * math.cos(az), r * math.sin(az))
        arr = simulate_arrivals(src, 0.0, ARRAY)
        b = azimuth_from_cross(arr.dt_x, arr.dt_y, ARRAY)
        err = abs((b.azimuth - az + math.pi) % (2 * math.pi) - math.pi)
        worst = max(worst, err)
    assert worst < math.radians(0.5)


def test_mirror_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(50):
        ang = rng.uniform(0.05, math.pi - 0.05)
        r = rng.uniform(2, 20) * ARRAY.spacing
        src = np.array([r * math.cos(ang), r * math.sin(ang)])
        a1 = simulate_arrivals(src, 0.0, ARRAY)
        a2 = simulate_arrivals(src * np.array([1.0, -1.0]), 0.0, ARRAY)
        assert a2.dt_x == pytest.approx(a1.dt_x, abs=1e-15)
        assert a2.dt_y == pytest.approx(-a1.dt_y, abs=1e-15)
        b1 = azimuth_from_cross(a1.dt_x, a1.dt_y, ARRAY)
        b2 = azimuth_from_cross(a2.dt_x, a2.dt_y, ARRAY)
        assert (b1.azimuth + b2.azimuth) % (2 * math.pi) == pytest.approx(0.0, abs=1e-9)


def test_multilaterate_recovers_known_source():
    src = np.array([0.35, 0.20])
    arr = simulate_arrivals(src, 0.0, ARRAY)
    res = multilaterate(arr, ARRAY)
    assert res.converged
    assert np.linalg.norm(res.position - src) < 1e-6


def test_multilaterate_degenerate():
    arr = ArrivalSet(times=(1.0, 1.0, 1.0, 1.0))
    with pytest.raises(Degenerate):
        multilaterate(arr, ARRAY)


def test_multilaterate_grid_convergence():
    d = ARRAY.spacing
    for x in np.linspace(2 * d, 10 * d, 5):
        for y in np.linspace(2 * d, 10 * d, 5):
            arr = simulate_arrivals((x, y), 0.0, ARRAY)
            res = multilaterate(arr, ARRAY)
            assert res.converged and res.iterations <= 20
            assert np.linalg.norm(res.position - np.array([x, y])) < 1e-6


def test_round_trip_random_positions():
    rng = np.random.default_rng(11)
    d = ARRAY.spacing
    for _ in range(50):
        az = rng.uniform(0, 2 * math.pi)
        # keep away from the symmetry axis (off-axis per the contract)
        r = rng.uniform(2 * d, 20 * d)
        p = np.array([r * math.cos(az), r * math.sin(az)])
        if abs(p[0]) < 1e-3 and abs(p[1]) < 1e-3:
            continue
        arr = simulate_arrivals(p, 0.0, ARRAY)
        res = multilaterate(arr, ARRAY)
        assert np.linalg.norm(res.position - p) < 1e-6


def test_rotation_consistency():
    # rotating source and array together leaves pair delays unchanged:
    # equivalent to rotating the source into the unrotated robot frame
    rng = np.random.default_rng(7)
    for _ in range(20):
        p = rng.uniform(-1, 1, size=2)
        if np.linalg.norm(p) < 0.3:
            continue
        arr = simulate_arrivals(p, 0.0, ARRAY)
        # distances are rotation invariant, so arrivals of R@p w.r.t. a
        # rotated array equal arrivals of p w.r.t. the original array
        th = rng.uniform(0, 2 * math.pi)
        rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        mics_rot = ARRAY.positions @ rot.T
        dists = np.linalg.norm(mics_rot - (rot @ p)[None, :], axis=1)
        t = dists / ARRAY.speed_of_sound
        assert t[1] - t[0] == pytest.approx(arr.dt_x, abs=1e-12)
        assert t[3] - t[2] == pytest.approx(arr.dt_y, abs=1e-12)


def test_detect_onsets_constructed_streams():
    fs = 48000
    streams = np.zeros((4, 200))
    for mic, idx in enumerate([100, 104, 102, 102]):
        streams[mic, idx] = 1.0
    arr = detect_onsets(streams, threshold=0.5, fs=fs)
    assert arr.dt_x == pytest.approx(4 / fs)
    assert arr.dt_y == pytest.approx(0.0)


def test_detect_onsets_no_signal():
    with pytest.raises(NoSignal):
        detect_onsets(np.zeros((4, 100)), threshold=0.1, fs=48000)
    streams = np.full((4, 100), 0.2)
    with pytest.raises(NoSignal):
        detect_onsets(streams, threshold=0.5, fs=48000)
