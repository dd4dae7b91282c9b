import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ubtelesim.errors import ConfigError
from ubtelesim.rti import (ColorRgb, RtiConfig, Zone, color_components,
                           color_of, fill_ratio, render_sample, zone_of)

CFG = RtiConfig()  # shipped defaults


# ---------------------------------------------------------------- defaults

def test_shipped_defaults_match_calibration():
    assert CFG.t_min == 0.0
    assert CFG.t_max == 0.6
    assert CFG.t_low == 0.2
    assert CFG.t_high == 0.4
    assert CFG.t_opt == 0.3
    assert CFG.m_tra == 0.05
    assert CFG.c_low == ColorRgb(0, 0, 255)
    assert CFG.c_opt == ColorRgb(0, 255, 0)
    assert CFG.c_high == ColorRgb(255, 0, 0)


@pytest.mark.parametrize("kwargs", [
    {"t_max": -0.1},                    # t_max <= t_min
    {"t_max": 0.0},
    {"m_tra": 0.0},
    {"m_tra": -0.05},
    {"t_low": 0.04},                    # t_min not below t_low - m_tra
    {"t_low": 0.36},                    # blend regions overlap
    {"t_high": 0.58},                   # t_high + m_tra beyond t_max
    {"t_opt": 0.7},
    {"c_low": (0, 0, 256)},
    {"c_opt": (0, -1, 0)},
])
def test_invalid_config_rejected(kwargs):
    with pytest.raises(ConfigError):
        RtiConfig(**{**{}, **kwargs})


# ---------------------------------------------------------------- fill

@pytest.mark.parametrize("tau,expected", [
    (0.00, 0.0),
    (0.60, 100.0),
    (0.30, 50.0),
    (-0.10, 0.0),
    (0.75, 100.0),
])
def test_fill_ratio_examples(tau, expected):
    assert fill_ratio(tau, CFG) == expected


def test_fill_ratio_rejects_non_finite():
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(ValueError):
            fill_ratio(bad, CFG)


@given(st.floats(-1.0, 1.0), st.floats(0.0, 0.5))
def test_fill_ratio_monotone_and_clamped(tau, delta):
    lo = fill_ratio(tau, CFG)
    hi = fill_ratio(tau + delta, CFG)
    assert 0.0 <= lo <= 100.0
    assert hi >= lo


# ---------------------------------------------------------------- zone

@pytest.mark.parametrize("tau,zone", [
    (0.10, Zone.LOW),
    (0.30, Zone.OPTIMAL),
    (0.20, Zone.OPTIMAL),   # closed lower boundary
    (0.40, Zone.OPTIMAL),   # closed upper boundary
    (0.50, Zone.HIGH),
    (0.19999, Zone.LOW),
    (0.40001, Zone.HIGH),
])
def test_zone_examples(tau, zone):
    assert zone_of(tau, CFG) is zone


# ---------------------------------------------------------------- color

@pytest.mark.parametrize("tau,rgb", [
    (0.30, (0, 255, 0)),     # plateau
    (0.10, (0, 0, 255)),     # pure low branch
    (0.20, (0, 128, 128)),   # alpha1 = 0.5, rounded half-up from (0,127.5,127.5)
    (0.42, (179, 77, 0)),    # alpha2 = 0.7, rounded half-up from (178.5,76.5,0)
    (0.15, (0, 0, 255)),     # boundary of first blend
    (0.25, (0, 255, 0)),     # boundary of plateau
    (0.35, (0, 255, 0)),
    (0.40, (128, 128, 0)),   # alpha2 = 0.5
    (0.45, (255, 0, 0)),
    (0.55, (255, 0, 0)),
    (-0.20, (0, 0, 255)),
])
def test_color_examples(tau, rgb):
    assert color_of(tau, CFG) == ColorRgb(*rgb)


def test_color_midpoint_at_band_edges_pre_rounding():
    # At t_low the blend coefficient is exactly 1/2.
    r, g, b = color_components(CFG.t_low, CFG)
    assert (r, g, b) == (0.0, 127.5, 127.5)
    r, g, b = color_components(CFG.t_high, CFG)
    assert (r, g, b) == (127.5, 127.5, 0.0)


def test_pure_branches_exact():
    for tau in np.linspace(-0.1, CFG.t_low - CFG.m_tra, 50):
        assert color_of(float(tau), CFG) == CFG.c_low
    for tau in np.linspace(CFG.t_low + CFG.m_tra + 1e-12, CFG.t_high - CFG.m_tra, 50):
        assert color_of(float(tau), CFG) == CFG.c_opt
    for tau in np.linspace(CFG.t_high + CFG.m_tra, 0.7, 50):
        assert color_of(float(tau), CFG) == CFG.c_high


@given(st.floats(-0.2, 0.8), st.floats(1e-9, 0.01))
@settings(max_examples=300)
def test_color_continuity(tau, eps):
    a = color_of(tau, CFG)
    b = color_of(tau + eps, CFG)
    bound = 255.0 * eps / (2.0 * CFG.m_tra) + 1.0
    for ca, cb in zip(a, b):
        assert abs(ca - cb) <= bound


def test_render_sample_bundles_all_three():
    out = render_sample(0.30, CFG)
    assert out.fill_percent == 50.0
    assert out.color == ColorRgb(0, 255, 0)
    assert out.zone is Zone.OPTIMAL

    out = render_sample(0.0, CFG)
    assert (out.fill_percent, out.color, out.zone) == (0.0, ColorRgb(0, 0, 255), Zone.LOW)

    out = render_sample(0.60, CFG)
    assert (out.fill_percent, out.color, out.zone) == (100.0, ColorRgb(255, 0, 0), Zone.HIGH)


# ------------------------------------------------- independent oracle

def oracle_fill(tau: np.ndarray, cfg: RtiConfig) -> np.ndarray:
    # Straight transcription: clamp, normalize, scale by 100.
    clamped = np.minimum(np.maximum(tau, cfg.t_min), cfg.t_max)
    return (clamped - cfg.t_min) / (cfg.t_max - cfg.t_min) * 100.0


def oracle_color(tau: np.ndarray, cfg: RtiConfig) -> np.ndarray:
    # Straight transcription of the five-branch piecewise blend.
    m = cfg.m_tra
    m_tot = 2.0 * m
    c_low = np.array(cfg.c_low, dtype=float)
    c_opt = np.array(cfg.c_opt, dtype=float)
    c_high = np.array(cfg.c_high, dtype=float)
    a1 = (tau - (cfg.t_low - m)) / m_tot
    a2 = (tau - (cfg.t_high - m)) / m_tot
    out = np.empty((tau.size, 3))
    conds = [
        tau <= cfg.t_low - m,
        (cfg.t_low - m < tau) & (tau < cfg.t_low + m),
        (cfg.t_low + m <= tau) & (tau <= cfg.t_high - m),
        (cfg.t_high - m < tau) & (tau < cfg.t_high + m),
        cfg.t_high + m <= tau,
    ]
    values = [
        np.broadcast_to(c_low, (tau.size, 3)),
        (1.0 - a1)[:, None] * c_low + a1[:, None] * c_opt,
        np.broadcast_to(c_opt, (tau.size, 3)),
        (1.0 - a2)[:, None] * c_opt + a2[:, None] * c_high,
        np.broadcast_to(c_high, (tau.size, 3)),
    ]
    for cond, value in zip(conds, values):
        out[cond] = value[cond]
    return out


def test_oracle_equivalence_dense_grid():
    taus = np.linspace(-0.1, 0.7, 100_001)
    expected_fill = oracle_fill(taus, CFG)
    expected_color = oracle_color(taus, CFG)
    got_fill = np.array([fill_ratio(float(t), CFG) for t in taus])
    got_color = np.array([color_components(float(t), CFG) for t in taus])
    assert np.max(np.abs(got_fill - expected_fill)) < 1e-12
    assert np.max(np.abs(got_color - expected_color)) < 1e-12


def test_zone_proportions_sum_to_one():
    rng = np.random.default_rng(42)
    taus = rng.uniform(-0.3, 0.9, size=5000)
    zones = [zone_of(float(t), CFG) for t in taus]
    counts = {z: zones.count(z) for z in Zone}
    assert sum(counts.values()) == len(taus)
