"""Reaction torque indicator: maps a torque sample to bar fill, zone, and color.

The indicator uses a dual encoding. Bar length reports magnitude: the torque
is clamped to [t_min, t_max] and normalized to a 0-100% fill. Hue reports
quality: pure colors inside the low/optimal/high regions, with linear
blends over a +-m_tra margin around each band boundary so the displayed
color never jumps.

All functions here are pure and safe to call from any thread.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

from .errors import ConfigError


class Zone(enum.Enum):
    """Classification of a torque sample against the optimal band."""

    LOW = "low"
    OPTIMAL = "optimal"
    HIGH = "high"


class ColorRgb(NamedTuple):
    r: int
    g: int
    b: int


class RtiOutput(NamedTuple):
    """One rendered indicator sample."""

    fill_percent: float
    color: ColorRgb
    zone: Zone


COLOR_LOW = ColorRgb(0, 0, 255)
COLOR_OPTIMAL = ColorRgb(0, 255, 0)
COLOR_HIGH = ColorRgb(255, 0, 0)


@dataclass(frozen=True)
class RtiConfig:
    """Indicator parameter set.

    Defaults are the shipped calibration: full scale 0-0.6 Nm, optimal band
    [0.20, 0.40] Nm centered on 0.30 Nm, 0.05 Nm blend half-margin, and
    blue/green/red band colors.
    """

    t_min: float = 0.0
    t_max: float = 0.6
    t_low: float = 0.2
    t_high: float = 0.4
    t_opt: float = 0.3
    m_tra: float = 0.05
    c_low: ColorRgb = COLOR_LOW
    c_opt: ColorRgb = COLOR_OPTIMAL
    c_high: ColorRgb = COLOR_HIGH

    def __post_init__(self):
        errors = []
        if not all(math.isfinite(v) for v in
                   (self.t_min, self.t_max, self.t_low, self.t_high, self.t_opt, self.m_tra)):
            errors.append("rti: all torque thresholds must be finite")
        if self.t_max <= self.t_min:
            errors.append("rti.t_max: must be greater than rti.t_min")
        if self.m_tra <= 0:
            errors.append("rti.m_tra: must be positive")
        else:
            # The five color branches must not overlap.
            if not self.t_min < self.t_low - self.m_tra:
                errors.append("rti.t_low: t_min must be below t_low - m_tra")
            if not self.t_low + self.m_tra < self.t_high - self.m_tra:
                errors.append("rti.t_high: blend regions around t_low and t_high overlap")
            if not self.t_high + self.m_tra <= self.t_max:
                errors.append("rti.t_max: must be at least t_high + m_tra")
        if not self.t_min <= self.t_opt <= self.t_max:
            errors.append("rti.t_opt: must lie within [t_min, t_max]")
        for name in ("c_low", "c_opt", "c_high"):
            color = getattr(self, name)
            if len(color) != 3 or any(
                not isinstance(c, int) or not 0 <= c <= 255 for c in color
            ):
                errors.append(f"rti.{name}: channels must be integers in [0, 255]")
            elif not isinstance(color, ColorRgb):
                object.__setattr__(self, name, ColorRgb(*color))
        if errors:
            raise ConfigError(errors)


def _check_finite(tau: float) -> None:
    if not math.isfinite(tau):
        raise ValueError(f"torque must be finite, got {tau!r}")


def fill_ratio(tau: float, cfg: RtiConfig) -> float:
    """Bar filling percentage: clamp to [t_min, t_max], normalize to 0-100."""
    _check_finite(tau)
    if tau <= cfg.t_min:
        return 0.0
    if tau >= cfg.t_max:
        return 100.0
    return 100.0 * (tau - cfg.t_min) / (cfg.t_max - cfg.t_min)


def zone_of(tau: float, cfg: RtiConfig) -> Zone:
    """Band classification. The optimal band is closed: boundary samples count
    as optimal. The blend margin plays no role here; it only affects color."""
    _check_finite(tau)
    if tau < cfg.t_low:
        return Zone.LOW
    if tau > cfg.t_high:
        return Zone.HIGH
    return Zone.OPTIMAL


def color_components(tau: float, cfg: RtiConfig) -> Tuple[float, float, float]:
    """Unquantized RGB channels of the blended indicator color.

    Piecewise in tau: pure c_low up to t_low - m_tra, a linear blend toward
    c_opt across the 2*m_tra margin, pure c_opt on the plateau, a blend
    toward c_high around t_high, then pure c_high.
    """
    _check_finite(tau)
    m = cfg.m_tra
    if tau <= cfg.t_low - m:
        return float(cfg.c_low[0]), float(cfg.c_low[1]), float(cfg.c_low[2])
    if tau < cfg.t_low + m:
        # (tau - t_low + m) / 2m, grouped so the coefficient is exactly 1/2
        # at tau == t_low.
        a = ((tau - cfg.t_low) + m) / (2.0 * m)
        ca, cb = cfg.c_low, cfg.c_opt
        return (
            ca[0] + a * (cb[0] - ca[0]),
            ca[1] + a * (cb[1] - ca[1]),
            ca[2] + a * (cb[2] - ca[2]),
        )
    if tau <= cfg.t_high - m:
        return float(cfg.c_opt[0]), float(cfg.c_opt[1]), float(cfg.c_opt[2])
    if tau < cfg.t_high + m:
        a = ((tau - cfg.t_high) + m) / (2.0 * m)
        ca, cb = cfg.c_opt, cfg.c_high
        return (
            ca[0] + a * (cb[0] - ca[0]),
            ca[1] + a * (cb[1] - ca[1]),
            ca[2] + a * (cb[2] - ca[2]),
        )
    return float(cfg.c_high[0]), float(cfg.c_high[1]), float(cfg.c_high[2])


# Channel values this close to a half-intensity boundary are treated as
# exactly half, so that quantization matches the decimal hand-derivation
# regardless of float evaluation order (errors here are ~1e-13).
_HALF_SNAP = 1e-9


def color_of(tau: float, cfg: RtiConfig) -> ColorRgb:
    """Blended indicator color, quantized half-up to 8-bit channels."""
    r, g, b = color_components(tau, cfg)
    # Channels are non-negative, so int(x + 0.5) rounds half-up.
    return ColorRgb(
        int(r + 0.5 + _HALF_SNAP),
        int(g + 0.5 + _HALF_SNAP),
        int(b + 0.5 + _HALF_SNAP),
    )


def render_sample(tau: float, cfg: RtiConfig) -> RtiOutput:
    """Bundle fill, color, and zone of the same torque sample."""
    return RtiOutput(fill_ratio(tau, cfg), color_of(tau, cfg), zone_of(tau, cfg))
