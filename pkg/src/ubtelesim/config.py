"""Session configuration: typed schema, YAML loading, strict validation.

The config file is a nested key tree; unknown keys anywhere are errors, and
every value is type-checked into the domain dataclasses, which run their own
range validation. Missing keys fall back to the shipped defaults.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
import yaml

from .control import ControllerGains, RtobParams
from .errors import ConfigError
from .link import ChannelModel
from .plant import ArmParams, ObjectLabel, ObjectModel
from .rti import ColorRgb, RtiConfig


class Scenario(enum.Enum):
    LIFT = "lift"
    PICKPLACE = "pickplace"
    FREEFORM = "freeform"


class OperatorMode(enum.Enum):
    SCRIPTED_BASELINE = "scripted-baseline"
    SCRIPTED_RTI_AWARE = "scripted-rti-aware"
    INTERACTIVE = "interactive"


@dataclass(frozen=True)
class OperatorModelParams:
    """Scripted operator behavior knobs.

    sigma_base is the stationary dispersion of the baseline operator's grip
    setpoint around the band center; perception_interval_s is how often that
    operator re-judges the felt torque. The tremor terms apply to both
    scripted modes. Defaults are tuned so the baseline lands roughly a third
    of its time in the band, in the spirit of the reference runs.
    """

    sigma_base: float = 0.26
    sigma_bias: float = 0.18
    sigma_tremor: float = 0.03
    hand_rate: float = 6.0
    motion_coupling: float = 2.0
    perception_interval_s: float = 0.4
    correction_gain: float = 0.25
    correction_rate: float = 0.6
    centering_gain: float = 1.0
    grip_ramp_s: float = 1.0
    grip_max: float = 0.7
    hand_kp: float = 2.0
    hand_kd: float = 0.05

    def __post_init__(self):
        errors = []
        for name in ("sigma_base", "sigma_bias", "sigma_tremor", "motion_coupling"):
            if getattr(self, name) < 0:
                errors.append(f"operator_model.{name}: must be non-negative")
        for name in ("hand_rate", "perception_interval_s", "correction_gain",
                     "correction_rate", "centering_gain", "grip_ramp_s",
                     "grip_max", "hand_kp"):
            if getattr(self, name) <= 0:
                errors.append(f"operator_model.{name}: must be positive")
        if self.hand_kd < 0:
            errors.append("operator_model.hand_kd: must be non-negative")
        if errors:
            raise ConfigError(errors)


@dataclass(frozen=True)
class ChannelConfig:
    """Channel impairments, resolved into a ChannelModel once the seed is known."""

    base_latency_ms: float = 0.0
    jitter_ms: float = 0.0
    drop_probability: float = 0.0
    seed: Optional[int] = None

    def resolve(self, derived_seed: int) -> ChannelModel:
        return ChannelModel(
            base_latency_ms=self.base_latency_ms,
            jitter_ms=self.jitter_ms,
            drop_probability=self.drop_probability,
            seed=self.seed if self.seed is not None else derived_seed,
        )


@dataclass(frozen=True)
class TelemetryConfig:
    decimation: int = 20
    host: str = "127.0.0.1"
    port: int = 8765
    ws_port: int = 8766

    def __post_init__(self):
        if self.decimation < 1:
            raise ConfigError("telemetry.decimation: must be >= 1")


def default_leader_arm() -> ArmParams:
    return ArmParams(inertia=0.01, viscous_damping=0.05,
                     drag_quadratic=0.0, torque_limit=1.0)


def default_follower_arm() -> ArmParams:
    return ArmParams(inertia=0.01, viscous_damping=0.05,
                     drag_quadratic=0.2, torque_limit=1.0)


def default_object() -> ObjectModel:
    return ObjectModel(stiffness=6.0, contact_damping=0.05,
                       contact_angle=0.6, label=ObjectLabel.BLOCK)


_OBJECT_STIFFNESS = {ObjectLabel.BLOCK: 6.0, ObjectLabel.SPONGE: 1.5, ObjectLabel.NONE: 0.0}


def object_by_label(label: ObjectLabel, contact_angle: float = 0.6) -> ObjectModel:
    return ObjectModel(stiffness=_OBJECT_STIFFNESS[label], contact_damping=0.05,
                       contact_angle=contact_angle, label=label)


@dataclass(frozen=True)
class SessionConfig:
    rti: RtiConfig = field(default_factory=RtiConfig)
    gains: ControllerGains = field(default_factory=ControllerGains)
    rtob: RtobParams = field(default_factory=RtobParams)
    leader_arm: ArmParams = field(default_factory=default_leader_arm)
    follower_arm: ArmParams = field(default_factory=default_follower_arm)
    object: ObjectModel = field(default_factory=default_object)
    channel_to_follower: ChannelConfig = field(default_factory=ChannelConfig)
    channel_to_leader: ChannelConfig = field(default_factory=ChannelConfig)
    operator_model: OperatorModelParams = field(default_factory=OperatorModelParams)
    telemetry: TelemetryConfig = field(default_factory=TelemetryConfig)
    scenario: Scenario = Scenario.LIFT
    operator: OperatorMode = OperatorMode.SCRIPTED_RTI_AWARE
    duration_s: float = 10.0
    seed: int = 0

    def __post_init__(self):
        errors = []
        if self.duration_s <= 0:
            errors.append("duration_s: must be positive")
        if not isinstance(self.seed, int):
            errors.append("seed: must be an integer")
        if errors:
            raise ConfigError(errors)

    def replace(self, **kwargs) -> "SessionConfig":
        from dataclasses import replace as dc_replace
        return dc_replace(self, **kwargs)

    def to_dict(self) -> Dict[str, Any]:
        r = self.rti
        return {
            "scenario": self.scenario.value,
            "operator": self.operator.value,
            "duration_s": self.duration_s,
            "seed": self.seed,
            "rti": {
                "t_min": r.t_min, "t_max": r.t_max, "t_low": r.t_low,
                "t_high": r.t_high, "t_opt": r.t_opt, "m_tra": r.m_tra,
                "c_low": list(r.c_low), "c_opt": list(r.c_opt), "c_high": list(r.c_high),
            },
            "gains": {"kp": self.gains.kp, "kd": self.gains.kd, "kf": self.gains.kf},
            "rtob": {
                "cutoff": self.rtob.cutoff,
                "nominal_inertia": list(self.rtob.nominal_inertia),
                "nominal_damping": list(self.rtob.nominal_damping),
            },
            "leader_arm": _arm_dict(self.leader_arm),
            "follower_arm": _arm_dict(self.follower_arm),
            "object": {
                "label": self.object.label.value,
                "stiffness": self.object.stiffness,
                "contact_damping": self.object.contact_damping,
                "contact_angle": self.object.contact_angle,
            },
            "channel": {
                "to_follower": _channel_dict(self.channel_to_follower),
                "to_leader": _channel_dict(self.channel_to_leader),
            },
            "operator_model": {
                name: getattr(self.operator_model, name)
                for name in ("sigma_base", "sigma_bias", "sigma_tremor", "hand_rate",
                             "motion_coupling", "perception_interval_s", "correction_gain",
                             "correction_rate", "centering_gain", "grip_ramp_s", "grip_max",
                             "hand_kp", "hand_kd")
            },
            "telemetry": {
                "decimation": self.telemetry.decimation,
                "host": self.telemetry.host,
                "port": self.telemetry.port,
                "ws_port": self.telemetry.ws_port,
            },
        }


def _arm_dict(arm: ArmParams) -> Dict[str, Any]:
    return {
        "inertia": list(arm.inertia),
        "viscous_damping": list(arm.viscous_damping),
        "drag_quadratic": list(arm.drag_quadratic),
        "torque_limit": list(arm.torque_limit),
    }


def _channel_dict(ch: ChannelConfig) -> Dict[str, Any]:
    return {
        "base_latency_ms": ch.base_latency_ms,
        "jitter_ms": ch.jitter_ms,
        "drop_probability": ch.drop_probability,
        "seed": ch.seed,
    }


class _Section:
    """Strict reader over one mapping: tracks unknown keys and type errors."""

    def __init__(self, name: str, data: Any, errors: list):
        self.name = name
        self.prefix = f"{name}." if name else ""
        self.errors = errors
        if data is None:
            data = {}
        if not isinstance(data, dict):
            errors.append(f"{name or 'config'}: expected a mapping")
            data = {}
        self.data = dict(data)

    def take(self, key: str, default=None):
        return self.data.pop(key, default)

    def take_number(self, key: str, default):
        value = self.data.pop(key, None)
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.errors.append(f"{self.prefix}{key}: expected a number")
            return default
        return float(value)

    def take_int(self, key: str, default):
        value = self.data.pop(key, None)
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, int):
            self.errors.append(f"{self.prefix}{key}: expected an integer")
            return default
        return value

    def take_joints(self, key: str, default):
        value = self.data.pop(key, None)
        if value is None:
            return default
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        if isinstance(value, list) and len(value) == 4 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            return tuple(float(v) for v in value)
        self.errors.append(f"{self.prefix}{key}: expected a number or a list of 4 numbers")
        return default

    def take_color(self, key: str, default):
        value = self.data.pop(key, None)
        if value is None:
            return default
        if isinstance(value, list) and len(value) == 3 and all(
            isinstance(v, int) and not isinstance(v, bool) for v in value
        ):
            return ColorRgb(*value)
        self.errors.append(f"{self.prefix}{key}: expected a list of 3 integer channels")
        return default

    def take_enum(self, key: str, enum_cls, default):
        value = self.data.pop(key, None)
        if value is None:
            return default
        try:
            return enum_cls(value)
        except ValueError:
            allowed = ", ".join(e.value for e in enum_cls)
            self.errors.append(f"{self.prefix}{key}: must be one of: {allowed}")
            return default

    def finish(self):
        for key in self.data:
            self.errors.append(f"{self.prefix}{key}: unknown key")


def _build(section_cls, errors, name, kwargs):
    try:
        return section_cls(**kwargs)
    except ConfigError as exc:
        errors.extend(exc.errors)
        return section_cls()


def config_from_dict(data: Dict[str, Any]) -> SessionConfig:
    """Construct a validated SessionConfig; unknown keys and bad values are
    collected into a single ConfigError naming every offending field."""
    errors: list = []
    root = _Section("", data, errors)

    sec = _Section("rti", root.take("rti"), errors)
    rti_kwargs = dict(
        t_min=sec.take_number("t_min", 0.0),
        t_max=sec.take_number("t_max", 0.6),
        t_low=sec.take_number("t_low", 0.2),
        t_high=sec.take_number("t_high", 0.4),
        t_opt=sec.take_number("t_opt", 0.3),
        m_tra=sec.take_number("m_tra", 0.05),
        c_low=sec.take_color("c_low", ColorRgb(0, 0, 255)),
        c_opt=sec.take_color("c_opt", ColorRgb(0, 255, 0)),
        c_high=sec.take_color("c_high", ColorRgb(255, 0, 0)),
    )
    sec.finish()
    rti_cfg = _build(RtiConfig, errors, "rti", rti_kwargs)

    sec = _Section("gains", root.take("gains"), errors)
    gains_kwargs = dict(kp=sec.take_number("kp", 4.0), kd=sec.take_number("kd", 0.1),
                        kf=sec.take_number("kf", 1.0))
    sec.finish()
    gains = _build(ControllerGains, errors, "gains", gains_kwargs)

    sec = _Section("rtob", root.take("rtob"), errors)
    rtob_kwargs = dict(
        cutoff=sec.take_number("cutoff", 100.0),
        nominal_inertia=sec.take_joints("nominal_inertia", 0.01),
        nominal_damping=sec.take_joints("nominal_damping", 0.05),
    )
    sec.finish()
    rtob = _build(RtobParams, errors, "rtob", rtob_kwargs)

    arms = {}
    for arm_name, default in (("leader_arm", default_leader_arm()),
                              ("follower_arm", default_follower_arm())):
        sec = _Section(arm_name, root.take(arm_name), errors)
        kwargs = dict(
            inertia=sec.take_joints("inertia", default.inertia),
            viscous_damping=sec.take_joints("viscous_damping", default.viscous_damping),
            drag_quadratic=sec.take_joints("drag_quadratic", default.drag_quadratic),
            torque_limit=sec.take_joints("torque_limit", default.torque_limit),
        )
        sec.finish()
        try:
            arms[arm_name] = ArmParams(**kwargs)
        except ConfigError as exc:
            errors.extend(e.replace("arm.", f"{arm_name}.") for e in exc.errors)
            arms[arm_name] = default

    sec = _Section("object", root.take("object"), errors)
    label = sec.take_enum("label", ObjectLabel, ObjectLabel.BLOCK)
    obj_kwargs = dict(
        stiffness=sec.take_number("stiffness", _OBJECT_STIFFNESS[label]),
        contact_damping=sec.take_number("contact_damping", 0.05),
        contact_angle=sec.take_number("contact_angle", 0.6),
        label=label,
    )
    sec.finish()
    obj = _build(ObjectModel, errors, "object", obj_kwargs)

    channel_root = _Section("channel", root.take("channel"), errors)
    channels = {}
    for direction in ("to_follower", "to_leader"):
        sec = _Section(f"channel.{direction}", channel_root.take(direction), errors)
        kwargs = dict(
            base_latency_ms=sec.take_number("base_latency_ms", 0.0),
            jitter_ms=sec.take_number("jitter_ms", 0.0),
            drop_probability=sec.take_number("drop_probability", 0.0),
            seed=sec.take_int("seed", None),
        )
        sec.finish()
        try:
            ChannelModel(kwargs["base_latency_ms"], kwargs["jitter_ms"],
                         kwargs["drop_probability"], kwargs["seed"] or 0)
            channels[direction] = ChannelConfig(**kwargs)
        except ConfigError as exc:
            errors.extend(e.replace("channel.", f"channel.{direction}.") for e in exc.errors)
            channels[direction] = ChannelConfig()
    channel_root.finish()

    sec = _Section("operator_model", root.take("operator_model"), errors)
    om_defaults = OperatorModelParams()
    om_kwargs = {
        name: sec.take_number(name, getattr(om_defaults, name))
        for name in ("sigma_base", "sigma_bias", "sigma_tremor", "hand_rate",
                     "motion_coupling", "perception_interval_s", "correction_gain",
                     "correction_rate", "centering_gain", "grip_ramp_s", "grip_max",
                     "hand_kp", "hand_kd")
    }
    sec.finish()
    operator_model = _build(OperatorModelParams, errors, "operator_model", om_kwargs)

    sec = _Section("telemetry", root.take("telemetry"), errors)
    telemetry_kwargs = dict(
        decimation=sec.take_int("decimation", 20),
        host=sec.take("host", "127.0.0.1"),
        port=sec.take_int("port", 8765),
        ws_port=sec.take_int("ws_port", 8766),
    )
    sec.finish()
    try:
        telemetry = TelemetryConfig(**telemetry_kwargs)
    except ConfigError as exc:
        errors.extend(exc.errors)
        telemetry = TelemetryConfig()

    scenario = root.take_enum("scenario", Scenario, Scenario.LIFT)
    operator = root.take_enum("operator", OperatorMode, OperatorMode.SCRIPTED_RTI_AWARE)
    duration_s = root.take_number("duration_s", 10.0)
    seed = root.take_int("seed", 0)
    root.finish()

    if duration_s <= 0:
        errors.append("duration_s: must be positive")
        duration_s = 10.0

    if errors:
        raise ConfigError(errors)

    return SessionConfig(
        rti=rti_cfg, gains=gains, rtob=rtob,
        leader_arm=arms["leader_arm"], follower_arm=arms["follower_arm"],
        object=obj,
        channel_to_follower=channels["to_follower"],
        channel_to_leader=channels["to_leader"],
        operator_model=operator_model, telemetry=telemetry,
        scenario=scenario, operator=operator,
        duration_s=duration_s, seed=seed,
    )


def load_config(path: str) -> SessionConfig:
    """Load and validate a YAML config file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError([f"config: invalid YAML: {exc}"]) from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(["config: top level must be a mapping"])
    return config_from_dict(data)


def derive_seed(base_seed: int, *key: int) -> int:
    """Stable 64-bit stream seed for a sub-component (splittable seeding)."""
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def derive_rng(base_seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.PCG64(ss))
