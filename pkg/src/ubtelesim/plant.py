"""Discrete-time dynamics of one 4-joint arm plus the grasp contact model.

Each joint is an independent rotor: inertia, viscous damping, and (for the
submerged follower) a lumped quadratic drag term. Integration is
semi-implicit Euler at the control rate, one physics step per tick. The
gripper joint can press against a spring-damper object.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError, SimulationFault
from .joints import GRIPPER, JointVector, all_finite, joint_vector


class ObjectLabel(enum.Enum):
    BLOCK = "block"
    SPONGE = "sponge"
    NONE = "none"


@dataclass(frozen=True)
class ArmParams:
    """Per-joint plant constants."""

    inertia: JointVector
    viscous_damping: JointVector
    drag_quadratic: JointVector
    torque_limit: JointVector

    def __post_init__(self):
        object.__setattr__(self, "inertia", joint_vector(self.inertia))
        object.__setattr__(self, "viscous_damping", joint_vector(self.viscous_damping))
        object.__setattr__(self, "drag_quadratic", joint_vector(self.drag_quadratic))
        object.__setattr__(self, "torque_limit", joint_vector(self.torque_limit))
        errors = []
        if any(j <= 0 for j in self.inertia):
            errors.append("arm.inertia: all joints must be positive")
        if any(b < 0 for b in self.viscous_damping):
            errors.append("arm.viscous_damping: must be non-negative")
        if any(c < 0 for c in self.drag_quadratic):
            errors.append("arm.drag_quadratic: must be non-negative")
        if any(t <= 0 for t in self.torque_limit):
            errors.append("arm.torque_limit: must be positive")
        if errors:
            raise ConfigError(errors)


@dataclass(frozen=True)
class ObjectModel:
    """Spring-damper object the follower gripper can grasp."""

    stiffness: float
    contact_damping: float
    contact_angle: float
    label: ObjectLabel

    def __post_init__(self):
        errors = []
        if self.stiffness < 0:
            errors.append("object.stiffness: must be non-negative")
        if self.contact_damping < 0:
            errors.append("object.contact_damping: must be non-negative")
        if self.label is not ObjectLabel.NONE and self.stiffness <= 0:
            errors.append("object.stiffness: must be positive for a graspable object")
        if errors:
            raise ConfigError(errors)


def block_object(contact_angle: float = 0.6) -> ObjectModel:
    """Rigid block: stiff, hard to indent."""
    return ObjectModel(6.0, 0.05, contact_angle, ObjectLabel.BLOCK)


def sponge_object(contact_angle: float = 0.6) -> ObjectModel:
    """Compliant sponge: soft spring, same geometry."""
    return ObjectModel(1.5, 0.05, contact_angle, ObjectLabel.SPONGE)


def no_object() -> ObjectModel:
    return ObjectModel(0.0, 0.0, 0.0, ObjectLabel.NONE)


@dataclass(frozen=True)
class PlantState:
    angle: JointVector
    velocity: JointVector
    in_contact: bool = False

    @staticmethod
    def at_rest() -> "PlantState":
        return PlantState((0.0, 0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0), False)


def contact_torque(gripper_angle: float, gripper_velocity: float, obj: ObjectModel) -> float:
    """Reaction torque the object exerts on the gripper joint.

    Zero until the fingers reach contact_angle; beyond that, a spring-damper
    pushback. Clamped non-positive so low-penetration damping can never
    pull the gripper further closed.
    """
    if obj.label is ObjectLabel.NONE:
        return 0.0
    penetration = gripper_angle - obj.contact_angle
    if penetration <= 0.0:
        return 0.0
    tau = -obj.stiffness * penetration - obj.contact_damping * gripper_velocity
    return tau if tau < 0.0 else 0.0


def saturate(torque: JointVector, params: ArmParams) -> JointVector:
    """Clip a motor command to the per-joint torque limits."""
    lim = params.torque_limit
    return (
        -lim[0] if torque[0] < -lim[0] else (lim[0] if torque[0] > lim[0] else torque[0]),
        -lim[1] if torque[1] < -lim[1] else (lim[1] if torque[1] > lim[1] else torque[1]),
        -lim[2] if torque[2] < -lim[2] else (lim[2] if torque[2] > lim[2] else torque[2]),
        -lim[3] if torque[3] < -lim[3] else (lim[3] if torque[3] > lim[3] else torque[3]),
    )


def step(
    state: PlantState,
    motor_torque: JointVector,
    external_torque: JointVector,
    params: ArmParams,
    dt: float,
    obj: Optional[ObjectModel] = None,
) -> PlantState:
    """Advance one semi-implicit Euler step.

    v' = v + dt * (sat(tau_motor) + tau_ext - b*v - c_d*v*|v|) / J
    theta' = theta + dt * v'

    The motor command is saturated at the torque limit; the external torque
    (operator hand or object contact) is physical and unclipped. Non-finite
    inputs raise SimulationFault and abort the trial.
    """
    if dt <= 0.0 or not math.isfinite(dt):
        raise SimulationFault(f"invalid timestep {dt!r}")
    if not (all_finite(state.angle) and all_finite(state.velocity)
            and all_finite(motor_torque) and all_finite(external_torque)):
        raise SimulationFault("non-finite plant input")

    motor = saturate(motor_torque, params)
    inertia = params.inertia
    damping = params.viscous_damping
    drag = params.drag_quadratic

    angle = []
    velocity = []
    for i in range(4):
        v = state.velocity[i]
        accel = (motor[i] + external_torque[i] - damping[i] * v - drag[i] * v * abs(v)) / inertia[i]
        v_next = v + dt * accel
        velocity.append(v_next)
        angle.append(state.angle[i] + dt * v_next)

    in_contact = (
        obj is not None
        and obj.label is not ObjectLabel.NONE
        and angle[GRIPPER] > obj.contact_angle
    )
    return PlantState(tuple(angle), tuple(velocity), in_contact)
