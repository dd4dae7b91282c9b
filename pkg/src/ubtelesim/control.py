"""Per-joint bilateral control law and the sensorless reaction torque observer.

The two arms run identical laws: a position/velocity channel that drives the
joint toward its peer, and a force channel fed by the averaged sum of both
torque estimates so the pair settles onto an action-reaction balance
(leader and follower angles equal, estimated torques cancelling).

The observer recovers external torque from the motor command and measured
velocity through a nominal inertia+viscous model and a first-order low-pass
filter. No numerical differentiation of velocity: the filter is realized in
velocity-feedthrough form. Sign convention: positive estimate means the
environment resists motion in the positive joint direction, so a grasped
object yields a positive gripper estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError
from .joints import JointVector, joint_vector
from .plant import PlantState


@dataclass(frozen=True)
class ControllerGains:
    kp: float = 4.0
    kd: float = 0.1
    kf: float = 1.0

    def __post_init__(self):
        errors = []
        if self.kp <= 0:
            errors.append("gains.kp: must be positive")
        if self.kd < 0:
            errors.append("gains.kd: must be non-negative")
        if self.kf < 0:
            errors.append("gains.kf: must be non-negative")
        if errors:
            raise ConfigError(errors)


@dataclass(frozen=True)
class RtobParams:
    cutoff: float = 100.0
    nominal_inertia: JointVector = (0.01, 0.01, 0.01, 0.01)
    nominal_damping: JointVector = (0.05, 0.05, 0.05, 0.05)

    def __post_init__(self):
        object.__setattr__(self, "nominal_inertia", joint_vector(self.nominal_inertia))
        object.__setattr__(self, "nominal_damping", joint_vector(self.nominal_damping))
        errors = []
        if self.cutoff <= 0:
            errors.append("rtob.cutoff: must be positive")
        if any(j <= 0 for j in self.nominal_inertia):
            errors.append("rtob.nominal_inertia: must be positive")
        if any(b < 0 for b in self.nominal_damping):
            errors.append("rtob.nominal_damping: must be non-negative")
        if errors:
            raise ConfigError(errors)


@dataclass(frozen=True)
class TorqueEstimate:
    """Observer output plus its internal filter memory."""

    tau_hat: JointVector = (0.0, 0.0, 0.0, 0.0)
    filter_state: JointVector = (0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def zero() -> "TorqueEstimate":
        return TorqueEstimate()


def rtob_update(
    motor_torque: JointVector,
    velocity: JointVector,
    params: RtobParams,
    state: TorqueEstimate,
    dt: float,
) -> TorqueEstimate:
    """Advance the observer one tick and return the new estimate.

    The underlying filter is the exact zero-order-hold discretization of a
    first-order low-pass at the configured cutoff, applied to
    tau_motor - Jn*dv/dt - bn*v. The inertial term enters through a
    velocity feedthrough gain rather than an explicit difference, so the
    recursion only ever touches the current velocity sample. A constant
    resistive torque on a model-matched joint therefore produces the exact
    sampled first-order step response.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    g = params.cutoff
    gamma = 1.0 - math.exp(-g * dt)
    # Discrete feedthrough gain; tends to the continuous g*Jn as dt -> 0.
    scale = gamma / ((1.0 - gamma) * dt)

    tau_hat = []
    filter_state = []
    for i in range(4):
        feed = scale * params.nominal_inertia[i]
        v = velocity[i]
        u = motor_torque[i] - params.nominal_damping[i] * v + feed * v
        z = state.filter_state[i] + gamma * (u - state.filter_state[i])
        filter_state.append(z)
        tau_hat.append(z - feed * v)
    return TorqueEstimate(tuple(tau_hat), tuple(filter_state))


def bilateral_torque(
    self_state: PlantState,
    peer_angle: JointVector,
    peer_velocity: JointVector,
    tau_self: JointVector,
    tau_peer: JointVector,
    gains: ControllerGains,
) -> JointVector:
    """Motor command for one arm of the symmetric 4-channel law.

    u = kp*(theta_peer - theta_self) + kd*(v_peer - v_self)
        - kf*(tau_self + tau_peer)/2

    Applied on both arms with the same gains, the position channel pulls the
    angles together while the shared force term backs both off until the
    torque estimates cancel. Saturation happens downstream in the plant.
    """
    kp, kd, kf = gains.kp, gains.kd, gains.kf
    self_angle = self_state.angle
    self_velocity = self_state.velocity
    return (
        kp * (peer_angle[0] - self_angle[0])
        + kd * (peer_velocity[0] - self_velocity[0])
        - kf * 0.5 * (tau_self[0] + tau_peer[0]),
        kp * (peer_angle[1] - self_angle[1])
        + kd * (peer_velocity[1] - self_velocity[1])
        - kf * 0.5 * (tau_self[1] + tau_peer[1]),
        kp * (peer_angle[2] - self_angle[2])
        + kd * (peer_velocity[2] - self_velocity[2])
        - kf * 0.5 * (tau_self[2] + tau_peer[2]),
        kp * (peer_angle[3] - self_angle[3])
        + kd * (peer_velocity[3] - self_velocity[3])
        - kf * 0.5 * (tau_self[3] + tau_peer[3]),
    )
