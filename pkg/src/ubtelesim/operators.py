"""Operator models that drive the leader arm.

Scripted operators stand in for a human running the Lift and Pick&Place
tasks. Both variants share the same hand: a PD grip on the motion joints
toward a scripted pose trajectory, a direct torque target on the gripper,
and the same tremor and initial miscalibration. They differ only in how
they correct the grip torque:

* baseline feels the reflected torque, re-judging it noisily a few times
  per second and nudging its setpoint;
* the indicator-aware variant reads the displayed zone every tick and
  applies a bang-band correction toward the optimal band (plus gentle
  centering from the bar length while inside it).

The interactive operator is the console adapter: commands jog the pose
targets and the grip torque target.

All randomness comes from the injected generator, so a (config, seed) pair
fully determines a trial.
"""

from __future__ import annotations

import math
import queue as queue_mod
from typing import Optional, Tuple

import numpy as np

from .config import OperatorModelParams, OperatorMode, Scenario
from .joints import GRIPPER
from .loop import OperatorAction, OperatorView
from .rti import RtiConfig, Zone

MARKER_GRASP_START = "grasp-start"
MARKER_LIFT_START = "lift-start"
MARKER_RELEASE = "release"

# Contact is considered established once the follower gripper estimate
# crosses this many Nm; used for scenario phasing, not by the policies.
GRASP_THRESHOLD = 0.05

# Over-band deviations are corrected this much faster than under-band ones
# (operators back off quickly when the bar turns red).
HIGH_URGENCY = 1.6


def _smoothstep(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return x * x * (3.0 - 2.0 * x)


class _MotionProfile:
    """Scripted pose targets for the leader's motion joints (J1..J3)."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario

    def targets(self, t_since_lift: float, t_until_end: float) -> Tuple[float, float, float]:
        if t_since_lift < 0.0:
            return (0.0, 0.0, 0.0)
        if self.scenario is Scenario.PICKPLACE:
            # Raise the elbow a little, pan the base to the drop point.
            j2 = 0.3 * _smoothstep(t_since_lift / 1.5)
            j1 = 0.8 * _smoothstep((t_since_lift - 1.0) / 2.5)
            if t_until_end < 1.2:
                j2 *= _smoothstep(t_until_end / 1.2)
            return (j1, j2, 0.0)
        # Lift: straight shoulder raise, lower again near the end.
        j2 = 0.5 * _smoothstep(t_since_lift / 2.0)
        if t_until_end < 1.2:
            j2 *= _smoothstep(t_until_end / 1.2)
        return (0.0, j2, 0.0)


class ScriptedOperator:
    """Deterministic task operator; see the module docstring for the model."""

    def __init__(
        self,
        scenario: Scenario,
        mode: OperatorMode,
        params: OperatorModelParams,
        rti_config: RtiConfig,
        duration_s: float,
        rng: np.random.Generator,
    ):
        if mode is OperatorMode.INTERACTIVE:
            raise ValueError("use InteractiveOperator for interactive sessions")
        self.scenario = scenario
        self.mode = mode
        self.params = params
        self.rti = rti_config
        self.duration_s = duration_s
        self.rng = rng
        self.motion = _MotionProfile(scenario)

        p = params
        self.setpoint = rti_config.t_opt + (
            p.sigma_bias * float(rng.standard_normal()) if p.sigma_bias > 0 else 0.0
        )
        self.setpoint = min(max(self.setpoint, 0.05), p.grip_max)
        self.grip_target = 0.0
        # Baseline setpoint wander: per-perception noise sized so that the
        # stationary dispersion of the AR(1) setpoint equals sigma_base.
        g = p.correction_gain
        denom = g / math.sqrt(max(1.0 - (1.0 - g) ** 2, 1e-9))
        self._perception_sigma = (p.sigma_base / denom) if p.sigma_base > 0 else 0.0
        self._next_perception_t = 0.0

        self.grasp_t: Optional[float] = None
        self.lift_t: Optional[float] = None
        self.release_t = max(duration_s - 1.5, 1.0)
        self._released = False
        self._lift_marked = False
        self._prev_targets = (0.0, 0.0, 0.0)
        self._motion_speed = 0.0

    def _grip_update(self, view: OperatorView, t: float, dt: float) -> None:
        p = self.params
        if t < 0.3:
            return  # settle
        if self.grasp_t is None:
            # Approach: ramp toward the (possibly miscalibrated) setpoint.
            rate = max(self.setpoint, 0.1) / p.grip_ramp_s
            self.grip_target = min(self.grip_target + rate * dt, self.setpoint)
            return
        if self._released:
            self.grip_target = max(self.grip_target - p.grip_max / 0.4 * dt, 0.0)
            return

        # Hold: the hand tracks the operator's intent quickly, with an OU
        # tremor whose stationary spread is sigma_tremor; moving the arm
        # shakes the hand harder.
        sigma = p.sigma_tremor * (1.0 + p.motion_coupling * self._motion_speed)
        pull = p.hand_rate * (self.setpoint - self.grip_target) * dt
        correction = 0.0

        if self.mode is OperatorMode.SCRIPTED_RTI_AWARE:
            # Bang-band straight on the hand: seeing red, nobody keeps
            # squeezing toward a stale intent, and symmetrically for blue.
            zone = view.indicator.zone
            if zone is Zone.HIGH:
                correction = -HIGH_URGENCY * p.correction_rate * dt
                if pull > 0.0:
                    pull = 0.0
            elif zone is Zone.LOW:
                correction = p.correction_rate * dt
                if pull < 0.0:
                    pull = 0.0
            else:
                # The bar length tells the magnitude; drift toward the center.
                shown = self.rti.t_min + view.indicator.fill_percent / 100.0 * (
                    self.rti.t_max - self.rti.t_min
                )
                correction = p.centering_gain * (self.rti.t_opt - shown) * dt
            self.setpoint += correction
        else:
            # Baseline: re-judge the felt torque a few times a second.
            if t >= self._next_perception_t:
                felt = abs(view.leader_tau_hat[GRIPPER])
                if self._perception_sigma > 0:
                    felt += self._perception_sigma * float(self.rng.standard_normal())
                self.setpoint -= p.correction_gain * (felt - self.rti.t_opt)
                self._next_perception_t = t + p.perception_interval_s

        self.grip_target += pull + correction
        if sigma > 0:
            self.grip_target += (
                sigma * math.sqrt(2.0 * p.hand_rate * dt) * float(self.rng.standard_normal())
            )
        self.setpoint = min(max(self.setpoint, 0.02), p.grip_max)
        self.grip_target = min(max(self.grip_target, 0.0), p.grip_max)

    def __call__(self, view: OperatorView) -> OperatorAction:
        t = view.t_us / 1e6
        dt = view.dt
        markers = []

        if (self.grasp_t is None and view.follower_in_contact
                and view.follower_grip_tau >= GRASP_THRESHOLD):
            self.grasp_t = t
            self.lift_t = t + 1.0
            markers.append(MARKER_GRASP_START)
            if self.mode is OperatorMode.SCRIPTED_BASELINE:
                self._next_perception_t = t + self.params.perception_interval_s
        if (not self._lift_marked and self.lift_t is not None
                and t >= self.lift_t and t < self.release_t):
            self._lift_marked = True
            markers.append(MARKER_LIFT_START)
        if not self._released and t >= self.release_t:
            self._released = True
            markers.append(MARKER_RELEASE)

        since_lift = t - self.lift_t if (self.lift_t is not None and self._lift_marked) else -1.0
        targets = self.motion.targets(since_lift, self.duration_s - t)
        self._motion_speed = (
            abs(targets[0] - self._prev_targets[0])
            + abs(targets[1] - self._prev_targets[1])
            + abs(targets[2] - self._prev_targets[2])
        ) / dt
        self._prev_targets = targets

        self._grip_update(view, t, dt)

        p = self.params
        angle = view.leader_state.angle
        velocity = view.leader_state.velocity
        torque = (
            p.hand_kp * (targets[0] - angle[0]) - p.hand_kd * velocity[0],
            p.hand_kp * (targets[1] - angle[1]) - p.hand_kd * velocity[1],
            p.hand_kp * (targets[2] - angle[2]) - p.hand_kd * velocity[2],
            self.grip_target,
        )
        return OperatorAction(torque, tuple(markers))


class SinusoidOperator:
    """Free-motion torque wave on one joint, for tracking and link studies.

    The standard link-study wave is brisk (3 Hz) so that stale peer frames
    visibly degrade tracking; the bilateral tracking check uses a slow
    0.5 Hz wave instead.
    """

    def __init__(self, amplitude: float = 0.04, frequency_hz: float = 3.0, joint: int = 0):
        self.amplitude = amplitude
        self.frequency_hz = frequency_hz
        self.joint = joint

    def __call__(self, view: OperatorView) -> OperatorAction:
        tau = self.amplitude * math.sin(2.0 * math.pi * self.frequency_hz * view.t_us / 1e6)
        torque = [0.0, 0.0, 0.0, 0.0]
        torque[self.joint] = tau
        return OperatorAction(tuple(torque))


class InteractiveOperator:
    """Console-driven operator: commands jog pose targets and grip torque.

    Commands are dicts drained from a queue each tick:
      {"gripper_target_delta": float}   adjust grip torque target (Nm)
      {"joint_jog": {"joint": 0..2, "delta": float}}   move a pose target (rad)
      {"marker": str}   emit a session marker
    """

    def __init__(self, params: OperatorModelParams, command_queue, grip_limit: Optional[float] = None):
        self.params = params
        self.commands = command_queue
        self.grip_limit = grip_limit if grip_limit is not None else params.grip_max
        self.grip_target = 0.0
        self.pose_targets = [0.0, 0.0, 0.0]

    def __call__(self, view: OperatorView) -> OperatorAction:
        markers = []
        while True:
            try:
                cmd = self.commands.get_nowait()
            except queue_mod.Empty:
                break
            if "gripper_target_delta" in cmd:
                delta = float(cmd["gripper_target_delta"])
                self.grip_target = min(max(self.grip_target + delta, 0.0), self.grip_limit)
            elif "joint_jog" in cmd:
                jog = cmd["joint_jog"]
                joint = int(jog["joint"])
                if 0 <= joint <= 2:
                    self.pose_targets[joint] += float(jog["delta"])
            elif "marker" in cmd:
                markers.append(str(cmd["marker"]))

        p = self.params
        angle = view.leader_state.angle
        velocity = view.leader_state.velocity
        torque = (
            p.hand_kp * (self.pose_targets[0] - angle[0]) - p.hand_kd * velocity[0],
            p.hand_kp * (self.pose_targets[1] - angle[1]) - p.hand_kd * velocity[1],
            p.hand_kp * (self.pose_targets[2] - angle[2]) - p.hand_kd * velocity[2],
            self.grip_target,
        )
        return OperatorAction(torque, tuple(markers))
