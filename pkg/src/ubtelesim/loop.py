"""Fixed-rate scheduler and the two-arm closed-loop pipeline.

Simulated time advances in exact 1 ms increments (no wall-clock anywhere in
the simulation path, so traces are bit-reproducible across machines). Each
tick runs: poll channels -> operator -> controller per arm -> plant step per
arm -> observer update -> indicator render -> send frames -> record sample.

The loop is single-threaded and owns both arms. An optional real-time mode
sleeps between ticks so a human can drive the leader interactively; pacing
never feeds back into the simulation state.
"""

from __future__ import annotations

import time
from array import array
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Tuple

from . import rti
from .control import ControllerGains, RtobParams, TorqueEstimate, bilateral_torque, rtob_update
from .errors import SimulationFault
from .joints import GRIPPER, JointVector, ZERO
from .link import Channel, Frame, FrameSource
from .plant import ArmParams, ObjectModel, PlantState, contact_torque, saturate, step

DT = 0.001
DT_US = 1000


class OperatorView(NamedTuple):
    """What the operator model can see at the start of a tick."""

    tick: int
    t_us: int
    dt: float
    leader_state: PlantState
    leader_tau_hat: JointVector
    indicator: rti.RtiOutput          # as displayed, i.e. previous tick's render
    follower_grip_tau: float          # ground truth, for scenario scripting only
    follower_in_contact: bool


class OperatorAction(NamedTuple):
    leader_torque: JointVector
    markers: Tuple[str, ...] = ()


Operator = Callable[[OperatorView], OperatorAction]


class ArmSample(NamedTuple):
    angle: JointVector
    velocity: JointVector
    motor_torque: JointVector
    tau_hat: JointVector


class ChannelEvents(NamedTuple):
    delivered_to_leader: int
    delivered_to_follower: int
    dropped_to_leader: int
    dropped_to_follower: int


class TickRecord(NamedTuple):
    tick: int
    t_us: int
    leader: ArmSample
    follower: ArmSample
    indicator: rti.RtiOutput
    events: ChannelEvents
    markers: Tuple[str, ...]


@dataclass
class SessionTrace:
    """Compact per-trial trace kept by every run.

    grip_torque holds the follower gripper estimate per tick (the indicator
    and metrics signal); tracking_error the per-tick max joint angle gap.
    Full TickRecords are retained only when requested.
    """

    dt: float = DT
    tick_count: int = 0
    grip_torque: array = field(default_factory=lambda: array("d"))
    tracking_error: array = field(default_factory=lambda: array("d"))
    markers: List[Tuple[int, str]] = field(default_factory=list)
    records: Optional[List[TickRecord]] = None
    fault: Optional[str] = None
    fault_tick: Optional[int] = None

    def marker_tick(self, label: str) -> Optional[int]:
        for tick, name in self.markers:
            if name == label:
                return tick
        return None


class _PeerView:
    """Zero-order hold of the freshest frame received from the other arm."""

    __slots__ = ("angle", "velocity", "tau_hat", "last_seq")

    def __init__(self, state: PlantState):
        self.angle = state.angle
        self.velocity = state.velocity
        self.tau_hat = ZERO
        self.last_seq = -1

    def apply(self, frame: Frame) -> None:
        if frame.seq > self.last_seq:
            self.angle = frame.angle
            self.velocity = frame.velocity
            self.tau_hat = frame.tau_hat
            self.last_seq = frame.seq


class BilateralPipeline:
    """Owns both arms, the observers, the link, and the indicator."""

    def __init__(
        self,
        operator: Operator,
        leader_params: ArmParams,
        follower_params: ArmParams,
        grasped_object: ObjectModel,
        gains: ControllerGains,
        rtob_params: RtobParams,
        rti_config: rti.RtiConfig,
        to_follower: Channel,
        to_leader: Channel,
        dt: float = DT,
        leader_init: Optional[PlantState] = None,
        follower_init: Optional[PlantState] = None,
    ):
        self.operator = operator
        self.leader_params = leader_params
        self.follower_params = follower_params
        self.grasped_object = grasped_object
        self.gains = gains
        self.rtob_params = rtob_params
        self.rti_config = rti_config
        self.to_follower = to_follower
        self.to_leader = to_leader
        self.dt = dt
        self.dt_us = round(dt * 1e6)

        self.leader_state = leader_init or PlantState.at_rest()
        self.follower_state = follower_init or PlantState.at_rest()
        self.leader_est = TorqueEstimate.zero()
        self.follower_est = TorqueEstimate.zero()
        self.leader_peer = _PeerView(self.follower_state)    # leader's view of follower
        self.follower_peer = _PeerView(self.leader_state)    # follower's view of leader
        self.indicator = rti.render_sample(0.0, rti_config)
        self._seq = 0

    def tick(self, index: int) -> TickRecord:
        now_us = index * self.dt_us

        # 1. Poll the link and refresh each arm's picture of its peer.
        to_leader_frames = self.to_leader.poll(now_us)
        for frame in to_leader_frames:
            self.leader_peer.apply(frame)
        to_follower_frames = self.to_follower.poll(now_us)
        for frame in to_follower_frames:
            self.follower_peer.apply(frame)

        # 2. Operator acts on what it can see (indicator shows last tick).
        view = OperatorView(
            tick=index,
            t_us=now_us,
            dt=self.dt,
            leader_state=self.leader_state,
            leader_tau_hat=self.leader_est.tau_hat,
            indicator=self.indicator,
            follower_grip_tau=self.follower_est.tau_hat[GRIPPER],
            follower_in_contact=self.follower_state.in_contact,
        )
        action = self.operator(view)

        # 3. Bilateral control laws, one per arm, each against its peer view.
        leader_cmd = bilateral_torque(
            self.leader_state, self.leader_peer.angle, self.leader_peer.velocity,
            self.leader_est.tau_hat, self.leader_peer.tau_hat, self.gains,
        )
        follower_cmd = bilateral_torque(
            self.follower_state, self.follower_peer.angle, self.follower_peer.velocity,
            self.follower_est.tau_hat, self.follower_peer.tau_hat, self.gains,
        )
        leader_motor = saturate(leader_cmd, self.leader_params)
        follower_motor = saturate(follower_cmd, self.follower_params)

        # 4. External torques: operator hand on the leader, contact on the follower.
        grip = contact_torque(
            self.follower_state.angle[GRIPPER],
            self.follower_state.velocity[GRIPPER],
            self.grasped_object,
        )
        follower_ext = (0.0, 0.0, 0.0, grip)

        # 5. Plant steps.
        self.leader_state = step(
            self.leader_state, leader_motor, action.leader_torque,
            self.leader_params, self.dt,
        )
        self.follower_state = step(
            self.follower_state, follower_motor, follower_ext,
            self.follower_params, self.dt, self.grasped_object,
        )

        # 6. Observers run on the applied motor torque and post-step velocity.
        self.leader_est = rtob_update(
            leader_motor, self.leader_state.velocity, self.rtob_params,
            self.leader_est, self.dt,
        )
        self.follower_est = rtob_update(
            follower_motor, self.follower_state.velocity, self.rtob_params,
            self.follower_est, self.dt,
        )

        # 7. Indicator renders the follower gripper estimate.
        self.indicator = rti.render_sample(
            self.follower_est.tau_hat[GRIPPER], self.rti_config
        )

        # 8. Exchange frames.
        seq = self._seq
        self._seq += 1
        dropped_to_follower = 0 if self.to_follower.send(
            Frame(seq, now_us, FrameSource.LEADER, self.leader_state.angle,
                  self.leader_state.velocity, self.leader_est.tau_hat),
            now_us,
        ) is not None else 1
        dropped_to_leader = 0 if self.to_leader.send(
            Frame(seq, now_us, FrameSource.FOLLOWER, self.follower_state.angle,
                  self.follower_state.velocity, self.follower_est.tau_hat),
            now_us,
        ) is not None else 1

        return TickRecord(
            tick=index,
            t_us=now_us,
            leader=ArmSample(self.leader_state.angle, self.leader_state.velocity,
                             leader_motor, self.leader_est.tau_hat),
            follower=ArmSample(self.follower_state.angle, self.follower_state.velocity,
                               follower_motor, self.follower_est.tau_hat),
            indicator=self.indicator,
            events=ChannelEvents(len(to_leader_frames), len(to_follower_frames),
                                 dropped_to_leader, dropped_to_follower),
            markers=action.markers,
        )

    def tracking_error(self) -> float:
        la, fa = self.leader_state.angle, self.follower_state.angle
        return max(abs(la[0] - fa[0]), abs(la[1] - fa[1]),
                   abs(la[2] - fa[2]), abs(la[3] - fa[3]))


def run_tick_loop(
    pipeline: BilateralPipeline,
    duration_s: float,
    keep_records: bool = False,
    on_record: Optional[Callable[[TickRecord], None]] = None,
    realtime: bool = False,
    should_stop: Optional[Callable[[], bool]] = None,
) -> SessionTrace:
    """Drive the pipeline for duration_s of simulated time.

    Returns the trace; a SimulationFault ends the trial early with the reason
    recorded rather than propagating.
    """
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    ticks = round(duration_s / pipeline.dt)
    trace = SessionTrace(dt=pipeline.dt, records=[] if keep_records else None)
    wall_start = time.perf_counter() if realtime else 0.0

    for i in range(ticks):
        if should_stop is not None and should_stop():
            break
        if realtime:
            lag = wall_start + (i * pipeline.dt) - time.perf_counter()
            if lag > 0:
                time.sleep(lag)
        try:
            record = pipeline.tick(i)
        except SimulationFault as fault:
            trace.fault = str(fault)
            trace.fault_tick = i
            break
        trace.tick_count = i + 1
        trace.grip_torque.append(pipeline.follower_est.tau_hat[GRIPPER])
        trace.tracking_error.append(pipeline.tracking_error())
        for marker in record.markers:
            trace.markers.append((i, marker))
        if keep_records:
            trace.records.append(record)
        if on_record is not None:
            on_record(record)
    return trace
