import queue

import numpy as np
import pytest

from ubtelesim.config import (OperatorMode, OperatorModelParams, Scenario,
                              SessionConfig)
from ubtelesim.joints import GRIPPER
from ubtelesim.loop import OperatorView
from ubtelesim.operators import (InteractiveOperator, ScriptedOperator,
                                 SinusoidOperator)
from ubtelesim.plant import PlantState
from ubtelesim.rti import RtiConfig, Zone, render_sample
from ubtelesim.session import hold_window, simulate

NO_NOISE = OperatorModelParams(sigma_base=1e-9, sigma_bias=1e-9, sigma_tremor=0.0)


def _operator(mode=OperatorMode.SCRIPTED_RTI_AWARE, params=NO_NOISE,
              scenario=Scenario.LIFT, duration=10.0, seed=0):
    return ScriptedOperator(scenario, mode, params, RtiConfig(), duration,
                            np.random.default_rng(seed))


def _view(tick, indicator, grip_tau=0.3, leader_tau=(0.0, 0.0, 0.0, -0.3)):
    return OperatorView(
        tick=tick, t_us=tick * 1000, dt=0.001,
        leader_state=PlantState.at_rest(),
        leader_tau_hat=leader_tau,
        indicator=indicator,
        follower_grip_tau=grip_tau,
        follower_in_contact=True,
    )


def test_interactive_mode_rejected_by_scripted():
    with pytest.raises(ValueError):
        _operator(mode=OperatorMode.INTERACTIVE)


def test_rti_aware_high_zone_strictly_decreases_command():
    op = _operator()
    indicator_high = render_sample(0.5, RtiConfig())
    assert indicator_high.zone is Zone.HIGH
    # Reach a steady grasp first (hold phase, hand converged on the band).
    indicator_opt = render_sample(0.3, RtiConfig())
    for tick in range(1000, 3000):
        action = op(_view(tick, indicator_opt))
    assert action.leader_torque[GRIPPER] > 0.25
    previous = action.leader_torque[GRIPPER]
    for tick in range(3000, 3030):
        action = op(_view(tick, indicator_high))
        assert action.leader_torque[GRIPPER] < previous
        previous = action.leader_torque[GRIPPER]


def test_rti_aware_low_zone_increases_command():
    op = _operator()
    op(_view(1000, render_sample(0.3, RtiConfig())))
    indicator_low = render_sample(0.1, RtiConfig())
    first = op(_view(1001, indicator_low)).leader_torque[GRIPPER]
    later = op(_view(1050, indicator_low)).leader_torque[GRIPPER]
    assert later > first


def test_markers_emitted_in_order():
    op = _operator(duration=8.0)
    markers = []
    for tick in range(8000):
        grip = 0.0 if tick < 700 else 0.3
        action = op(_view(tick, render_sample(grip, RtiConfig()), grip_tau=grip))
        markers.extend(action.markers)
    assert markers == ["grasp-start", "lift-start", "release"]


def test_noise_free_hold_stays_optimal_full_session():
    cfg = SessionConfig().replace(
        operator=OperatorMode.SCRIPTED_RTI_AWARE, operator_model=NO_NOISE,
        duration_s=8.0, seed=5)
    trace = simulate(cfg)
    start, end = hold_window(trace)
    zones = [render_sample(t, cfg.rti).zone for t in trace.grip_torque[start:end]]
    assert all(z is Zone.OPTIMAL for z in zones)


def test_baseline_uses_felt_torque_not_zone():
    # Feeding a wrong indicator must not change the baseline's behavior.
    params = OperatorModelParams(sigma_base=1e-9, sigma_bias=1e-9, sigma_tremor=0.0)
    a = ScriptedOperator(Scenario.LIFT, OperatorMode.SCRIPTED_BASELINE, params,
                         RtiConfig(), 10.0, np.random.default_rng(1))
    b = ScriptedOperator(Scenario.LIFT, OperatorMode.SCRIPTED_BASELINE, params,
                         RtiConfig(), 10.0, np.random.default_rng(1))
    wrong = render_sample(0.59, RtiConfig())
    right = render_sample(0.30, RtiConfig())
    for tick in range(2000):
        ta = a(_view(tick, wrong)).leader_torque[GRIPPER]
        tb = b(_view(tick, right)).leader_torque[GRIPPER]
        assert ta == tb


def test_scripted_runs_deterministic_given_seed():
    cfg = SessionConfig().replace(duration_s=4.0, seed=77)
    a = simulate(cfg)
    b = simulate(cfg)
    assert a.grip_torque == b.grip_torque
    assert a.markers == b.markers


def test_sinusoid_operator_shape():
    op = SinusoidOperator(amplitude=0.1, frequency_hz=1.0, joint=2)
    view = _view(250, render_sample(0.0, RtiConfig()))  # quarter period
    action = op(view)
    assert action.leader_torque[2] == pytest.approx(0.1)
    assert action.leader_torque[0] == 0.0


def test_interactive_operator_applies_commands():
    q = queue.Queue()
    op = InteractiveOperator(OperatorModelParams(), q)
    view = _view(0, render_sample(0.0, RtiConfig()))
    assert op(view).leader_torque[GRIPPER] == 0.0

    q.put({"gripper_target_delta": 0.25})
    q.put({"joint_jog": {"joint": 1, "delta": 0.5}})
    q.put({"marker": "note"})
    action = op(view)
    assert action.leader_torque[GRIPPER] == pytest.approx(0.25)
    assert action.leader_torque[1] == pytest.approx(OperatorModelParams().hand_kp * 0.5)
    assert action.markers == ("note",)

    # Grip target clamps at zero and at the limit.
    q.put({"gripper_target_delta": -5.0})
    assert op(view).leader_torque[GRIPPER] == 0.0
    q.put({"gripper_target_delta": 99.0})
    assert op(view).leader_torque[GRIPPER] == OperatorModelParams().grip_max
