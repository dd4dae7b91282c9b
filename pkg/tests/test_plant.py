import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ubtelesim.errors import ConfigError, SimulationFault
from ubtelesim.plant import (ArmParams, ObjectLabel, ObjectModel, PlantState,
                             block_object, contact_torque, no_object, saturate,
                             sponge_object, step)

ARM = ArmParams(inertia=0.01, viscous_damping=0.05, drag_quadratic=0.2, torque_limit=1.0)
ZERO = (0.0, 0.0, 0.0, 0.0)


def test_params_validate():
    with pytest.raises(ConfigError):
        ArmParams(inertia=0.0, viscous_damping=0.0, drag_quadratic=0.0, torque_limit=1.0)
    with pytest.raises(ConfigError):
        ArmParams(inertia=0.01, viscous_damping=-0.1, drag_quadratic=0.0, torque_limit=1.0)
    with pytest.raises(ConfigError):
        ObjectModel(stiffness=-1.0, contact_damping=0.0, contact_angle=0.0,
                    label=ObjectLabel.BLOCK)


def test_per_joint_parameters():
    arm = ArmParams(inertia=[0.01, 0.02, 0.03, 0.04], viscous_damping=0.0,
                    drag_quadratic=0.0, torque_limit=1.0)
    assert arm.inertia == (0.01, 0.02, 0.03, 0.04)
    assert arm.viscous_damping == (0.0, 0.0, 0.0, 0.0)


# ------------------------------------------------------------- contact

def test_contact_free_below_contact_angle():
    obj = block_object(contact_angle=0.5)
    assert contact_torque(0.49, 0.0, obj) == 0.0
    assert contact_torque(0.5, 0.0, obj) == 0.0
    assert contact_torque(-1.0, 3.0, obj) == 0.0


def test_contact_spring_law():
    obj = ObjectModel(stiffness=3.0, contact_damping=0.0, contact_angle=0.5,
                      label=ObjectLabel.BLOCK)
    assert contact_torque(0.6, 0.0, obj) == pytest.approx(-0.30)


def test_contact_none_object():
    assert contact_torque(5.0, 1.0, no_object()) == 0.0


def test_contact_never_positive():
    # Fast opening motion: damping would pull the gripper closed; clamped away.
    obj = block_object(contact_angle=0.5)
    tau = contact_torque(0.5001, -10.0, obj)
    assert tau == 0.0
    # Closing motion deepens the resistance.
    assert contact_torque(0.6, 2.0, obj) < -0.6 + 1e-12


def test_contact_continuous_at_boundary():
    obj = block_object(contact_angle=0.5)
    eps = 1e-9
    assert abs(contact_torque(0.5 + eps, 0.0, obj)) < 1e-7


def test_stiffness_ordering():
    block, sponge = block_object(0.5), sponge_object(0.5)
    assert block.stiffness > sponge.stiffness > 0
    pen = 0.57
    assert abs(contact_torque(pen, 0.0, block)) > abs(contact_torque(pen, 0.0, sponge))


# ------------------------------------------------------------- stepping

def test_equilibrium_unchanged():
    state = PlantState.at_rest()
    nxt = step(state, ZERO, ZERO, ARM, 0.001)
    assert nxt.angle == state.angle
    assert nxt.velocity == state.velocity


def test_pure_inertia_step():
    arm = ArmParams(inertia=0.01, viscous_damping=0.0, drag_quadratic=0.0,
                    torque_limit=1.0)
    state = PlantState.at_rest()
    nxt = step(state, (0.01, 0.0, 0.0, 0.0), ZERO, arm, 0.001)
    assert nxt.velocity[0] == pytest.approx(0.001)
    assert nxt.angle[0] == pytest.approx(1e-6)


def test_motor_saturation():
    state = PlantState.at_rest()
    hard = step(state, (50.0, 0.0, 0.0, 0.0), ZERO, ARM, 0.001)
    at_limit = step(state, (1.0, 0.0, 0.0, 0.0), ZERO, ARM, 0.001)
    assert hard.velocity == at_limit.velocity
    assert saturate((50.0, -50.0, 0.5, -0.5), ARM) == (1.0, -1.0, 0.5, -0.5)


def test_external_torque_not_saturated():
    state = PlantState.at_rest()
    nxt = step(state, ZERO, (5.0, 0.0, 0.0, 0.0), ARM, 0.001)
    assert nxt.velocity[0] == pytest.approx(0.001 * 5.0 / 0.01)


def test_drag_decelerates():
    state = PlantState(ZERO, (10.0, 0.0, 0.0, 0.0))
    nxt = step(state, ZERO, ZERO, ARM, 0.001)
    assert 0 < nxt.velocity[0] < 10.0


@given(st.lists(st.floats(-20.0, 20.0), min_size=4, max_size=4))
@settings(max_examples=200)
def test_passivity_kinetic_energy_non_increasing(vel):
    state = PlantState(ZERO, tuple(vel))
    for _ in range(5):
        nxt = step(state, ZERO, ZERO, ARM, 0.001)
        ke_before = sum(0.5 * j * v * v for j, v in zip(ARM.inertia, state.velocity))
        ke_after = sum(0.5 * j * v * v for j, v in zip(ARM.inertia, nxt.velocity))
        assert ke_after <= ke_before + 1e-15
        state = nxt


def test_determinism_bit_identical():
    state = PlantState((0.1, -0.2, 0.3, 0.4), (1.0, -2.0, 0.5, 0.25))
    a = step(state, (0.3, 0.2, 0.1, -0.4), (0.0, 0.1, 0.0, -0.05), ARM, 0.001)
    b = step(state, (0.3, 0.2, 0.1, -0.4), (0.0, 0.1, 0.0, -0.05), ARM, 0.001)
    assert a == b


def test_in_contact_flag():
    obj = block_object(contact_angle=0.0005)
    state = PlantState(ZERO, (0.0, 0.0, 0.0, 1.0))
    nxt = step(state, ZERO, ZERO, ARM, 0.001, obj)
    assert nxt.in_contact  # gripper moved past the contact angle
    free = step(state, ZERO, ZERO, ARM, 0.001, None)
    assert not free.in_contact
    none_obj = step(state, ZERO, ZERO, ARM, 0.001, no_object())
    assert not none_obj.in_contact


def test_non_finite_input_faults():
    state = PlantState.at_rest()
    with pytest.raises(SimulationFault):
        step(state, (math.nan, 0.0, 0.0, 0.0), ZERO, ARM, 0.001)
    with pytest.raises(SimulationFault):
        step(state, ZERO, (0.0, math.inf, 0.0, 0.0), ARM, 0.001)
    with pytest.raises(SimulationFault):
        step(PlantState((math.nan,) * 4, ZERO), ZERO, ZERO, ARM, 0.001)
    with pytest.raises(SimulationFault):
        step(state, ZERO, ZERO, ARM, 0.0)


def test_stiff_contact_stable_at_1khz():
    # Gripper pressed into the block; the spring-damper contact must not blow
    # up under semi-implicit Euler at 1 ms.
    obj = block_object(contact_angle=0.0)
    state = PlantState((0.0, 0.0, 0.0, 0.05), ZERO, True)
    for _ in range(2000):
        grip = contact_torque(state.angle[3], state.velocity[3], obj)
        state = step(state, (0.0, 0.0, 0.0, 0.3), (0.0, 0.0, 0.0, grip),
                     ARM, 0.001, obj)
    assert abs(state.velocity[3]) < 0.01
    assert 0.0 < state.angle[3] < 0.2
