"""Four-joint vectors (J1..J3 arm, J4 gripper) as plain float tuples.

Tuples keep the 1 kHz tick loop fast and make snapshots immutable; the
heavier numpy machinery is reserved for offline analysis.
"""

from __future__ import annotations

import math
from typing import Tuple

JointVector = Tuple[float, float, float, float]

NUM_JOINTS = 4
GRIPPER = 3  # index of J4

ZERO: JointVector = (0.0, 0.0, 0.0, 0.0)


def joint_vector(value) -> JointVector:
    """Coerce a scalar or a 4-sequence into a JointVector."""
    if isinstance(value, (int, float)):
        v = float(value)
        return (v, v, v, v)
    vals = tuple(float(x) for x in value)
    if len(vals) != NUM_JOINTS:
        raise ValueError(f"expected {NUM_JOINTS} joint values, got {len(vals)}")
    return vals


def all_finite(v: JointVector) -> bool:
    return (
        math.isfinite(v[0])
        and math.isfinite(v[1])
        and math.isfinite(v[2])
        and math.isfinite(v[3])
    )
