"""Deterministic leader-follower underwater teleoperation simulator.

Core pieces: a pure torque-band indicator (fill / zone / blended color),
semi-implicit Euler arm dynamics with a spring-damper grasp, a symmetric
4-channel bilateral controller with a sensorless reaction torque observer,
a 116-byte wire protocol with an impairment-injecting channel, band
metrics, and a session CLI with scripted or live operators.
"""

from .config import (OperatorMode, OperatorModelParams, Scenario,
                     SessionConfig, config_from_dict, load_config)
from .control import ControllerGains, RtobParams, TorqueEstimate, bilateral_torque, rtob_update
from .errors import (BadChecksum, BadLength, BadMagic, BadVersion, ConfigError,
                     EmptyTraceError, FrameError, SchemaError, SimulationFault,
                     UbteleError)
from .joints import GRIPPER, JointVector
from .link import Channel, ChannelModel, Frame, FrameSource, decode_frame, encode_frame
from .loop import (BilateralPipeline, OperatorAction, OperatorView,
                   SessionTrace, TickRecord, run_tick_loop)
from .metrics import (BandSummary, SummaryRow, TorqueTrace, band_summary,
                      compare_summaries, parse_table, render_table)
from .plant import (ArmParams, ObjectLabel, ObjectModel, PlantState,
                    block_object, contact_torque, no_object, sponge_object, step)
from .rti import (ColorRgb, RtiConfig, RtiOutput, Zone, color_components,
                  color_of, fill_ratio, render_sample, zone_of)
from .session import (ReplayReport, SessionResult, replay, run_session,
                      simulate, summary_row, window_summary)

__version__ = "0.1.0"
