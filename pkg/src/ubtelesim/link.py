"""Wire protocol and impairment-injecting channel between the two arms.

Frames are fixed-length (116 bytes), little-endian:

    offset  size  field
    0       2     magic 0x4255 ("UB" on the wire)
    2       1     version (currently 1)
    3       1     source (0 = leader, 1 = follower)
    4       4     sequence number (uint32, strictly increasing per source)
    8       8     timestamp in simulated microseconds (uint64)
    16      32    joint angles, 4 x float64
    48      32    joint velocities, 4 x float64
    80      32    torque estimates, 4 x float64
    112     4     CRC-32 over bytes 0..111

The channel delays each frame by base latency plus seeded uniform jitter and
drops frames with a configured probability; with jitter disabled, delivery
preserves send order.
"""

from __future__ import annotations

import enum
import heapq
import math
import struct
import zlib
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import BadChecksum, BadLength, BadMagic, BadVersion, ConfigError, FrameError
from .joints import JointVector, all_finite

MAGIC = 0x4255
VERSION = 1
FRAME_SIZE = 116

_HEADER = struct.Struct("<HBBIQ")
_BODY = struct.Struct("<12d")
_CRC = struct.Struct("<I")


class FrameSource(enum.Enum):
    LEADER = 0
    FOLLOWER = 1


@dataclass(frozen=True)
class Frame:
    seq: int
    timestamp_us: int
    source: FrameSource
    angle: JointVector
    velocity: JointVector
    tau_hat: JointVector


def encode_frame(frame: Frame) -> bytes:
    """Serialize a frame to its 116-byte wire form."""
    if not 0 <= frame.seq < 2**32:
        raise ValueError(f"seq out of range: {frame.seq}")
    if not 0 <= frame.timestamp_us < 2**64:
        raise ValueError(f"timestamp out of range: {frame.timestamp_us}")
    if not (all_finite(frame.angle) and all_finite(frame.velocity) and all_finite(frame.tau_hat)):
        raise ValueError("frame fields must be finite")
    head = _HEADER.pack(MAGIC, VERSION, frame.source.value, frame.seq, frame.timestamp_us)
    body = _BODY.pack(*frame.angle, *frame.velocity, *frame.tau_hat)
    payload = head + body
    return payload + _CRC.pack(zlib.crc32(payload))


def decode_frame(data: bytes) -> Frame:
    """Parse and validate a wire frame; raises a FrameError subclass on any defect."""
    if len(data) != FRAME_SIZE:
        raise BadLength(f"expected {FRAME_SIZE} bytes, got {len(data)}")
    magic, version, source, seq, timestamp_us = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise BadMagic(f"bad magic 0x{magic:04x}")
    if version != VERSION:
        raise BadVersion(f"unsupported version {version}")
    (crc,) = _CRC.unpack_from(data, FRAME_SIZE - 4)
    if zlib.crc32(data[: FRAME_SIZE - 4]) != crc:
        raise BadChecksum("CRC mismatch")
    if source not in (0, 1):
        raise FrameError(f"invalid source byte {source}")
    values = _BODY.unpack_from(data, _HEADER.size)
    return Frame(
        seq=seq,
        timestamp_us=timestamp_us,
        source=FrameSource(source),
        angle=values[0:4],
        velocity=values[4:8],
        tau_hat=values[8:12],
    )


@dataclass(frozen=True)
class ChannelModel:
    """Impairment parameters for one direction of the link."""

    base_latency_ms: float = 0.0
    jitter_ms: float = 0.0
    drop_probability: float = 0.0
    seed: int = 0

    def __post_init__(self):
        errors = []
        if self.base_latency_ms < 0 or not math.isfinite(self.base_latency_ms):
            errors.append("channel.base_latency_ms: must be >= 0")
        if self.jitter_ms < 0 or not math.isfinite(self.jitter_ms):
            errors.append("channel.jitter_ms: must be >= 0")
        if not 0.0 <= self.drop_probability < 1.0:
            errors.append("channel.drop_probability: must be in [0, 1)")
        if errors:
            raise ConfigError(errors)


class Channel:
    """One direction of the wire link, running in simulated time.

    Frames handed to send() are either dropped (seeded Bernoulli draw) or
    scheduled for delivery at now + base latency + U(0, jitter). poll()
    releases every frame whose delivery time has arrived, in delivery-time
    order with FIFO tie-breaking.
    """

    def __init__(self, model: ChannelModel):
        self.model = model
        self._rng = np.random.Generator(np.random.PCG64(model.seed))
        self._queue: List = []
        self._serial = 0
        self.sent_count = 0
        self.dropped_count = 0
        self.dropped_seqs: List[int] = []

    def send(self, frame: Frame, now_us: int) -> Optional[float]:
        """Queue a frame; returns its delivery time in us, or None if dropped."""
        self.sent_count += 1
        m = self.model
        if m.drop_probability > 0.0 and self._rng.random() < m.drop_probability:
            self.dropped_count += 1
            self.dropped_seqs.append(frame.seq)
            return None
        delay_us = m.base_latency_ms * 1000.0
        if m.jitter_ms > 0.0:
            delay_us += self._rng.random() * m.jitter_ms * 1000.0
        delivery_us = now_us + delay_us
        heapq.heappush(self._queue, (delivery_us, self._serial, frame))
        self._serial += 1
        return delivery_us

    def poll(self, now_us: int) -> List[Frame]:
        """Return all frames due at or before now, oldest first."""
        due = []
        q = self._queue
        while q and q[0][0] <= now_us:
            due.append(heapq.heappop(q)[2])
        return due

    @property
    def pending(self) -> int:
        return len(self._queue)
