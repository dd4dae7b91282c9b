"""Grasp-quality statistics over torque traces.

A trial is summarized by the proportion of samples below, inside, and above
the optimal band, plus the mean absolute error from the band's nominal
center. Band percentages are held as exact rationals internally (they must
sum to exactly 100) and rounded half-up only for display: one decimal for
percentages, three for the MAE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, List, NamedTuple, Sequence, Tuple

from .errors import EmptyTraceError
from .rti import RtiConfig, Zone, zone_of


@dataclass(frozen=True)
class TorqueTrace:
    """Ordered (timestamp_us, torque) samples of one trial."""

    timestamps_us: Tuple[int, ...]
    torques: Tuple[float, ...]
    task: str = ""
    obj: str = ""
    method: str = ""

    def __post_init__(self):
        object.__setattr__(self, "timestamps_us", tuple(self.timestamps_us))
        object.__setattr__(self, "torques", tuple(self.torques))
        if len(self.timestamps_us) != len(self.torques):
            raise ValueError("timestamps and torques must have equal length")
        ts = self.timestamps_us
        if any(ts[i] >= ts[i + 1] for i in range(len(ts) - 1)):
            raise ValueError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.torques)


@dataclass(frozen=True)
class BandSummary:
    """Zone counts and MAE of one trial."""

    low_count: int
    opt_count: int
    high_count: int
    mae: float

    @property
    def sample_count(self) -> int:
        return self.low_count + self.opt_count + self.high_count

    @property
    def low_pct(self) -> Fraction:
        return Fraction(100 * self.low_count, self.sample_count)

    @property
    def opt_pct(self) -> Fraction:
        return Fraction(100 * self.opt_count, self.sample_count)

    @property
    def high_pct(self) -> Fraction:
        return Fraction(100 * self.high_count, self.sample_count)

    def to_dict(self) -> dict:
        return {
            "low_count": self.low_count,
            "opt_count": self.opt_count,
            "high_count": self.high_count,
            "low_pct": float(self.low_pct),
            "opt_pct": float(self.opt_pct),
            "high_pct": float(self.high_pct),
            "mae": self.mae,
            "sample_count": self.sample_count,
        }

    @staticmethod
    def from_dict(data: dict) -> "BandSummary":
        return BandSummary(
            low_count=data["low_count"],
            opt_count=data["opt_count"],
            high_count=data["high_count"],
            mae=data["mae"],
        )


def band_summary(trace: TorqueTrace, cfg: RtiConfig) -> BandSummary:
    """Classify every sample against the band and average |tau - t_opt|."""
    n = len(trace)
    if n == 0:
        raise EmptyTraceError("cannot summarize an empty trace")
    low = opt = high = 0
    errors = []
    t_opt = cfg.t_opt
    for tau in trace.torques:
        zone = zone_of(tau, cfg)
        if zone is Zone.LOW:
            low += 1
        elif zone is Zone.HIGH:
            high += 1
        else:
            opt += 1
        errors.append(abs(tau - t_opt))
    # fsum: the mean of the hand-computable examples is exact to the ulp.
    return BandSummary(low, opt, high, math.fsum(errors) / n)


class SummaryComparison(NamedTuple):
    """Per-field deltas of b relative to a, plus the headline ordering."""

    d_low: Fraction
    d_opt: Fraction
    d_high: Fraction
    d_mae: float
    dominates: bool


def compare_summaries(a: BandSummary, b: BandSummary) -> SummaryComparison:
    """b dominates a when it is better on every metric: opt up, low down,
    high down, mae down (all strict)."""
    d_low = b.low_pct - a.low_pct
    d_opt = b.opt_pct - a.opt_pct
    d_high = b.high_pct - a.high_pct
    d_mae = b.mae - a.mae
    dominates = d_opt > 0 and d_low < 0 and d_high < 0 and d_mae < 0
    return SummaryComparison(d_low, d_opt, d_high, d_mae, dominates)


class SummaryRow(NamedTuple):
    task: str
    obj: str
    method: str
    summary: BandSummary

    def to_dict(self) -> dict:
        out = {"task": self.task, "obj": self.obj, "method": self.method}
        out.update(self.summary.to_dict())
        return out

    @staticmethod
    def from_dict(data: dict) -> "SummaryRow":
        return SummaryRow(data["task"], data["obj"], data["method"],
                          BandSummary.from_dict(data))


def format_pct(value: Fraction) -> str:
    """One decimal, half-up; exact because the input is rational."""
    dec = Decimal(value.numerator) / Decimal(value.denominator)
    return str(dec.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def format_mae(value: float) -> str:
    """Three decimals, half-up on the decimal expansion of the float."""
    return str(Decimal(repr(value)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


_COLUMNS = ("Task", "Obj.", "Method", "Low [%]", "Opt [%]", "High [%]", "MAE [Nm]")
_WIDTHS = (12, 8, 18, 9, 9, 10, 10)


def render_table(rows: Iterable[SummaryRow]) -> str:
    """Fixed-column text table, one row per trial summary."""
    lines = []
    header = ""
    for title, width in zip(_COLUMNS, _WIDTHS):
        header += title.ljust(width) if title in ("Task", "Obj.", "Method") else title.rjust(width)
    lines.append(header.rstrip())
    for row in rows:
        s = row.summary
        cells = (
            row.task.ljust(_WIDTHS[0]),
            row.obj.ljust(_WIDTHS[1]),
            row.method.ljust(_WIDTHS[2]),
            format_pct(s.low_pct).rjust(_WIDTHS[3]),
            format_pct(s.opt_pct).rjust(_WIDTHS[4]),
            format_pct(s.high_pct).rjust(_WIDTHS[5]),
            format_mae(s.mae).rjust(_WIDTHS[6]),
        )
        lines.append("".join(cells).rstrip())
    return "\n".join(lines) + "\n"


class ParsedRow(NamedTuple):
    task: str
    obj: str
    method: str
    low_pct: float
    opt_pct: float
    high_pct: float
    mae: float


def parse_table(text: str) -> List[ParsedRow]:
    """Inverse of render_table at printed precision (used by tests)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("Task"):
        raise ValueError("missing table header")
    rows = []
    for line in lines[1:]:
        task = line[: _WIDTHS[0]].strip()
        obj = line[_WIDTHS[0]: _WIDTHS[0] + _WIDTHS[1]].strip()
        method = line[_WIDTHS[0] + _WIDTHS[1]: _WIDTHS[0] + _WIDTHS[1] + _WIDTHS[2]].strip()
        numbers = line[_WIDTHS[0] + _WIDTHS[1] + _WIDTHS[2]:].split()
        if len(numbers) != 4:
            raise ValueError(f"malformed table row: {line!r}")
        low, opt, high, mae = (float(x) for x in numbers)
        rows.append(ParsedRow(task, obj, method, low, opt, high, mae))
    return rows


def trace_from_arrays(
    timestamps_us: Sequence[int],
    torques: Sequence[float],
    task: str = "",
    obj: str = "",
    method: str = "",
) -> TorqueTrace:
    return TorqueTrace(tuple(timestamps_us), tuple(torques), task, obj, method)
