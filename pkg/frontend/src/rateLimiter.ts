// Coalesces operator input into at most one message per telemetry period.
// Inputs buffer until the window closes: rapid gripper deltas and jogs are
// summed and leave as a single message, so the command stream never runs
// faster than the telemetry stream. Markers bypass the window (rare, and
// they must not merge), flushing anything pending first to keep order.

import { CommandMsg } from "./types";

type Sender = (msg: CommandMsg) => void;

export class CommandRateLimiter {
  private periodMs: number;
  private send: Sender;
  private pendingGripDelta = 0;
  private pendingJogs = new Map<number, number>();
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(send: Sender, periodMs: number) {
    this.send = send;
    this.periodMs = periodMs;
  }

  setPeriod(periodMs: number): void {
    this.periodMs = periodMs;
  }

  gripperDelta(delta: number): void {
    this.pendingGripDelta += delta;
    this.schedule();
  }

  jointJog(joint: number, delta: number): void {
    this.pendingJogs.set(joint, (this.pendingJogs.get(joint) ?? 0) + delta);
    this.schedule();
  }

  marker(label: string): void {
    this.flush();
    this.send({ type: "command", marker: label });
  }

  private schedule(): void {
    if (this.timer === null) {
      this.timer = setTimeout(() => {
        this.timer = null;
        this.flush();
      }, this.periodMs);
    }
  }

  /** Emit everything pending, one message per command kind. */
  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.pendingGripDelta !== 0) {
      this.send({ type: "command", gripper_target_delta: this.pendingGripDelta });
      this.pendingGripDelta = 0;
    }
    for (const [joint, delta] of this.pendingJogs) {
      if (delta !== 0) {
        this.send({ type: "command", joint_jog: { joint, delta } });
      }
    }
    this.pendingJogs.clear();
  }
}
