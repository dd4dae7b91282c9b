// Rolling strip chart of the gripper torque estimate with the optimal band
// shaded, so a run can be eyeballed the way the offline analysis plots are.

import { BandGeometry, TelemetryMsg } from "./types";

const WINDOW_S = 10.0;

export class HistoryChart {
  private canvas: HTMLCanvasElement;
  private band: BandGeometry | null = null;
  private samples: Array<{ t: number; tau: number }> = [];

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
  }

  setBand(band: BandGeometry): void {
    this.band = band;
  }

  push(msg: TelemetryMsg): void {
    this.samples.push({ t: msg.t, tau: msg.tau_hat_j4 });
    const cutoff = msg.t - WINDOW_S;
    while (this.samples.length > 0 && this.samples[0].t < cutoff) {
      this.samples.shift();
    }
  }

  get size(): number {
    return this.samples.length;
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx || !this.band) {
      return;
    }
    const { width, height } = this.canvas;
    const band = this.band;
    const yMin = band.t_min - 0.1;
    const yMax = band.t_max + 0.1;
    const toY = (tau: number) =>
      height - ((tau - yMin) / (yMax - yMin)) * height;

    ctx.clearRect(0, 0, width, height);
    // Band shading.
    ctx.fillStyle = "rgba(0, 200, 0, 0.15)";
    const yHigh = toY(band.t_high);
    ctx.fillRect(0, yHigh, width, toY(band.t_low) - yHigh);
    ctx.strokeStyle = "rgba(0, 160, 0, 0.6)";
    for (const level of [band.t_low, band.t_high]) {
      ctx.beginPath();
      ctx.moveTo(0, toY(level));
      ctx.lineTo(width, toY(level));
      ctx.stroke();
    }

    if (this.samples.length < 2) {
      return;
    }
    const tEnd = this.samples[this.samples.length - 1].t;
    const tStart = tEnd - WINDOW_S;
    ctx.strokeStyle = "#202020";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    this.samples.forEach((s, i) => {
      const x = ((s.t - tStart) / WINDOW_S) * width;
      const y = toY(s.tau);
      if (i === 0) {
        ctx.moveTo(x, y);
      } else {
        ctx.lineTo(x, y);
      }
    });
    ctx.stroke();
  }
}
