// Operator console: drives the leader gripper against the live simulation
// and shows the torque bar exactly as the server computed it.

import { BarElements, placeBandTicks, renderBar, renderDisconnected } from "./bar";
import { HistoryChart } from "./history";
import { CommandRateLimiter } from "./rateLimiter";
import { TelemetryLink } from "./net";
import { TelemetryMsg } from "./types";

const GRIP_STEP = 0.01;   // Nm per key repeat
const JOG_STEP = 0.02;    // rad per key repeat

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function defaultUrl(): string {
  const override = new URLSearchParams(location.search).get("ws");
  if (override) {
    return override;
  }
  return `ws://${location.hostname || "127.0.0.1"}:8766`;
}

function main(): void {
  const bar: BarElements = {
    track: byId("bar-track"),
    fill: byId("bar-fill"),
    label: byId("bar-label"),
  };
  const chart = new HistoryChart(byId<HTMLCanvasElement>("history"));
  const status = byId("status");
  const values = byId("values");

  let latest: TelemetryMsg | null = null;
  let connected = false;

  const link = new TelemetryLink(defaultUrl(), {
    onMessage: (msg) => {
      if (msg.type === "config") {
        placeBandTicks(bar.track, msg.band);
        chart.setBand(msg.band);
        limiter.setPeriod(msg.decimation * msg.dt * 1000);
      } else {
        latest = msg;
        chart.push(msg);
      }
    },
    onState: (up) => {
      connected = up;
      status.textContent = up ? "connected" : "disconnected";
      status.className = up ? "ok" : "bad";
      if (!up) {
        renderDisconnected(bar);
      }
    },
  });

  const limiter = new CommandRateLimiter((msg) => {
    if (!link.send(msg)) {
      status.textContent = "command dropped (socket closed)";
      status.className = "bad";
    }
  }, 20);

  document.addEventListener("keydown", (event: KeyboardEvent) => {
    switch (event.code) {
      case "KeyQ": limiter.gripperDelta(GRIP_STEP); break;
      case "KeyA": limiter.gripperDelta(-GRIP_STEP); break;
      case "ArrowLeft": limiter.jointJog(0, -JOG_STEP); break;
      case "ArrowRight": limiter.jointJog(0, JOG_STEP); break;
      case "ArrowUp": limiter.jointJog(1, JOG_STEP); break;
      case "ArrowDown": limiter.jointJog(1, -JOG_STEP); break;
      case "KeyW": limiter.jointJog(2, JOG_STEP); break;
      case "KeyS": limiter.jointJog(2, -JOG_STEP); break;
      default: return;
    }
    event.preventDefault();
  });

  byId("mark-grasp").addEventListener("click", () => limiter.marker("grasp-start"));
  byId("mark-release").addEventListener("click", () => limiter.marker("release"));

  const slider = byId<HTMLInputElement>("grip-slider");
  let sliderValue = 0;
  slider.addEventListener("input", () => {
    const target = parseFloat(slider.value);
    limiter.gripperDelta(target - sliderValue);
    sliderValue = target;
  });

  function frame(): void {
    if (connected && latest !== null) {
      renderBar(bar, latest);
      chart.draw();
      values.textContent =
        `t=${latest.t.toFixed(2)}s  grip target=${latest.grip_target.toFixed(3)} Nm  ` +
        `leader J4=${latest.angles.leader[3].toFixed(3)} rad  ` +
        `follower J4=${latest.angles.follower[3].toFixed(3)} rad`;
    }
    requestAnimationFrame(frame);
  }

  link.connect();
  requestAnimationFrame(frame);
}

window.addEventListener("load", main);
