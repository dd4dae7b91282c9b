// Torque bar: width tracks the server-sent fill percentage, color is the
// server-sent RGB byte-for-byte. The client never recomputes the mapping.

import { BandGeometry, TelemetryMsg, ZoneName } from "./types";

export interface BarElements {
  /** Outer track (fixed width). */
  track: HTMLElement;
  /** Inner filled segment. */
  fill: HTMLElement;
  /** Zone caption under the bar. */
  label: HTMLElement;
}

const ZONE_CAPTIONS: Record<ZoneName, string> = {
  low: "LOW",
  optimal: "OPTIMAL",
  high: "HIGH",
};

export function renderBar(elements: BarElements, msg: TelemetryMsg): void {
  const [r, g, b] = msg.color;
  elements.fill.style.width = `${msg.fill}%`;
  elements.fill.style.backgroundColor = `rgb(${r}, ${g}, ${b})`;
  elements.fill.dataset.r = String(r);
  elements.fill.dataset.g = String(g);
  elements.fill.dataset.b = String(b);
  elements.fill.dataset.fill = String(msg.fill);
  elements.track.classList.remove("disconnected");
  elements.label.textContent =
    `${ZONE_CAPTIONS[msg.zone]}  ${msg.tau_hat_j4.toFixed(3)} Nm`;
}

export function renderDisconnected(elements: BarElements): void {
  elements.fill.style.backgroundColor = "rgb(128, 128, 128)";
  elements.track.classList.add("disconnected");
  elements.label.textContent = "disconnected - reconnecting...";
}

/** Place tick marks on the track at the band edges the server announced. */
export function placeBandTicks(track: HTMLElement, band: BandGeometry): void {
  track.querySelectorAll(".band-tick").forEach((el) => el.remove());
  for (const fillPct of [band.low_fill, band.high_fill]) {
    const tick = track.ownerDocument.createElement("div");
    tick.className = "band-tick";
    tick.style.left = `${fillPct}%`;
    track.appendChild(tick);
  }
}
