// Message schema of the telemetry endpoint (newline-delimited JSON over a
// local socket; each WebSocket text frame carries one message).

export interface BandGeometry {
  t_min: number;
  t_max: number;
  t_low: number;
  t_high: number;
  t_opt: number;
  /** Bar position of the band edges, percent, computed server-side. */
  low_fill: number;
  high_fill: number;
}

export interface ConfigMsg {
  type: "config";
  schema_version: number;
  dt: number;
  decimation: number;
  band: BandGeometry;
  colors: { low: number[]; opt: number[]; high: number[] };
}

export type ZoneName = "low" | "optimal" | "high";

export interface TelemetryMsg {
  type: "telemetry";
  t: number;
  tick: number;
  tau_hat_j4: number;
  /** Bar filling ratio in percent; display verbatim. */
  fill: number;
  /** Server-computed RGB; display verbatim, never recompute. */
  color: [number, number, number];
  zone: ZoneName;
  angles: { leader: number[]; follower: number[] };
  grip_target: number;
}

export type CommandMsg =
  | { type: "command"; gripper_target_delta: number }
  | { type: "command"; joint_jog: { joint: number; delta: number } }
  | { type: "command"; marker: string };

export type ServerMsg = ConfigMsg | TelemetryMsg;

export function parseServerMsg(raw: string): ServerMsg | null {
  let msg: unknown;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null) {
    return null;
  }
  const type = (msg as { type?: string }).type;
  if (type === "config" || type === "telemetry") {
    return msg as ServerMsg;
  }
  return null;
}
