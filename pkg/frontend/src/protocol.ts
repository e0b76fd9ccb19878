/**
 * Wire types for the simulator's websocket protocol.
 *
 * The server streams `telemetry` frames carrying the full applied state
 * (attitude truth/estimate/setpoints, actuator commands, wind, gain table),
 * acknowledges every command with the tick at which it takes effect, and
 * answers malformed input with an `error` message.
 */

export type Axis = "roll" | "pitch" | "yaw";

export type GainTriple = [kp: number, ki: number, kd: number];

export interface AxisAngles {
  roll: number;
  pitch: number;
  yaw: number;
}

export interface TelemetryFrame {
  type: "telemetry";
  k: number;
  t: number;
  true: AxisAngles;
  est: AxisAngles;
  sp: AxisAngles & { altitude: number };
  u: { roll: number; pitch: number; yaw: number; alt: number };
  throttle: [number, number];
  servo_deg: [number, number];
  wind_mps: number;
  wind_knots: number;
  sat_flags: number;
  paused: boolean;
  done: boolean;
  gains: Record<Axis, GainTriple>;
}

export interface AckMessage {
  type: "ack";
  cmd: string;
  axis?: string;
  applied?: unknown;
  received_tick: number;
  tick: number;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ServerMessage = TelemetryFrame | AckMessage | ErrorMessage;

export type Command =
  | { type: "set_gains"; axis: Axis; kp: number; ki: number; kd: number }
  | { type: "set_wind"; knots: number }
  | { type: "set_setpoint"; axis: Axis; deg: number }
  | { type: "set_setpoint"; axis: "altitude"; m: number }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "reset" };

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const type = (data as { type?: unknown }).type;
  if (type === "telemetry" || type === "ack" || type === "error") {
    return data as ServerMessage;
  }
  return null;
}
