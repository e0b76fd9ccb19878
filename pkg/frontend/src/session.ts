/**
 * Connection and state-keeping for one dashboard session.
 *
 * The session renders only what the server has applied: gains, wind,
 * setpoints and pause state come from telemetry frames (and every command
 * is acknowledged before its effect appears there), so there is no
 * optimistic local state to diverge. Closing and reconnecting rebuilds the
 * identical view from the stream alone.
 */
import type {
  AckMessage,
  Axis,
  Command,
  GainTriple,
  TelemetryFrame,
} from "./protocol.js";
import { parseServerMessage } from "./protocol.js";
import { TelemetryBuffer } from "./ringbuffer.js";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionState = "connecting" | "connected" | "reconnecting" | "closed";

export interface AckInfo {
  cmd: string;
  axis?: string;
  tick: number;
  receivedTick: number;
  time: number; // estimated sim time of the effect tick, s
}

export interface Snapshot {
  connection: ConnectionState;
  tick: number;
  time: number;
  paused: boolean;
  done: boolean;
  gains: Record<Axis, GainTriple> | null;
  windKnots: number | null;
  windMps: number | null;
  setpoints: { roll: number; pitch: number; yaw: number; altitude: number } | null;
  satFlags: number;
  lastAck: AckInfo | null;
  lastError: string | null;
  reconnectAttempts: number;
}

export interface SessionOptions {
  socketFactory?: SocketFactory;
  windowSeconds?: number;
  bufferCapacity?: number;
  reconnectDelaysMs?: number[];
  schedule?: (fn: () => void, ms: number) => void;
  onChange?: () => void;
}

const DEFAULT_DELAYS = [500, 1000, 2000, 5000];

export class Session {
  readonly url: string;
  readonly windowSeconds: number;
  readonly buffer: TelemetryBuffer;
  readonly ackMarkers: AckInfo[] = [];

  private readonly makeSocket: SocketFactory;
  private readonly delays: number[];
  private readonly schedule: (fn: () => void, ms: number) => void;
  private readonly onChange: () => void;

  private socket: SocketLike | null = null;
  private connection: ConnectionState = "closed";
  private attempts = 0;
  private closedByUser = false;

  private tick = 0;
  private time = 0;
  private paused = false;
  private done = false;
  private gains: Record<Axis, GainTriple> | null = null;
  private windKnots: number | null = null;
  private windMps: number | null = null;
  private setpoints: Snapshot["setpoints"] = null;
  private satFlags = 0;
  private lastAck: AckInfo | null = null;
  private lastError: string | null = null;

  constructor(url: string, opts: SessionOptions = {}) {
    this.url = url;
    this.windowSeconds = opts.windowSeconds ?? 30;
    this.buffer = new TelemetryBuffer(opts.bufferCapacity ?? 4096);
    this.makeSocket = opts.socketFactory ?? defaultSocketFactory;
    this.delays = opts.reconnectDelaysMs ?? DEFAULT_DELAYS;
    this.schedule = opts.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.onChange = opts.onChange ?? (() => {});
  }

  connect(): void {
    this.closedByUser = false;
    this.open("connecting");
  }

  close(): void {
    this.closedByUser = true;
    this.connection = "closed";
    if (this.socket) {
      const s = this.socket;
      this.socket = null;
      s.onclose = null;
      s.close();
    }
    this.onChange();
  }

  /** Serialize a command; refused (false) while disconnected. */
  send(cmd: Command): boolean {
    if (this.connection !== "connected" || this.socket === null) {
      this.lastError = "not connected";
      this.onChange();
      return false;
    }
    this.socket.send(JSON.stringify(cmd));
    return true;
  }

  snapshot(): Snapshot {
    return {
      connection: this.connection,
      tick: this.tick,
      time: this.time,
      paused: this.paused,
      done: this.done,
      gains: this.gains,
      windKnots: this.windKnots,
      windMps: this.windMps,
      setpoints: this.setpoints,
      satFlags: this.satFlags,
      lastAck: this.lastAck,
      lastError: this.lastError,
      reconnectAttempts: this.attempts,
    };
  }

  // -- internals ------------------------------------------------------------

  private open(state: ConnectionState): void {
    this.connection = state;
    this.onChange();
    let socket: SocketLike;
    try {
      socket = this.makeSocket(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.connection = "connected";
      this.attempts = 0;
      this.onChange();
    };
    socket.onmessage = (ev) => this.handleMessage(String(ev.data));
    socket.onerror = () => {
      // the close handler owns recovery
    };
    socket.onclose = () => {
      if (this.socket === socket) this.socket = null;
      if (!this.closedByUser) this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    this.connection = "reconnecting";
    const delay = this.delays[Math.min(this.attempts, this.delays.length - 1)];
    this.attempts++;
    this.onChange();
    this.schedule(() => {
      if (!this.closedByUser) this.open("reconnecting");
    }, delay);
  }

  private handleMessage(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg === null) return;
    if (msg.type === "telemetry") {
      this.applyFrame(msg);
    } else if (msg.type === "ack") {
      this.applyAck(msg);
    } else {
      this.lastError = msg.message;
    }
    this.onChange();
  }

  private applyFrame(f: TelemetryFrame): void {
    this.tick = f.k;
    this.time = f.t;
    this.paused = f.paused;
    this.done = f.done;
    this.gains = f.gains;
    this.windKnots = f.wind_knots;
    this.windMps = f.wind_mps;
    this.setpoints = {
      roll: f.sp.roll,
      pitch: f.sp.pitch,
      yaw: f.sp.yaw,
      altitude: f.sp.altitude,
    };
    this.satFlags = f.sat_flags;
    // paused heartbeats repeat the frozen tick; log each point once
    if (this.buffer.lastTime() !== f.t || this.buffer.channels.roll_true.length === 0) {
      this.buffer.push(f.t, {
        roll_true: f.true.roll,
        pitch_true: f.true.pitch,
        yaw_true: f.true.yaw,
        roll_est: f.est.roll,
        pitch_est: f.est.pitch,
        yaw_est: f.est.yaw,
        roll_sp: f.sp.roll,
        pitch_sp: f.sp.pitch,
        yaw_sp: f.sp.yaw,
        thr_r: f.throttle[0],
        thr_l: f.throttle[1],
        srv_r: f.servo_deg[0],
        srv_l: f.servo_deg[1],
        wind_mps: f.wind_mps,
      });
    }
  }

  private applyAck(ack: AckMessage): void {
    const perTick = this.tick > 0 ? this.time / this.tick : 0;
    const info: AckInfo = {
      cmd: ack.cmd,
      axis: ack.axis,
      tick: ack.tick,
      receivedTick: ack.received_tick,
      time: ack.tick * perTick,
    };
    this.lastAck = info;
    if (ack.cmd === "reset") {
      this.buffer.clear();
      this.ackMarkers.length = 0;
      return;
    }
    this.ackMarkers.push(info);
    if (this.ackMarkers.length > 64) this.ackMarkers.shift();
  }
}

function defaultSocketFactory(url: string): SocketLike {
  return new WebSocket(url) as unknown as SocketLike;
}
