/**
 * Fixed-capacity ring buffer of (timestamp, value) samples backed by
 * Float64Arrays, so long sessions stay flat on memory. The chart history
 * lives here; full telemetry history lives only in the server CSV.
 */
export class RingBuffer {
  private readonly times: Float64Array;
  private readonly values: Float64Array;
  private head = 0; // next write index
  private count = 0;

  constructor(readonly capacity: number) {
    if (capacity < 1) throw new Error("capacity must be >= 1");
    this.times = new Float64Array(capacity);
    this.values = new Float64Array(capacity);
  }

  push(t: number, v: number): void {
    this.times[this.head] = t;
    this.values[this.head] = v;
    this.head = (this.head + 1) % this.capacity;
    if (this.count < this.capacity) this.count++;
  }

  get length(): number {
    return this.count;
  }

  lastTime(): number {
    if (this.count === 0) return 0;
    return this.times[(this.head - 1 + this.capacity) % this.capacity];
  }

  lastValue(): number {
    if (this.count === 0) return 0;
    return this.values[(this.head - 1 + this.capacity) % this.capacity];
  }

  clear(): void {
    this.head = 0;
    this.count = 0;
  }

  /** Samples with t >= fromTime, oldest first. */
  window(fromTime: number): { t: number[]; v: number[] } {
    const t: number[] = [];
    const v: number[] = [];
    const start = (this.head - this.count + this.capacity) % this.capacity;
    for (let i = 0; i < this.count; i++) {
      const idx = (start + i) % this.capacity;
      if (this.times[idx] >= fromTime) {
        t.push(this.times[idx]);
        v.push(this.values[idx]);
      }
    }
    return { t, v };
  }
}

/** Channels of one telemetry stream the charts care about. */
export const CHANNELS = [
  "roll_true", "pitch_true", "yaw_true",
  "roll_est", "pitch_est", "yaw_est",
  "roll_sp", "pitch_sp", "yaw_sp",
  "thr_r", "thr_l", "srv_r", "srv_l",
  "wind_mps",
] as const;

export type Channel = (typeof CHANNELS)[number];

export class TelemetryBuffer {
  readonly channels: Record<Channel, RingBuffer>;

  constructor(capacity: number) {
    const channels = {} as Record<Channel, RingBuffer>;
    for (const name of CHANNELS) channels[name] = new RingBuffer(capacity);
    this.channels = channels;
  }

  push(t: number, sample: Record<Channel, number>): void {
    for (const name of CHANNELS) this.channels[name].push(t, sample[name]);
  }

  lastTime(): number {
    return this.channels.roll_true.lastTime();
  }

  clear(): void {
    for (const name of CHANNELS) this.channels[name].clear();
  }
}
