/**
 * Dependency-free canvas strip charts for streaming time series.
 *
 * Each chart renders a sliding time window with auto-scaled (or fixed)
 * y limits, light grid lines, a compact legend, and optional vertical
 * markers at command-acknowledge times.
 */
export interface SeriesSpec {
  label: string;
  color: string;
  dashed?: boolean;
}

export interface SeriesData {
  t: number[];
  v: number[];
}

export interface ChartOptions {
  yLabel: string;
  yMin?: number;
  yMax?: number;
  windowSeconds: number;
}

const GRID = "#2a2f3a";
const TEXT = "#9aa4b2";
const MARKER = "#e8c158";

export class StripChart {
  private readonly ctx: CanvasRenderingContext2D;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly series: SeriesSpec[],
    private readonly opts: ChartOptions,
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  draw(data: SeriesData[], markers: number[] = []): void {
    const { ctx, canvas } = this;
    const w = canvas.width;
    const h = canvas.height;
    const left = 44;
    const bottom = h - 16;
    const top = 6;
    ctx.clearRect(0, 0, w, h);

    const tMax = Math.max(0, ...data.map((d) => (d.t.length ? d.t[d.t.length - 1] : 0)));
    const tMin = Math.max(0, tMax - this.opts.windowSeconds);

    let yMin = this.opts.yMin ?? Infinity;
    let yMax = this.opts.yMax ?? -Infinity;
    if (this.opts.yMin === undefined || this.opts.yMax === undefined) {
      for (const d of data) {
        for (let i = 0; i < d.t.length; i++) {
          if (d.t[i] < tMin) continue;
          if (d.v[i] < yMin) yMin = d.v[i];
          if (d.v[i] > yMax) yMax = d.v[i];
        }
      }
      if (!isFinite(yMin) || !isFinite(yMax)) {
        yMin = -1;
        yMax = 1;
      }
      const pad = Math.max(0.5, 0.1 * (yMax - yMin));
      yMin -= pad;
      yMax += pad;
    }

    const px = (t: number) =>
      left + ((t - tMin) / Math.max(1e-9, tMax - tMin)) * (w - left - 6);
    const py = (v: number) =>
      top + (1 - (v - yMin) / Math.max(1e-9, yMax - yMin)) * (bottom - top);

    // grid + labels
    ctx.strokeStyle = GRID;
    ctx.fillStyle = TEXT;
    ctx.font = "10px system-ui, sans-serif";
    ctx.lineWidth = 1;
    const rows = 4;
    for (let i = 0; i <= rows; i++) {
      const v = yMin + ((yMax - yMin) * i) / rows;
      const y = py(v);
      ctx.beginPath();
      ctx.moveTo(left, y);
      ctx.lineTo(w - 6, y);
      ctx.stroke();
      ctx.fillText(formatTick(v), 2, y + 3);
    }
    const cols = 6;
    for (let i = 0; i <= cols; i++) {
      const t = tMin + ((tMax - tMin) * i) / cols;
      const x = px(t);
      ctx.beginPath();
      ctx.moveTo(x, top);
      ctx.lineTo(x, bottom);
      ctx.stroke();
      if (i > 0 && i < cols) ctx.fillText(t.toFixed(1), x - 10, h - 4);
    }
    ctx.fillText(this.opts.yLabel, left + 4, top + 8);

    // ack markers
    ctx.strokeStyle = MARKER;
    for (const t of markers) {
      if (t < tMin || t > tMax) continue;
      const x = px(t);
      ctx.beginPath();
      ctx.moveTo(x, top);
      ctx.lineTo(x, bottom);
      ctx.stroke();
    }

    // series
    data.forEach((d, si) => {
      const spec = this.series[si];
      ctx.strokeStyle = spec.color;
      ctx.lineWidth = 1.4;
      ctx.setLineDash(spec.dashed ? [5, 4] : []);
      ctx.beginPath();
      let started = false;
      for (let i = 0; i < d.t.length; i++) {
        if (d.t[i] < tMin) continue;
        const x = px(d.t[i]);
        const y = py(d.v[i]);
        if (started) ctx.lineTo(x, y);
        else {
          ctx.moveTo(x, y);
          started = true;
        }
      }
      ctx.stroke();
      ctx.setLineDash([]);
    });

    // legend
    let lx = left + 8;
    const ly = top + 18;
    for (const spec of this.series) {
      ctx.fillStyle = spec.color;
      ctx.fillRect(lx, ly - 7, 9, 3);
      ctx.fillStyle = TEXT;
      ctx.fillText(spec.label, lx + 12, ly - 2);
      lx += 12 + 10 + spec.label.length * 5.4;
    }
  }
}

function formatTick(v: number): string {
  const a = Math.abs(v);
  if (a >= 100) return v.toFixed(0);
  if (a >= 1) return v.toFixed(1);
  return v.toFixed(2);
}
