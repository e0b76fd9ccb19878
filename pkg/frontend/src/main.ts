/**
 * Dashboard assembly: live charts on the left, tuning controls on the
 * right. All displayed gain/wind/setpoint values come from the server
 * stream; slider edits stay local until Apply, and the applied labels only
 * move when the server acknowledges and streams the new state back.
 */
import { StripChart } from "./charts.js";
import type { Axis, Command } from "./protocol.js";
import { Session } from "./session.js";

const AXES: Axis[] = ["roll", "pitch", "yaw"];

// log-scale slider ranges per gain; kd admits exact zero at the left stop
const GAIN_RANGE: Record<string, [number, number]> = {
  kp: [0.01, 10],
  ki: [0.001, 1],
  kd: [0.01, 50],
};

const GAIN_TABLES: Record<string, Record<Axis, [number, number, number]>> = {
  testbed: { roll: [3.3, 0.03, 23], pitch: [3.3, 0.03, 23], yaw: [6.8, 0.045, 0] },
  flight: { roll: [1.3, 0.03, 20], pitch: [1.3, 0.108, 12], yaw: [0.1, 0.01, 16] },
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function wsUrl(): string {
  const q = new URLSearchParams(location.search).get("ws");
  if (q) return q;
  return "ws://127.0.0.1:8765";
}

function main(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app");

  // --- layout ---------------------------------------------------------------
  const status = el("div", "status");
  const charts = el("div", "charts");
  const controls = el("div", "controls");
  root.append(status, charts, controls);

  const session = new Session(wsUrl(), { windowSeconds: 30 });

  const attitudeCharts = AXES.map((axis) => {
    const canvas = el("canvas", "chart");
    canvas.width = 760;
    canvas.height = 150;
    charts.append(canvas);
    return new StripChart(
      canvas,
      [
        { label: `${axis} true`, color: "#5ab4f0" },
        { label: "est", color: "#f08a5a" },
        { label: "setpoint", color: "#7fd18c", dashed: true },
      ],
      { yLabel: `${axis} [deg]`, windowSeconds: session.windowSeconds },
    );
  });

  const throttleCanvas = el("canvas", "chart chart-small");
  throttleCanvas.width = 374;
  throttleCanvas.height = 120;
  const servoCanvas = el("canvas", "chart chart-small");
  servoCanvas.width = 374;
  servoCanvas.height = 120;
  const strip = el("div", "strip");
  strip.append(throttleCanvas, servoCanvas);
  charts.append(strip);
  const throttleChart = new StripChart(
    throttleCanvas,
    [
      { label: "thr R", color: "#5ab4f0" },
      { label: "thr L", color: "#f08a5a" },
    ],
    { yLabel: "throttle", yMin: 0, yMax: 1, windowSeconds: session.windowSeconds },
  );
  const servoChart = new StripChart(
    servoCanvas,
    [
      { label: "srv R", color: "#5ab4f0" },
      { label: "srv L", color: "#f08a5a" },
    ],
    { yLabel: "servo [deg]", windowSeconds: session.windowSeconds },
  );

  // --- status bar -------------------------------------------------------------
  const connBadge = el("span", "badge");
  const tickLabel = el("span");
  const windLabel = el("span");
  const ackLabel = el("span", "ack");
  const errLabel = el("span", "error");
  status.append(connBadge, tickLabel, windLabel, ackLabel, errLabel);

  // --- gain panels ---------------------------------------------------------------
  const appliedLabels = new Map<string, HTMLElement>();
  const sliders = new Map<string, HTMLInputElement>();
  const numbers = new Map<string, HTMLInputElement>();

  for (const axis of AXES) {
    const panel = el("fieldset", "panel");
    panel.append(el("legend", "", `${axis} gains`));
    const applied = el("div", "applied", "applied: —");
    appliedLabels.set(axis, applied);
    panel.append(applied);
    for (const name of ["kp", "ki", "kd"] as const) {
      const row = el("div", "row");
      row.append(el("label", "", name));
      const slider = el("input") as HTMLInputElement;
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.001";
      const num = el("input", "num") as HTMLInputElement;
      num.type = "number";
      num.step = "any";
      num.min = "0";
      slider.addEventListener("input", () => {
        num.value = fromSlider(name, Number(slider.value)).toPrecision(3);
      });
      num.addEventListener("input", () => {
        slider.value = String(toSlider(name, Number(num.value)));
      });
      sliders.set(`${axis}.${name}`, slider);
      numbers.set(`${axis}.${name}`, num);
      row.append(slider, num);
      panel.append(row);
    }
    const apply = el("button", "", "apply");
    apply.addEventListener("click", () => {
      send({
        type: "set_gains",
        axis,
        kp: Number(numbers.get(`${axis}.kp`)!.value || "0"),
        ki: Number(numbers.get(`${axis}.ki`)!.value || "0"),
        kd: Number(numbers.get(`${axis}.kd`)!.value || "0"),
      });
    });
    panel.append(apply);
    controls.append(panel);
  }

  // --- presets, wind, setpoints, run control ------------------------------------
  const presetPanel = el("fieldset", "panel");
  presetPanel.append(el("legend", "", "gain tables"));
  for (const name of Object.keys(GAIN_TABLES)) {
    const b = el("button", "", name);
    b.addEventListener("click", () => {
      for (const axis of AXES) {
        const [kp, ki, kd] = GAIN_TABLES[name][axis];
        send({ type: "set_gains", axis, kp, ki, kd });
      }
    });
    presetPanel.append(b);
  }
  controls.append(presetPanel);

  const windPanel = el("fieldset", "panel");
  windPanel.append(el("legend", "", "wind [knots]"));
  for (const knots of [0, 8, 9, 10]) {
    const b = el("button", "", String(knots));
    b.addEventListener("click", () => send({ type: "set_wind", knots }));
    windPanel.append(b);
  }
  controls.append(windPanel);

  const spPanel = el("fieldset", "panel");
  spPanel.append(el("legend", "", "setpoints [deg]"));
  for (const axis of AXES) {
    const row = el("div", "row");
    row.append(el("label", "", axis));
    const num = el("input", "num") as HTMLInputElement;
    num.type = "number";
    num.step = "any";
    num.value = "0";
    const b = el("button", "", "set");
    b.addEventListener("click", () =>
      send({ type: "set_setpoint", axis, deg: Number(num.value || "0") }),
    );
    row.append(num, b);
    spPanel.append(row);
  }
  controls.append(spPanel);

  const runPanel = el("fieldset", "panel");
  runPanel.append(el("legend", "", "run"));
  for (const kind of ["pause", "resume", "reset"] as const) {
    const b = el("button", "", kind);
    b.addEventListener("click", () => send({ type: kind }));
    runPanel.append(b);
  }
  controls.append(runPanel);

  function send(cmd: Command): void {
    session.send(cmd);
  }

  // --- render loop -------------------------------------------------------------
  function render(): void {
    const snap = session.snapshot();
    connBadge.textContent = snap.connection;
    connBadge.dataset.state = snap.connection;
    tickLabel.textContent = ` tick ${snap.tick}  t=${snap.time.toFixed(2)}s` +
      (snap.paused ? " (paused)" : "") + (snap.done ? " (done)" : "");
    windLabel.textContent =
      snap.windKnots === null
        ? ""
        : `  wind ${snap.windKnots} kn (${(snap.windMps ?? 0).toFixed(2)} m/s)`;
    ackLabel.textContent = snap.lastAck
      ? `  ack: ${snap.lastAck.cmd}${snap.lastAck.axis ? " " + snap.lastAck.axis : ""} @ tick ${snap.lastAck.tick}`
      : "";
    errLabel.textContent = snap.lastError ? `  ${snap.lastError}` : "";

    if (snap.gains) {
      for (const axis of AXES) {
        const [kp, ki, kd] = snap.gains[axis];
        appliedLabels.get(axis)!.textContent =
          `applied: kp=${kp} ki=${ki} kd=${kd}`;
      }
    }

    const from = session.buffer.lastTime() - session.windowSeconds;
    const ch = session.buffer.channels;
    const markers = session.ackMarkers.map((a) => a.time);
    const axisChannels = [
      ["roll_true", "roll_est", "roll_sp"],
      ["pitch_true", "pitch_est", "pitch_sp"],
      ["yaw_true", "yaw_est", "yaw_sp"],
    ] as const;
    attitudeCharts.forEach((chart, i) => {
      chart.draw(
        axisChannels[i].map((name) => ch[name].window(from)),
        markers,
      );
    });
    throttleChart.draw([ch.thr_r.window(from), ch.thr_l.window(from)], markers);
    servoChart.draw([ch.srv_r.window(from), ch.srv_l.window(from)], markers);
    requestAnimationFrame(render);
  }

  session.connect();
  requestAnimationFrame(render);
}

function toSlider(name: string, value: number): number {
  const [lo, hi] = GAIN_RANGE[name];
  if (value <= 0) return 0;
  const x = (Math.log(value) - Math.log(lo)) / (Math.log(hi) - Math.log(lo));
  return Math.min(1, Math.max(0, x));
}

function fromSlider(name: string, x: number): number {
  const [lo, hi] = GAIN_RANGE[name];
  if (name === "kd" && x === 0) return 0;
  return Math.exp(Math.log(lo) + x * (Math.log(hi) - Math.log(lo)));
}

main();
