"""Live simulation server for the tuning dashboard.

Speaks JSON over a websocket. Outbound messages are ``telemetry`` frames
(one every ``decimation`` ticks, plus heartbeats while paused) carrying the
full applied state: attitude truth/estimate, setpoints, actuator commands,
wind and the current gain table. Inbound commands:

    {"type": "set_gains", "axis": "roll", "kp": .., "ki": .., "kd": ..}
    {"type": "set_wind", "knots": ..}
    {"type": "set_setpoint", "axis": "roll"|"pitch"|"yaw", "deg": ..}
    {"type": "set_setpoint", "axis": "altitude", "m": ..}
    {"type": "pause"} {"type": "resume"} {"type": "reset"}

Every command is acknowledged with the tick at which it takes effect
(commands are applied atomically between ticks, FIFO, so the effect tick is
at most one past the receipt tick). Malformed commands get an ``error``
reply and the session continues. Real-time mode paces the loop at the
scenario period with drift correction; fast mode runs unpaced.
"""
from __future__ import annotations

import asyncio
import json
import math
from dataclasses import dataclass, field
from typing import Any

from websockets.asyncio.server import ServerConnection, serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .control import AXES, PidGains
from .scenario import Scenario, Simulation, TelemetryRecord

HEARTBEAT_S = 0.2
FAST_BATCH = 200


@dataclass
class ServeSession:
    """One simulation shared by all connected clients."""

    scenario: Scenario
    decimation: int = 10
    realtime: bool = True
    sim: Simulation = field(init=False)
    paused: bool = False
    done: bool = False

    def __post_init__(self) -> None:
        if self.decimation < 1:
            raise ValueError("decimation must be >= 1")
        self.sim = Simulation(self.scenario)
        self._clients: set[ServerConnection] = set()
        self._commands: asyncio.Queue = asyncio.Queue()
        self._last_record: TelemetryRecord | None = None

    # -- websocket side -----------------------------------------------------

    async def handler(self, ws: ServerConnection) -> None:
        self._clients.add(ws)
        try:
            if self._last_record is not None:
                await ws.send(self._frame(self._last_record))
            async for raw in ws:
                await self._commands.put((ws, raw, self.sim.k))
        except ConnectionClosed:
            pass
        finally:
            self._clients.discard(ws)

    async def _broadcast(self, payload: str) -> None:
        dead = []
        for ws in self._clients:
            try:
                await ws.send(payload)
            except ConnectionClosed:
                dead.append(ws)
        for ws in dead:
            self._clients.discard(ws)

    async def _reply(self, ws: ServerConnection, payload: dict) -> None:
        try:
            await ws.send(json.dumps(payload))
        except ConnectionClosed:
            self._clients.discard(ws)

    # -- command handling ---------------------------------------------------

    async def _drain_commands(self) -> None:
        while not self._commands.empty():
            ws, raw, received_tick = self._commands.get_nowait()
            try:
                reply = self._apply(json.loads(raw))
            except (ValueError, KeyError, TypeError) as exc:
                await self._reply(ws, {"type": "error", "message": str(exc)})
                continue
            reply.update({"received_tick": received_tick, "tick": self.sim.k})
            await self._reply(ws, reply)

    def _apply(self, msg: Any) -> dict:
        if not isinstance(msg, dict) or "type" not in msg:
            raise ValueError("command must be an object with a 'type' field")
        kind = msg["type"]
        if kind == "set_gains":
            axis = msg["axis"]
            if axis not in AXES:
                raise ValueError(f"unknown axis {axis!r}")
            gains = PidGains(float(msg["kp"]), float(msg["ki"]), float(msg["kd"]))
            self.sim.controller.set_gains(axis, gains, reset=bool(msg.get("reset", False)))
            return {"type": "ack", "cmd": kind, "axis": axis,
                    "applied": [gains.kp, gains.ki, gains.kd]}
        if kind == "set_wind":
            knots = float(msg["knots"])
            if knots < 0.0:
                raise ValueError("wind speed must be >= 0")
            self.sim.wind.set_speed_knots(knots)
            return {"type": "ack", "cmd": kind, "applied": knots}
        if kind == "set_setpoint":
            axis = msg["axis"]
            if axis in ("roll", "pitch", "yaw"):
                value = math.radians(float(msg["deg"]))
            elif axis == "altitude":
                value = float(msg["m"])
            else:
                raise ValueError(f"unknown axis {axis!r}")
            self.sim.controller.set_setpoints(**{axis: value})
            return {"type": "ack", "cmd": kind, "axis": axis, "applied": msg.get("deg", msg.get("m"))}
        if kind == "pause":
            self.paused = True
            return {"type": "ack", "cmd": kind, "applied": True}
        if kind == "resume":
            self.paused = False
            return {"type": "ack", "cmd": kind, "applied": True}
        if kind == "reset":
            self.sim.reset()
            self.done = False
            self._last_record = None
            return {"type": "ack", "cmd": kind, "applied": True}
        raise ValueError(f"unknown command type {kind!r}")

    # -- frames ---------------------------------------------------------------

    def _frame(self, r: TelemetryRecord) -> str:
        ctl = self.sim.controller
        sp = ctl.setpoints
        gains = {
            axis: [g.kp, g.ki, g.kd]
            for axis, g in ctl.gains.items()
            if axis in ("roll", "pitch", "yaw")
        }
        return json.dumps(
            {
                "type": "telemetry",
                "k": r.k,
                "t": r.t,
                "true": {"roll": r.phi_true, "pitch": r.theta_true, "yaw": r.psi_true},
                "est": {"roll": r.phi_est, "pitch": r.theta_est, "yaw": r.psi_est},
                "sp": {
                    "roll": r.phi_sp,
                    "pitch": r.theta_sp,
                    "yaw": r.psi_sp,
                    "altitude": sp.altitude,
                },
                "u": {"roll": r.u_roll, "pitch": r.u_pitch, "yaw": r.u_yaw, "alt": r.u_alt},
                "throttle": [r.thr_r, r.thr_l],
                "servo_deg": [r.srv_r, r.srv_l],
                "wind_mps": r.wind_mps,
                "wind_knots": self.sim.wind.spec.speed_knots,
                "sat_flags": r.sat_flags,
                "paused": self.paused,
                "done": self.done,
                "gains": gains,
            }
        )

    # -- main loop ------------------------------------------------------------

    async def run(self) -> None:
        total = self.scenario.n_ticks()
        dt = self.scenario.dt
        loop = asyncio.get_running_loop()
        anchor_wall = loop.time()
        anchor_tick = self.sim.k
        while True:
            await self._drain_commands()
            if self.paused or self.done:
                if self._last_record is not None:
                    await self._broadcast(self._frame(self._last_record))
                await asyncio.sleep(HEARTBEAT_S)
                anchor_wall = loop.time()
                anchor_tick = self.sim.k
                continue
            record = self.sim.tick()
            self._last_record = record
            if record.k % self.decimation == 0:
                await self._broadcast(self._frame(record))
            if self.sim.k >= total:
                self.done = True
                await self._broadcast(self._frame(record))
                continue
            if self.realtime:
                target = anchor_wall + (self.sim.k - anchor_tick) * dt
                delay = target - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                elif delay < -1.0:
                    # fell badly behind (e.g. suspended): re-anchor
                    anchor_wall = loop.time()
                    anchor_tick = self.sim.k
            elif self.sim.k % FAST_BATCH == 0:
                await asyncio.sleep(0)


async def run_server(
    scenario: Scenario,
    port: int,
    host: str = "127.0.0.1",
    decimation: int = 10,
    realtime: bool = True,
    ready: asyncio.Event | None = None,
) -> None:
    """Serve one live session until cancelled."""
    session = ServeSession(scenario, decimation=decimation, realtime=realtime)
    async with ws_serve(session.handler, host, port):
        if ready is not None:
            ready.set()
        await session.run()
