"""Serve-mode protocol: acks, effect ticks, live state reflection."""
import asyncio
import json
import socket
from dataclasses import replace

from websockets.asyncio.client import connect

from bicoptersim.scenario import presets
from bicoptersim.serve import run_server
from bicoptersim.wind import WindSpec


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def gustless(name: str = "testbed-8kn"):
    s = presets()[name]
    return replace(s, wind=replace(s.wind, gust_std=0.0))


async def next_of_type(ws, kind: str) -> dict:
    while True:
        msg = json.loads(await asyncio.wait_for(ws.recv(), 10))
        if msg["type"] == kind:
            return msg


def run(coro):
    asyncio.run(asyncio.wait_for(coro, 60))


async def with_session(scenario, fn, decimation=10):
    ready = asyncio.Event()
    port = free_port()
    server = asyncio.create_task(
        run_server(scenario, port=port, decimation=decimation, realtime=False, ready=ready)
    )
    try:
        await asyncio.wait_for(ready.wait(), 10)
        async with connect(f"ws://127.0.0.1:{port}", close_timeout=0.2) as ws:
            await fn(ws)
    finally:
        server.cancel()


def test_telemetry_frames_flow():
    async def fn(ws):
        frame = await next_of_type(ws, "telemetry")
        assert {"k", "t", "true", "est", "sp", "gains", "wind_mps", "paused"} <= frame.keys()
        nxt = await next_of_type(ws, "telemetry")
        assert nxt["k"] > frame["k"]

    run(with_session(gustless(), fn))


def test_set_wind_acked_and_reflected():
    async def fn(ws):
        await next_of_type(ws, "telemetry")
        await ws.send(json.dumps({"type": "set_wind", "knots": 10}))
        ack = await next_of_type(ws, "ack")
        assert ack["cmd"] == "set_wind"
        assert ack["tick"] <= ack["received_tick"] + 1
        while True:
            frame = await next_of_type(ws, "telemetry")
            if frame["k"] >= ack["tick"]:
                break
        assert abs(frame["wind_mps"] - 5.14444) < 1e-3
        assert frame["wind_knots"] == 10

    run(with_session(gustless(), fn))


def test_set_gains_acked_and_reflected():
    async def fn(ws):
        await next_of_type(ws, "telemetry")
        await ws.send(
            json.dumps({"type": "set_gains", "axis": "roll", "kp": 1.3, "ki": 0.03, "kd": 20})
        )
        ack = await next_of_type(ws, "ack")
        assert ack["tick"] <= ack["received_tick"] + 1
        assert ack["applied"] == [1.3, 0.03, 20]
        while True:
            frame = await next_of_type(ws, "telemetry")
            if frame["k"] >= ack["tick"]:
                break
        assert frame["gains"]["roll"] == [1.3, 0.03, 20]

    run(with_session(gustless(), fn))


def test_pause_freezes_tick_and_resume_continues():
    async def fn(ws):
        await next_of_type(ws, "telemetry")
        await ws.send(json.dumps({"type": "pause"}))
        await next_of_type(ws, "ack")
        ticks = set()
        paused_seen = False
        for _ in range(3):
            frame = await next_of_type(ws, "telemetry")
            ticks.add(frame["k"])
            paused_seen = paused_seen or frame["paused"]
        assert len(ticks) == 1
        assert paused_seen
        await ws.send(json.dumps({"type": "resume"}))
        await next_of_type(ws, "ack")
        a = await next_of_type(ws, "telemetry")
        while a["paused"]:
            a = await next_of_type(ws, "telemetry")
        b = await next_of_type(ws, "telemetry")
        assert b["k"] > a["k"]

    run(with_session(gustless(), fn))


def test_setpoint_command():
    async def fn(ws):
        await next_of_type(ws, "telemetry")
        await ws.send(json.dumps({"type": "set_setpoint", "axis": "pitch", "deg": -3.0}))
        ack = await next_of_type(ws, "ack")
        while True:
            frame = await next_of_type(ws, "telemetry")
            if frame["k"] >= ack["tick"]:
                break
        assert abs(frame["sp"]["pitch"] - (-3.0)) < 1e-12

    run(with_session(gustless(), fn))


def test_malformed_message_gets_error_and_session_survives():
    async def fn(ws):
        await next_of_type(ws, "telemetry")
        await ws.send("this is not json")
        err = await next_of_type(ws, "error")
        assert "message" in err
        await ws.send(json.dumps({"type": "set_wind", "knots": -5}))
        err = await next_of_type(ws, "error")
        assert ">= 0" in err["message"]
        # still alive
        await ws.send(json.dumps({"type": "pause"}))
        await next_of_type(ws, "ack")

    run(with_session(gustless(), fn))


def test_reset_rewinds_to_tick_zero():
    async def fn(ws):
        frame = await next_of_type(ws, "telemetry")
        assert frame["k"] >= 0
        await ws.send(json.dumps({"type": "reset"}))
        ack = await next_of_type(ws, "ack")
        assert ack["cmd"] == "reset" and ack["tick"] == 0

    run(with_session(gustless(), fn))
