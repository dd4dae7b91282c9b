"""Live telemetry endpoint for the operator console.

The interactive session runs the paced tick loop in one thread; clients
attach over a local socket and exchange newline-delimited JSON messages:

  outbound  {"type": "config", ...}      once, on connect
  outbound  {"type": "telemetry", ...}   every `decimation` ticks
  inbound   {"type": "command", ...}     gripper_target_delta | joint_jog | marker

Two transports carry the same messages: a raw TCP socket (NDJSON) and a
WebSocket endpoint for the browser console. Snapshots are dropped when a
client falls behind; commands are never dropped.
"""

from __future__ import annotations

import json
import queue
import socketserver
import threading
from dataclasses import dataclass, field
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from typing import List, Optional

from websockets.sync.server import serve as ws_serve

from .config import SessionConfig
from .joints import GRIPPER
from .loop import TickRecord
from .rti import fill_ratio
from .session import SCHEMA_VERSION, run_session

_SNAPSHOT_QUEUE_SIZE = 64


class TelemetryHub:
    """Fans telemetry out to subscribers and funnels commands in.

    Publishing never blocks: if a subscriber queue is full, its oldest
    snapshot is discarded. Command order is preserved.
    """

    def __init__(self):
        self.commands: "queue.Queue[dict]" = queue.Queue()
        self._subscribers: List["queue.Queue[dict]"] = []
        self._lock = threading.Lock()

    def subscribe(self) -> "queue.Queue[dict]":
        q: "queue.Queue[dict]" = queue.Queue(maxsize=_SNAPSHOT_QUEUE_SIZE)
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def publish(self, message: dict) -> None:
        with self._lock:
            subscribers = list(self._subscribers)
        for q in subscribers:
            while True:
                try:
                    q.put_nowait(message)
                    break
                except queue.Full:
                    try:
                        q.get_nowait()
                    except queue.Empty:
                        pass

    def submit_command(self, message: dict) -> None:
        self.commands.put(message)


def config_message(config: SessionConfig) -> dict:
    """Hello message: everything the console needs to draw the band without
    re-deriving any of the indicator math client-side."""
    r = config.rti
    return {
        "type": "config",
        "schema_version": SCHEMA_VERSION,
        "dt": 0.001,
        "decimation": config.telemetry.decimation,
        "band": {
            "t_min": r.t_min,
            "t_max": r.t_max,
            "t_low": r.t_low,
            "t_high": r.t_high,
            "t_opt": r.t_opt,
            "low_fill": fill_ratio(r.t_low, r),
            "high_fill": fill_ratio(r.t_high, r),
        },
        "colors": {"low": list(r.c_low), "opt": list(r.c_opt), "high": list(r.c_high)},
    }


def telemetry_message(record: TickRecord, grip_target: float) -> dict:
    return {
        "type": "telemetry",
        "t": record.t_us / 1e6,
        "tick": record.tick,
        "tau_hat_j4": record.follower.tau_hat[GRIPPER],
        "fill": record.indicator.fill_percent,
        "color": list(record.indicator.color),
        "zone": record.indicator.zone.value,
        "angles": {
            "leader": list(record.leader.angle),
            "follower": list(record.follower.angle),
        },
        "grip_target": grip_target,
    }


def parse_command(line: str) -> Optional[dict]:
    """Validate one inbound message; returns the command payload or None."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError:
        return None
    if not isinstance(msg, dict) or msg.get("type") != "command":
        return None
    if "gripper_target_delta" in msg:
        try:
            return {"gripper_target_delta": float(msg["gripper_target_delta"])}
        except (TypeError, ValueError):
            return None
    if "joint_jog" in msg:
        jog = msg["joint_jog"]
        try:
            return {"joint_jog": {"joint": int(jog["joint"]), "delta": float(jog["delta"])}}
        except (TypeError, ValueError, KeyError):
            return None
    if "marker" in msg:
        return {"marker": str(msg["marker"])}
    return None


class _NdjsonHandler(socketserver.StreamRequestHandler):
    def handle(self):
        hub: TelemetryHub = self.server.hub  # type: ignore[attr-defined]
        hello: dict = self.server.hello      # type: ignore[attr-defined]
        sub = hub.subscribe()
        stop = threading.Event()

        def writer():
            try:
                self.wfile.write((json.dumps(hello, separators=(",", ":")) + "\n").encode())
                while not stop.is_set():
                    try:
                        msg = sub.get(timeout=0.25)
                    except queue.Empty:
                        continue
                    self.wfile.write((json.dumps(msg, separators=(",", ":")) + "\n").encode())
            except (BrokenPipeError, ConnectionResetError, OSError):
                pass
            finally:
                stop.set()

        thread = threading.Thread(target=writer, daemon=True)
        thread.start()
        try:
            for raw in self.rfile:
                cmd = parse_command(raw.decode("utf-8", errors="replace"))
                if cmd is not None:
                    hub.submit_command(cmd)
                if stop.is_set():
                    break
        except (ConnectionResetError, OSError):
            pass
        finally:
            stop.set()
            hub.unsubscribe(sub)


class NdjsonTelemetryServer:
    """Raw TCP transport: one JSON message per line."""

    def __init__(self, hub: TelemetryHub, hello: dict, host: str, port: int):
        class _Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = _Server((host, port), _NdjsonHandler)
        self._server.hub = hub        # type: ignore[attr-defined]
        self._server.hello = hello    # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    def start(self):
        self._thread.start()

    def stop(self):
        self._server.shutdown()
        self._server.server_close()


class WsTelemetryServer:
    """WebSocket transport for the browser console; same messages."""

    def __init__(self, hub: TelemetryHub, hello: dict, host: str, port: int):
        self.hub = hub
        self.hello = hello
        self._server = ws_serve(self._handle, host, port)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def port(self) -> int:
        return self._server.socket.getsockname()[1]

    def _handle(self, websocket):
        hub = self.hub
        sub = hub.subscribe()
        stop = threading.Event()

        def writer():
            try:
                websocket.send(json.dumps(self.hello, separators=(",", ":")))
                while not stop.is_set():
                    try:
                        msg = sub.get(timeout=0.25)
                    except queue.Empty:
                        continue
                    websocket.send(json.dumps(msg, separators=(",", ":")))
            except Exception:
                pass
            finally:
                stop.set()

        thread = threading.Thread(target=writer, daemon=True)
        thread.start()
        try:
            for raw in websocket:
                cmd = parse_command(raw if isinstance(raw, str) else raw.decode())
                if cmd is not None:
                    hub.submit_command(cmd)
        except Exception:
            pass
        finally:
            stop.set()
            hub.unsubscribe(sub)

    def start(self):
        self._thread.start()

    def stop(self):
        self._server.shutdown()


@dataclass
class ServeHandles:
    """Running interactive session plus its attached transports."""

    hub: TelemetryHub
    ndjson: Optional[NdjsonTelemetryServer]
    ws: Optional[WsTelemetryServer]
    static: Optional[ThreadingHTTPServer] = None
    stop_event: threading.Event = field(default_factory=threading.Event)
    operator: object = None

    @property
    def ndjson_port(self) -> Optional[int]:
        return self.ndjson.port if self.ndjson else None

    @property
    def ws_port(self) -> Optional[int]:
        return self.ws.port if self.ws else None

    def stop(self):
        self.stop_event.set()

    def close(self):
        self.stop_event.set()
        if self.ndjson:
            self.ndjson.stop()
        if self.ws:
            self.ws.stop()
        if self.static:
            self.static.shutdown()
            self.static.server_close()


def start_transports(config: SessionConfig, hub: TelemetryHub,
                     enable_ndjson: bool = True, enable_ws: bool = True,
                     console_dir: Optional[str] = None,
                     http_port: int = 8000) -> ServeHandles:
    hello = config_message(config)
    tcfg = config.telemetry
    ndjson = None
    if enable_ndjson:
        ndjson = NdjsonTelemetryServer(hub, hello, tcfg.host, tcfg.port)
        ndjson.start()
    ws = None
    if enable_ws:
        ws = WsTelemetryServer(hub, hello, tcfg.host, tcfg.ws_port)
        ws.start()
    static = None
    if console_dir:
        handler = partial(SimpleHTTPRequestHandler, directory=console_dir)
        static = ThreadingHTTPServer((tcfg.host, http_port), handler)
        threading.Thread(target=static.serve_forever, daemon=True).start()
    return ServeHandles(hub=hub, ndjson=ndjson, ws=ws, static=static)


def serve_session(config: SessionConfig, out_path: Optional[str] = None,
                  realtime: bool = True,
                  enable_ndjson: bool = True, enable_ws: bool = True,
                  console_dir: Optional[str] = None, http_port: int = 8000,
                  handles_ready=None):
    """Run one session with the telemetry endpoint attached.

    Blocks until the session ends or handles.stop() is called. If
    handles_ready is given it is called with the ServeHandles before the
    loop starts (used by tests and by the CLI to print the ports).
    """
    hub = TelemetryHub()
    handles = start_transports(config, hub, enable_ndjson, enable_ws,
                               console_dir, http_port)
    from .session import build_operator
    operator = build_operator(config, command_queue=hub.commands)
    handles.operator = operator
    decimation = config.telemetry.decimation

    def on_record(record: TickRecord):
        if record.tick % decimation == 0:
            grip_target = getattr(operator, "grip_target", 0.0)
            hub.publish(telemetry_message(record, grip_target))

    if handles_ready is not None:
        handles_ready(handles)
    try:
        result = run_session(
            config, out_path=out_path, realtime=realtime, operator=operator,
            on_record=on_record, should_stop=handles.stop_event.is_set,
        )
    finally:
        handles.close()
    return result
