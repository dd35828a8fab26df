"""Telemetry server: one device stream per session, fan-out to viewers.

The server accepts line-delimited JSON connections (see wire.py). The first
message on a connection must be a ``hello`` fixing its role. Device samples
are validated, held behind the calibration gate, then run through the swing
detector; every completed swing is appended to the on-disk session log and
broadcast to all viewers of that session.

Concurrency model: a single asyncio event loop owns the session registry, so
registry access needs no extra locking. Each device's ingest path runs
sequentially inside its connection handler (the detector is single-owner).
Viewer fan-out goes through per-viewer bounded queues with a drop-oldest
policy, so a slow viewer can never stall the device path; drops are counted
and reported in that viewer's ``session_state`` messages.

Transports: TCP is the primary listener. An optional WebSocket listener
serves the identical protocol for browser viewers.
"""
from __future__ import annotations

import asyncio
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Awaitable, Callable

from . import wire
from .engine import DetectorConfig, SwingDetector
from .model import (
    CalibrationState,
    NonFiniteValue,
    PhysicalConfig,
    SampleError,
    SwingEvent,
    TimestampRegression,
    validate_sample,
)
from .sessions import CONDITIONS, SessionRecord
from .traceio import format_session

log = logging.getLogger("swingmeter.server")

SESSION_ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]{1,64}$")
DEFAULT_VIEWER_QUEUE_LIMIT = 256

SendLine = Callable[[str], Awaitable[None]]
RecvLine = Callable[[], Awaitable[str | None]]


class UnknownSession(KeyError):
    """No session with that id exists on this server."""


@dataclass
class ServerConfig:
    physical: PhysicalConfig = field(default_factory=PhysicalConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    data_dir: Path = Path("swingmeter-data")
    viewer_queue_limit: int = DEFAULT_VIEWER_QUEUE_LIMIT


class _Viewer:
    """Outbound side of one viewer connection: bounded queue plus drop count."""

    def __init__(self, limit: int):
        self.queue: asyncio.Queue[str] = asyncio.Queue(maxsize=limit)
        self.dropped = 0

    def enqueue(self, line: str) -> None:
        while True:
            try:
                self.queue.put_nowait(line)
                return
            except asyncio.QueueFull:
                try:
                    self.queue.get_nowait()
                    self.dropped += 1
                except asyncio.QueueEmpty:
                    pass


class _Session:
    def __init__(self, session_id: str, config: ServerConfig):
        self.session_id = session_id
        self.config = config
        self.state = wire.STATE_CALIBRATING
        self.calibration = CalibrationState()
        self.detector: SwingDetector | None = None
        self.device_connected = False
        self.participant_id = session_id
        self.condition = "baseline"
        self.prev_t_ms: int | None = None
        self.last_swing: SwingEvent | None = None
        self.swings: list[SwingEvent] = []
        self.viewers: list[_Viewer] = []

    @property
    def directory(self) -> Path:
        return self.config.data_dir / "sessions" / self.session_id

    def begin_run(self) -> None:
        """Reset per-run state when a device (re)attaches."""
        self.state = wire.STATE_CALIBRATING
        self.calibration = CalibrationState()
        self.detector = SwingDetector(self.config.detector, self.config.physical)
        self.prev_t_ms = None
        self.swings = []
        self.device_connected = True


class TelemetryServer:
    """Session registry plus protocol handling, independent of transport."""

    def __init__(self, config: ServerConfig | None = None):
        self.config = config or ServerConfig()
        self.sessions: dict[str, _Session] = {}
        self._tcp_server: asyncio.base_events.Server | None = None
        self._ws_server: Any = None
        self.port: int | None = None
        self.ws_port: int | None = None

    # -- public queries ----------------------------------------------------

    def latest_metrics(self, session_id: str) -> SwingEvent | None:
        """Most recent swing of a session, or None before the first swing."""
        if session_id not in self.sessions:
            raise UnknownSession(session_id)
        return self.sessions[session_id].last_swing

    # -- lifecycle ----------------------------------------------------------

    async def start(self, host: str = "127.0.0.1", port: int = 0, ws_port: int | None = None) -> None:
        self.config.data_dir.mkdir(parents=True, exist_ok=True)
        self._tcp_server = await asyncio.start_server(self._handle_tcp, host, port)
        self.port = self._tcp_server.sockets[0].getsockname()[1]
        if ws_port is not None:
            import websockets

            self._ws_server = await websockets.serve(self._handle_websocket, host, ws_port)
            self.ws_port = next(iter(self._ws_server.sockets)).getsockname()[1]
        log.info("listening tcp=%s ws=%s", self.port, self.ws_port)

    async def stop(self) -> None:
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._ws_server is not None:
            self._ws_server.close()
            await self._ws_server.wait_closed()

    # -- transport adapters --------------------------------------------------

    async def _handle_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        async def recv() -> str | None:
            data = await reader.readline()
            if not data:
                return None
            return data.decode("utf-8", errors="replace")

        async def send(line: str) -> None:
            writer.write(line.encode("utf-8"))
            await writer.drain()

        try:
            await self.handle_peer(recv, send)
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            writer.close()
            try:
                await writer.wait_closed()
            except (ConnectionError, OSError):
                pass

    async def _handle_websocket(self, websocket: Any) -> None:
        async def recv() -> str | None:
            try:
                message = await websocket.recv()
            except Exception:
                return None
            if isinstance(message, bytes):
                message = message.decode("utf-8", errors="replace")
            return message + "\n" if not message.endswith("\n") else message

        async def send(line: str) -> None:
            await websocket.send(line.rstrip("\n"))

        await self.handle_peer(recv, send)

    # -- protocol core --------------------------------------------------------

    async def handle_peer(self, recv: RecvLine, send: SendLine) -> None:
        """Serve one connection (any transport) until it closes."""
        first = await recv()
        if first is None:
            return
        try:
            hello = wire.decode_line(first)
        except wire.WireError as exc:
            await send(wire.encode_line(wire.error_message("", wire.ERR_BAD_HANDSHAKE, str(exc))))
            return
        session_id = str(hello.get("session_id", ""))
        if hello.get("kind") != wire.KIND_HELLO:
            await send(
                wire.encode_line(
                    wire.error_message(session_id, wire.ERR_BAD_HANDSHAKE, "first message must be hello")
                )
            )
            return
        role = hello.get("role")
        if role not in (wire.ROLE_DEVICE, wire.ROLE_VIEWER):
            await send(
                wire.encode_line(
                    wire.error_message(session_id, wire.ERR_BAD_HANDSHAKE, f"unknown role {role!r}")
                )
            )
            return
        if not SESSION_ID_PATTERN.match(session_id):
            await send(
                wire.encode_line(
                    wire.error_message(session_id, wire.ERR_BAD_HANDSHAKE, "invalid session_id")
                )
            )
            return

        session = self.sessions.get(session_id)
        if session is None:
            session = _Session(session_id, self.config)
            self.sessions[session_id] = session

        if role == wire.ROLE_DEVICE:
            await self._serve_device(session, hello, recv, send)
        else:
            await self._serve_viewer(session, recv, send)

    async def _serve_device(
        self, session: _Session, hello: dict[str, Any], recv: RecvLine, send: SendLine
    ) -> None:
        if session.device_connected:
            await send(
                wire.encode_line(
                    wire.error_message(
                        session.session_id, wire.ERR_SECOND_DEVICE, "session already has a device"
                    )
                )
            )
            return
        participant = hello.get("participant_id")
        if isinstance(participant, str) and participant:
            session.participant_id = participant
        condition = hello.get("condition")
        if isinstance(condition, str) and condition in CONDITIONS:
            session.condition = condition
        session.begin_run()
        self._broadcast_state(session)
        await send(wire.encode_line(wire.session_state_message(session.session_id, session.state)))
        try:
            while True:
                line = await recv()
                if line is None:
                    break
                await self._device_message(session, line, send)
        finally:
            self._end_run(session)

    async def _device_message(self, session: _Session, line: str, send: SendLine) -> None:
        sid = session.session_id
        try:
            message = wire.decode_line(line)
        except wire.WireError as exc:
            await send(wire.encode_line(wire.error_message(sid, wire.ERR_BAD_MESSAGE, str(exc))))
            return
        kind = message.get("kind")
        if kind == wire.KIND_SAMPLE:
            try:
                sample = wire.sample_from_message(message)
                validate_sample(sample, session.prev_t_ms)
            except (wire.WireError, SampleError) as exc:
                code = wire.ERR_BAD_MESSAGE
                if isinstance(exc, NonFiniteValue):
                    code = wire.ERR_NON_FINITE
                elif isinstance(exc, TimestampRegression):
                    code = wire.ERR_TIMESTAMP_REGRESSION
                await send(wire.encode_line(wire.error_message(sid, code, str(exc))))
                return
            session.prev_t_ms = sample.t_ms
            if session.state == wire.STATE_LIVE:
                for event in session.detector.push(sample):
                    self._emit_swing(session, event)
        elif kind == wire.KIND_CALIBRATION:
            try:
                session.calibration = wire.calibration_from_message(message)
            except wire.WireError as exc:
                await send(wire.encode_line(wire.error_message(sid, wire.ERR_BAD_MESSAGE, str(exc))))
                return
            if session.calibration.fully_calibrated and session.state == wire.STATE_CALIBRATING:
                session.state = wire.STATE_LIVE
                self._broadcast_state(session)
        elif kind == wire.KIND_HELLO:
            await send(
                wire.encode_line(
                    wire.error_message(sid, wire.ERR_BAD_MESSAGE, "connection already has a role")
                )
            )
        else:
            await send(
                wire.encode_line(
                    wire.error_message(sid, wire.ERR_UNKNOWN_KIND, f"unknown kind {kind!r}")
                )
            )

    def _end_run(self, session: _Session) -> None:
        if session.state == wire.STATE_LIVE and session.detector is not None:
            for event in session.detector.finish():
                self._emit_swing(session, event)
        session.device_connected = False
        session.state = wire.STATE_ENDED
        self._broadcast_state(session)
        self._write_session_document(session)

    async def _serve_viewer(self, session: _Session, recv: RecvLine, send: SendLine) -> None:
        viewer = _Viewer(self.config.viewer_queue_limit)
        session.viewers.append(viewer)
        viewer.enqueue(
            wire.encode_line(
                wire.session_state_message(session.session_id, session.state, viewer.dropped)
            )
        )
        if session.last_swing is not None:
            viewer.enqueue(wire.encode_line(wire.swing_message(session.session_id, session.last_swing)))

        async def pump() -> None:
            while True:
                line = await viewer.queue.get()
                await send(line)

        pump_task = asyncio.create_task(pump())
        try:
            while True:
                line = await recv()
                if line is None:
                    break
                if not line.strip():
                    continue
                try:
                    message = wire.decode_line(line)
                    kind = message.get("kind")
                except wire.WireError:
                    kind = None
                viewer.enqueue(
                    wire.encode_line(
                        wire.error_message(
                            session.session_id, wire.ERR_UNKNOWN_KIND, f"unexpected message {kind!r}"
                        )
                    )
                )
        finally:
            session.viewers.remove(viewer)
            pump_task.cancel()
            try:
                await pump_task
            except (asyncio.CancelledError, ConnectionError, OSError):
                pass

    # -- swing fan-out and persistence -----------------------------------------

    def _emit_swing(self, session: _Session, event: SwingEvent) -> None:
        session.last_swing = event
        session.swings.append(event)
        line = wire.encode_line(wire.swing_message(session.session_id, event))
        self._append_swing_log(session, line)
        for viewer in session.viewers:
            viewer.enqueue(line)

    def _broadcast_state(self, session: _Session) -> None:
        for viewer in session.viewers:
            viewer.enqueue(
                wire.encode_line(
                    wire.session_state_message(session.session_id, session.state, viewer.dropped)
                )
            )

    def _append_swing_log(self, session: _Session, line: str) -> None:
        session.directory.mkdir(parents=True, exist_ok=True)
        with (session.directory / "swings.log").open("a") as handle:
            handle.write(line)

    def _write_session_document(self, session: _Session) -> None:
        record = SessionRecord(
            participant_id=session.participant_id,
            condition=session.condition,
            swings=tuple((event, None) for event in session.swings),
        )
        session.directory.mkdir(parents=True, exist_ok=True)
        (session.directory / "session.txt").write_text(format_session(record))


async def run_server(
    config: ServerConfig,
    host: str = "0.0.0.0",
    port: int = 7350,
    ws_port: int | None = None,
    ready: Callable[[TelemetryServer], None] | None = None,
) -> None:
    """Start a server and block until cancelled."""
    server = TelemetryServer(config)
    await server.start(host=host, port=port, ws_port=ws_port)
    if ready is not None:
        ready(server)
    try:
        await asyncio.Event().wait()
    finally:
        await server.stop()
