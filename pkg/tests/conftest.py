"""Shared test harness: a background telemetry server and a blocking line client."""
from __future__ import annotations

import asyncio
import json
import socket
import threading
from pathlib import Path

import pytest

from swingmeter.engine import DetectorConfig
from swingmeter.model import PhysicalConfig
from swingmeter.server import ServerConfig, TelemetryServer


class ServerHarness:
    """Runs a TelemetryServer on its own event loop thread."""

    def __init__(self, data_dir: Path, ws: bool = False, **config_kwargs):
        self.config = ServerConfig(data_dir=data_dir, **config_kwargs)
        self.server: TelemetryServer | None = None
        self.loop = asyncio.new_event_loop()
        self._started = threading.Event()
        self._thread = threading.Thread(target=self._run, args=(ws,), daemon=True)
        self._thread.start()
        if not self._started.wait(timeout=10):
            raise RuntimeError("server failed to start")

    def _run(self, ws: bool) -> None:
        asyncio.set_event_loop(self.loop)

        async def boot() -> None:
            self.server = TelemetryServer(self.config)
            await self.server.start(host="127.0.0.1", port=0, ws_port=0 if ws else None)
            self._started.set()

        self.loop.run_until_complete(boot())
        self.loop.run_forever()

    @property
    def port(self) -> int:
        return self.server.port

    @property
    def ws_port(self) -> int | None:
        return self.server.ws_port

    def stop(self) -> None:
        async def shutdown() -> None:
            await self.server.stop()
            current = asyncio.current_task()
            pending = [t for t in asyncio.all_tasks() if t is not current]
            for task in pending:
                task.cancel()
            await asyncio.gather(*pending, return_exceptions=True)
            self.loop.stop()

        asyncio.run_coroutine_threadsafe(shutdown(), self.loop)
        self._thread.join(timeout=10)
        if not self.loop.is_closed():
            self.loop.close()


class LineClient:
    """Blocking newline-delimited JSON client for protocol tests."""

    def __init__(self, port: int, timeout: float = 5.0):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=timeout)
        self.sock.settimeout(timeout)
        self._out = self.sock.makefile("w", encoding="utf-8", newline="")
        self._in = self.sock.makefile("r", encoding="utf-8")

    def send(self, message: dict) -> None:
        self._out.write(json.dumps(message) + "\n")
        self._out.flush()

    def recv(self, timeout: float | None = None) -> dict | None:
        """Next message, or None on timeout/EOF."""
        if timeout is not None:
            self.sock.settimeout(timeout)
        try:
            line = self._in.readline()
        except (socket.timeout, TimeoutError):
            return None
        if not line:
            return None
        return json.loads(line)

    def recv_until(self, kind: str, timeout: float = 5.0, limit: int = 1000) -> dict | None:
        for _ in range(limit):
            message = self.recv(timeout)
            if message is None or message.get("kind") == kind:
                return message
        return None

    def close_write(self) -> None:
        self._out.flush()
        self.sock.shutdown(socket.SHUT_WR)

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


@pytest.fixture
def harness(tmp_path):
    server = ServerHarness(tmp_path / "data")
    yield server
    server.stop()


@pytest.fixture
def physical() -> PhysicalConfig:
    return PhysicalConfig()


@pytest.fixture
def detector() -> DetectorConfig:
    return DetectorConfig()
