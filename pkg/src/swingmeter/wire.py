"""Line-delimited JSON message schema spoken between devices, server, viewers.

One JSON object per line. Every message carries ``kind`` and ``session_id``.
See docs/PROTOCOL.md for the message-by-message reference with examples.
"""
from __future__ import annotations

import json
from typing import Any

from .model import CalibrationState, ImuSample, SwingEvent

KIND_HELLO = "hello"
KIND_SAMPLE = "sample"
KIND_CALIBRATION = "calibration"
KIND_SWING = "swing"
KIND_SESSION_STATE = "session_state"
KIND_ERROR = "error"

ROLE_DEVICE = "device"
ROLE_VIEWER = "viewer"

STATE_CALIBRATING = "calibrating"
STATE_LIVE = "live"
STATE_ENDED = "ended"

ERR_BAD_HANDSHAKE = "BadHandshake"
ERR_SECOND_DEVICE = "SecondDevice"
ERR_UNKNOWN_KIND = "UnknownKind"
ERR_BAD_MESSAGE = "BadMessage"
ERR_NON_FINITE = "NonFiniteValue"
ERR_TIMESTAMP_REGRESSION = "TimestampRegression"


class WireError(ValueError):
    """A line could not be decoded into a protocol message."""


def encode_line(message: dict[str, Any]) -> str:
    return json.dumps(message, separators=(",", ":")) + "\n"


def decode_line(line: str) -> dict[str, Any]:
    try:
        message = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireError(f"not valid JSON: {exc}") from exc
    if not isinstance(message, dict):
        raise WireError("message must be a JSON object")
    if "kind" not in message:
        raise WireError("message missing 'kind'")
    if "session_id" not in message:
        raise WireError("message missing 'session_id'")
    return message


def hello(role: str, session_id: str, **extra: Any) -> dict[str, Any]:
    return {"kind": KIND_HELLO, "session_id": session_id, "role": role, **extra}


def sample_message(session_id: str, sample: ImuSample) -> dict[str, Any]:
    message: dict[str, Any] = {
        "kind": KIND_SAMPLE,
        "session_id": session_id,
        "t_ms": sample.t_ms,
        "gyro_x": sample.gyro_x,
        "gyro_y": sample.gyro_y,
        "gyro_z": sample.gyro_z,
    }
    if sample.accel is not None:
        message["ax"], message["ay"], message["az"] = sample.accel
    return message


def sample_from_message(message: dict[str, Any]) -> ImuSample:
    try:
        accel = None
        if "ax" in message:
            accel = (float(message["ax"]), float(message["ay"]), float(message["az"]))
        return ImuSample(
            t_ms=int(message["t_ms"]),
            gyro_x=float(message["gyro_x"]),
            gyro_y=float(message["gyro_y"]),
            gyro_z=float(message["gyro_z"]),
            accel=accel,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise WireError(f"bad sample message: {exc}") from exc


def calibration_message(session_id: str, state: CalibrationState) -> dict[str, Any]:
    return {
        "kind": KIND_CALIBRATION,
        "session_id": session_id,
        "system": state.system,
        "gyro": state.gyro,
        "accel": state.accel,
        "mag": state.mag,
    }


def calibration_from_message(message: dict[str, Any]) -> CalibrationState:
    try:
        return CalibrationState(
            system=int(message["system"]),
            gyro=int(message["gyro"]),
            accel=int(message["accel"]),
            mag=int(message["mag"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise WireError(f"bad calibration message: {exc}") from exc


def swing_message(session_id: str, event: SwingEvent) -> dict[str, Any]:
    return {
        "kind": KIND_SWING,
        "session_id": session_id,
        "start_ms": event.start_ms,
        "end_ms": event.end_ms,
        "peak_omega_dps": event.peak_omega_dps,
        "peak_speed_mph": event.peak_speed_mph,
        "peak_power_pct": event.peak_power_pct,
    }


def swing_from_message(message: dict[str, Any]) -> SwingEvent:
    try:
        return SwingEvent(
            start_ms=int(message["start_ms"]),
            end_ms=int(message["end_ms"]),
            peak_omega_dps=float(message["peak_omega_dps"]),
            peak_speed_mph=float(message["peak_speed_mph"]),
            peak_power_pct=float(message["peak_power_pct"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise WireError(f"bad swing message: {exc}") from exc


def session_state_message(session_id: str, state: str, dropped: int = 0) -> dict[str, Any]:
    return {
        "kind": KIND_SESSION_STATE,
        "session_id": session_id,
        "state": state,
        "dropped": dropped,
    }


def error_message(session_id: str, code: str, detail: str) -> dict[str, Any]:
    return {"kind": KIND_ERROR, "session_id": session_id, "code": code, "detail": detail}
