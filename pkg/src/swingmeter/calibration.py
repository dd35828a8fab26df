"""Simulated sensor calibration gating the pipeline before data acquisition.

The gyro channel calibrates itself from the signal: holding the sensor still
accumulates stillness time, and levels step up at configured milestones. The
magnetometer (a figure-8 wave) and accelerometer (six held poses) gestures
cannot be recognised from a gyro trace, so they arrive as scripted
``#gesture`` annotations. The overall system level follows the weakest
subsystem. Levels never decrease within one procedure run.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .model import CalibrationState, ImuSample
from .engine import angular_speed_dps
from .traceio import TraceAnnotation

GESTURE_FIGURE8_COMPLETE = "figure8_complete"
GESTURE_FIGURE8 = "figure8"
GESTURE_POSE = "pose"
POSES_REQUIRED = 6


@dataclass(frozen=True)
class CalibrationRequirements:
    """Tunable thresholds for the simulated procedure."""

    stillness_threshold_dps: float = 5.0
    stillness_milestones_ms: tuple[int, int, int] = (500, 1000, 2000)

    def __post_init__(self) -> None:
        if self.stillness_threshold_dps <= 0:
            raise ValueError("stillness_threshold_dps must be positive")
        a, b, c = self.stillness_milestones_ms
        if not 0 < a < b < c:
            raise ValueError("stillness milestones must be increasing and positive")


@dataclass
class CalibrationProcedure:
    """Mutable single-owner state machine for one calibration run."""

    requirements: CalibrationRequirements = field(default_factory=CalibrationRequirements)
    stillness_ms_accumulated: int = 0
    figure8_progress: float = 0.0
    _seen_poses: set[int] = field(default_factory=set)
    _levels: dict[str, int] = field(default_factory=lambda: {"gyro": 0, "accel": 0, "mag": 0})
    _last_t_ms: int | None = None

    @property
    def pose_count(self) -> int:
        return len(self._seen_poses)

    @property
    def current(self) -> CalibrationState:
        gyro = self._levels["gyro"]
        accel = self._levels["accel"]
        mag = self._levels["mag"]
        return CalibrationState(system=min(gyro, accel, mag), gyro=gyro, accel=accel, mag=mag)

    def _raise_level(self, name: str, level: int) -> None:
        if level > self._levels[name]:
            self._levels[name] = level


def feed_calibration(proc: CalibrationProcedure, sample: ImuSample) -> CalibrationProcedure:
    """Advance the procedure with one validated sample.

    Stillness accumulates while angular speed stays under the threshold and
    resets on any motion above it; the gyro level steps up at the configured
    milestones. Returns the same (mutated) procedure for chaining.
    """
    dt = 0 if proc._last_t_ms is None else sample.t_ms - proc._last_t_ms
    proc._last_t_ms = sample.t_ms
    if angular_speed_dps(sample) < proc.requirements.stillness_threshold_dps:
        proc.stillness_ms_accumulated += dt
    else:
        proc.stillness_ms_accumulated = 0
    for level, milestone in enumerate(proc.requirements.stillness_milestones_ms, start=1):
        if proc.stillness_ms_accumulated >= milestone:
            proc._raise_level("gyro", level)
    return proc


def apply_gesture(proc: CalibrationProcedure, annotation: TraceAnnotation) -> CalibrationProcedure:
    """Apply a scripted ``#gesture`` annotation to the procedure.

    Recognised gestures: ``figure8_complete``, ``figure8 <fraction>`` and
    ``pose <n>`` for n in 1..6. Non-gesture annotations are ignored.
    """
    if annotation.kind != "gesture":
        return proc
    if not annotation.args:
        raise ValueError("gesture annotation missing a name")
    name = annotation.args[0]
    if name == GESTURE_FIGURE8_COMPLETE:
        _advance_figure8(proc, 1.0)
    elif name == GESTURE_FIGURE8:
        if len(annotation.args) < 2:
            raise ValueError("figure8 gesture needs a progress fraction")
        _advance_figure8(proc, float(annotation.args[1]))
    elif name == GESTURE_POSE:
        if len(annotation.args) < 2:
            raise ValueError("pose gesture needs a pose number")
        pose = int(annotation.args[1])
        if not 1 <= pose <= POSES_REQUIRED:
            raise ValueError(f"pose number must be 1..{POSES_REQUIRED}, got {pose}")
        proc._seen_poses.add(pose)
        proc._raise_level("accel", min(3, proc.pose_count // 2))
    else:
        raise ValueError(f"unknown gesture {name!r}")
    return proc


def _advance_figure8(proc: CalibrationProcedure, progress: float) -> None:
    if not 0.0 <= progress <= 1.0:
        raise ValueError(f"figure8 progress must be in [0, 1], got {progress}")
    proc.figure8_progress = max(proc.figure8_progress, progress)
    if proc.figure8_progress >= 1.0:
        proc._raise_level("mag", 3)
    elif proc.figure8_progress >= 2 / 3:
        proc._raise_level("mag", 2)
    elif proc.figure8_progress >= 1 / 3:
        proc._raise_level("mag", 1)


def gate(proc: CalibrationProcedure) -> bool:
    """True exactly when every subsystem reports level 3."""
    return proc.current.fully_calibrated
