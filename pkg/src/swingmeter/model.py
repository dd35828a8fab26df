"""Shared domain types for the swing-analytics pipeline.

Everything downstream (detector, telemetry, session analytics) consumes the
types defined here. All values are plain frozen dataclasses; they validate
their own invariants on construction so that a bad reading can never travel
further than the decoding layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# deg/s to rad/s
DEG_TO_RAD = math.pi / 180.0
# m/s to mph
MPS_TO_MPH = 2.23694


class SampleError(ValueError):
    """A decoded sample candidate violates the stream contract."""


class NonFiniteValue(SampleError):
    """A sensor channel carries NaN or an infinity."""


class TimestampRegression(SampleError):
    """A sample's timestamp went backwards within one stream."""


@dataclass(frozen=True)
class ImuSample:
    """One timestamped 3-axis angular-velocity reading.

    ``t_ms`` is integer milliseconds since stream start. Gyro components are
    deg/s (roll X, pitch Y, yaw Z). ``accel`` carries optional accelerometer
    channels when the source trace recorded them; the metric path never reads
    them.
    """

    t_ms: int
    gyro_x: float
    gyro_y: float
    gyro_z: float
    accel: tuple[float, float, float] | None = None


def validate_sample(sample: ImuSample, prev_t_ms: int | None = None) -> ImuSample:
    """Admit a decoded sample into the pipeline, or reject it.

    Raises NonFiniteValue for NaN/inf channels and TimestampRegression when
    ``t_ms`` moves backwards relative to ``prev_t_ms``. Equal consecutive
    timestamps are allowed (sensor bursts arrive batched over the air).
    Returns the sample unchanged when every invariant holds.
    """
    if not isinstance(sample.t_ms, int) or isinstance(sample.t_ms, bool):
        raise SampleError(f"timestamp must be an integer, got {sample.t_ms!r}")
    if sample.t_ms < 0:
        raise SampleError(f"timestamp must be non-negative, got {sample.t_ms}")
    channels = [sample.gyro_x, sample.gyro_y, sample.gyro_z]
    if sample.accel is not None:
        channels.extend(sample.accel)
    for value in channels:
        if not math.isfinite(value):
            raise NonFiniteValue(f"non-finite channel value {value!r} at t={sample.t_ms}")
    if prev_t_ms is not None and sample.t_ms < prev_t_ms:
        raise TimestampRegression(
            f"timestamp {sample.t_ms} regresses below previous {prev_t_ms}"
        )
    return sample


@dataclass(frozen=True)
class PhysicalConfig:
    """Physical constants of the racket/arm system used by the metric path.

    Defaults are the constants the live system shipped with: a 0.68 m swing
    radius, 0.2 kg effective racket mass, 0.045 kg*m^2 moment of inertia and
    the empirically measured 1.15 speed calibration factor. ``mph_per_mps``
    is the fixed unit conversion.

    ``calibrated_power`` selects whether the 1.15 factor also scales the
    linear velocity used in the kinetic-energy computation (default) or only
    the displayed speed.
    """

    racket_length_m: float = 0.68
    effective_mass_kg: float = 0.2
    moment_of_inertia_kgm2: float = 0.045
    speed_calibration_factor: float = 1.15
    mph_per_mps: float = MPS_TO_MPH
    calibrated_power: bool = True

    def __post_init__(self) -> None:
        for name in (
            "racket_length_m",
            "effective_mass_kg",
            "moment_of_inertia_kgm2",
            "speed_calibration_factor",
            "mph_per_mps",
        ):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")


CALIBRATION_LEVELS = (0, 1, 2, 3)


@dataclass(frozen=True)
class CalibrationState:
    """Per-subsystem sensor calibration levels, 0 (uncalibrated) to 3 (full)."""

    system: int = 0
    gyro: int = 0
    accel: int = 0
    mag: int = 0

    def __post_init__(self) -> None:
        for name in ("system", "gyro", "accel", "mag"):
            level = getattr(self, name)
            if level not in CALIBRATION_LEVELS:
                raise ValueError(f"{name} level must be in 0..3, got {level!r}")

    @property
    def fully_calibrated(self) -> bool:
        return self.system == 3 and self.gyro == 3 and self.accel == 3 and self.mag == 3


@dataclass(frozen=True)
class SwingEvent:
    """One detected swing with its peak metrics.

    ``peak_omega_dps`` is the maximum angular speed inside the detection
    window; ``peak_speed_mph`` and ``peak_power_pct`` are derived from it.
    """

    start_ms: int
    end_ms: int
    peak_omega_dps: float
    peak_speed_mph: float
    peak_power_pct: float

    def __post_init__(self) -> None:
        if self.start_ms >= self.end_ms:
            raise ValueError(f"swing window must have start < end, got [{self.start_ms}, {self.end_ms}]")
        if self.peak_omega_dps < 0:
            raise ValueError(f"peak_omega_dps must be >= 0, got {self.peak_omega_dps}")
        if self.peak_speed_mph < 0:
            raise ValueError(f"peak_speed_mph must be >= 0, got {self.peak_speed_mph}")
        if not 0.0 <= self.peak_power_pct <= 100.0:
            raise ValueError(f"peak_power_pct must be in [0, 100], got {self.peak_power_pct}")
