"""Swing detection and metric computation over a validated gyro stream.

The metric chain: combine the three gyro axes into an angular speed, scale
to a racket-tip linear speed in mph, and evaluate the swing's kinetic energy
(linear plus rotational) as its raw power. Raw power is then min-max
normalised against the running observed range so the display always reads a
0-100 percentage anchored by the hardest swing so far.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .model import DEG_TO_RAD, ImuSample, PhysicalConfig, SwingEvent


@dataclass(frozen=True)
class NormalizerState:
    """Running min/max of raw swing power carried across swings.

    Both bounds are unset until the first swing; afterwards
    ``min_power_observed <= max_power_observed`` always holds.
    """

    min_power_observed: float | None = None
    max_power_observed: float | None = None
    swing_count: int = 0

    def __post_init__(self) -> None:
        if (self.swing_count == 0) != (self.min_power_observed is None):
            raise ValueError("bounds must be unset exactly while swing_count == 0")
        if (self.min_power_observed is None) != (self.max_power_observed is None):
            raise ValueError("min and max bounds must be set together")
        if self.min_power_observed is not None and self.min_power_observed > self.max_power_observed:
            raise ValueError("min_power_observed must not exceed max_power_observed")
        if self.swing_count < 0:
            raise ValueError("swing_count must be non-negative")


@dataclass(frozen=True)
class DetectorConfig:
    """Hysteresis thresholds for the swing detector.

    A window opens when angular speed exceeds ``start_threshold_dps`` and
    closes once it has stayed below ``end_threshold_dps`` for at least
    ``refractory_ms``. Windows shorter than ``min_duration_ms`` are treated
    as twitches and discarded. Defaults separate a deliberate stroke
    (several hundred deg/s) from idle wrist motion.
    """

    start_threshold_dps: float = 120.0
    end_threshold_dps: float = 60.0
    min_duration_ms: int = 80
    refractory_ms: int = 150

    def __post_init__(self) -> None:
        for name in ("start_threshold_dps", "end_threshold_dps", "min_duration_ms", "refractory_ms"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.end_threshold_dps >= self.start_threshold_dps:
            raise ValueError("end threshold must sit below start threshold (hysteresis)")


def angular_speed_dps(sample: ImuSample) -> float:
    """Euclidean magnitude of the 3-axis gyro vector, deg/s."""
    return math.sqrt(sample.gyro_x ** 2 + sample.gyro_y ** 2 + sample.gyro_z ** 2)


def swing_speed_mph(omega_dps: float, cfg: PhysicalConfig) -> float:
    """Racket-tip linear speed in mph for an angular speed in deg/s.

    v = r * omega with omega in rad/s, converted to mph and scaled by the
    empirical speed calibration factor.
    """
    omega_rad = omega_dps * DEG_TO_RAD
    return omega_rad * cfg.racket_length_m * cfg.mph_per_mps * cfg.speed_calibration_factor


def raw_power_joules(omega_dps: float, cfg: PhysicalConfig) -> float:
    """Total kinetic energy of the swing (linear + rotational terms), joules.

    E = 1/2 m v^2 + 1/2 I omega^2 with v = r * omega. Whether v includes the
    speed calibration factor is controlled by ``cfg.calibrated_power``.
    """
    omega_rad = omega_dps * DEG_TO_RAD
    v = cfg.racket_length_m * omega_rad
    if cfg.calibrated_power:
        v *= cfg.speed_calibration_factor
    linear = 0.5 * cfg.effective_mass_kg * v * v
    rotational = 0.5 * cfg.moment_of_inertia_kgm2 * omega_rad * omega_rad
    return linear + rotational


def normalize_power(raw: float, state: NormalizerState) -> tuple[float, NormalizerState]:
    """Min-max normalise a raw power value against the running range.

    The first swing anchors the range: min is pinned at 0, max at the first
    raw value, and the swing reads exactly 100%. Later swings widen the range
    as needed and map to clamp((raw - min) / (max - min) * 100, 0, 100).
    A degenerate range (every swing identical) reads 100%.
    """
    if raw < 0:
        raise ValueError(f"raw power must be >= 0, got {raw}")
    if state.swing_count == 0:
        new_state = NormalizerState(0.0, raw, 1)
        return 100.0, new_state
    low = min(state.min_power_observed, raw)
    high = max(state.max_power_observed, raw)
    new_state = NormalizerState(low, high, state.swing_count + 1)
    if high == low:
        return 100.0, new_state
    pct = (raw - low) / (high - low) * 100.0
    return min(100.0, max(0.0, pct)), new_state


class SwingDetector:
    """Single-owner hysteresis state machine turning samples into SwingEvents.

    Push samples in timestamp order; each push returns the (possibly empty)
    list of swings completed by that sample. Call ``finish()`` at stream end
    to flush a window still open. The normaliser state threads through events
    in emission order and is readable at any time via ``normalizer``.
    """

    def __init__(
        self,
        detector: DetectorConfig | None = None,
        physical: PhysicalConfig | None = None,
        normalizer: NormalizerState | None = None,
    ) -> None:
        self.detector = detector or DetectorConfig()
        self.physical = physical or PhysicalConfig()
        self.normalizer = normalizer or NormalizerState()
        self._active = False
        self._start_ms = 0
        self._peak = 0.0
        self._below_since: int | None = None
        self._last_t: int | None = None

    def push(self, sample: ImuSample) -> list[SwingEvent]:
        det = self.detector
        speed = angular_speed_dps(sample)
        t = sample.t_ms
        self._last_t = t
        completed: list[SwingEvent] = []

        if self._active and self._below_since is not None and t - self._below_since >= det.refractory_ms:
            event = self._close(self._below_since)
            if event is not None:
                completed.append(event)

        if self._active:
            self._peak = max(self._peak, speed)
            if speed < det.end_threshold_dps:
                if self._below_since is None:
                    self._below_since = t
            else:
                self._below_since = None
        elif speed > det.start_threshold_dps:
            self._active = True
            self._start_ms = t
            self._peak = speed
            self._below_since = None

        return completed

    def finish(self) -> list[SwingEvent]:
        """Flush an open window at end of stream."""
        if not self._active or self._last_t is None:
            return []
        end = self._below_since if self._below_since is not None else self._last_t
        event = self._close(end)
        return [event] if event is not None else []

    def _close(self, end_ms: int) -> SwingEvent | None:
        self._active = False
        self._below_since = None
        if end_ms - self._start_ms < self.detector.min_duration_ms:
            return None
        peak = self._peak
        speed = swing_speed_mph(peak, self.physical)
        raw = raw_power_joules(peak, self.physical)
        pct, self.normalizer = normalize_power(raw, self.normalizer)
        return SwingEvent(
            start_ms=self._start_ms,
            end_ms=end_ms,
            peak_omega_dps=peak,
            peak_speed_mph=speed,
            peak_power_pct=pct,
        )


def detect_swings(
    samples: Iterable[ImuSample],
    detector: DetectorConfig | None = None,
    physical: PhysicalConfig | None = None,
    normalizer: NormalizerState | None = None,
) -> list[SwingEvent]:
    """Run the detector over a whole sample stream and return its events."""
    machine = SwingDetector(detector, physical, normalizer)
    events: list[SwingEvent] = []
    for sample in samples:
        events.extend(machine.push(sample))
    events.extend(machine.finish())
    return events
