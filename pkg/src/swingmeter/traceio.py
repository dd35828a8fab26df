"""Trace and session file formats, synthetic swing generation, paced replay.

Trace format (CSV, one sample per line):

    t_ms,gyro_x,gyro_y,gyro_z
    0,0.0,0.0,0.0
    10,55.2,-12.0,3.4
    #gesture 2000 figure8_complete
    #shot 4500 accurate won

The header is exactly ``t_ms,gyro_x,gyro_y,gyro_z`` with an optional
``,ax,ay,az`` suffix when accelerometer channels were recorded. Annotation
lines start with ``#gesture`` or ``#shot`` followed by a timestamp; other
``#`` lines are comments. Floats are serialized with repr, so decode(encode)
is exact. Session documents are a line-oriented key/value format defined by
``format_session`` below.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .model import ImuSample, SampleError, SwingEvent, validate_sample
from .sessions import CONDITIONS, DEFAULT_SESSION_DURATION_MS, SessionRecord, ShotOutcome

TRACE_HEADER = "t_ms,gyro_x,gyro_y,gyro_z"
TRACE_HEADER_ACCEL = TRACE_HEADER + ",ax,ay,az"
ANNOTATION_KINDS = ("gesture", "shot")
DEFAULT_SAMPLE_RATE_HZ = 100


class MalformedTrace(ValueError):
    """A trace file line could not be decoded."""

    def __init__(self, line_no: int, detail: str):
        self.line_no = line_no
        self.detail = detail
        super().__init__(f"line {line_no}: {detail}")


class OverlappingPulses(ValueError):
    """Two synthetic pulses occupy overlapping time windows."""


class SchemaViolation(ValueError):
    """A session document field is missing, malformed, or inconsistent."""

    def __init__(self, path: str, detail: str):
        self.path = path
        self.detail = detail
        super().__init__(f"{path}: {detail}")


@dataclass(frozen=True)
class TraceAnnotation:
    """An out-of-band event line: ``#<kind> <t_ms> <args...>``."""

    t_ms: int
    kind: str
    args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ANNOTATION_KINDS:
            raise ValueError(f"annotation kind must be one of {ANNOTATION_KINDS}")
        if self.t_ms < 0:
            raise ValueError("annotation timestamp must be non-negative")


@dataclass(frozen=True)
class TraceFile:
    """A decoded trace: ordered samples plus optional annotations."""

    samples: tuple[ImuSample, ...]
    annotations: tuple[TraceAnnotation, ...] = ()
    has_accel: bool = False

    def __post_init__(self) -> None:
        prev: int | None = None
        for sample in self.samples:
            validate_sample(sample, prev)
            if self.has_accel != (sample.accel is not None):
                raise ValueError("sample accel channels must match the trace header")
            prev = sample.t_ms
        last = None
        for note in self.annotations:
            if last is not None and note.t_ms < last:
                raise ValueError("annotations must be ordered by timestamp")
            last = note.t_ms

    @property
    def span_ms(self) -> int:
        return self.samples[-1].t_ms if self.samples else 0


def _format_float(value: float) -> str:
    return repr(float(value))


def encode_trace(trace: TraceFile) -> str:
    """Render a trace to its CSV text form (exact inverse of decode_trace)."""
    lines = [TRACE_HEADER_ACCEL if trace.has_accel else TRACE_HEADER]
    notes = list(trace.annotations)
    note_index = 0

    def flush_notes(up_to: float) -> None:
        nonlocal note_index
        while note_index < len(notes) and notes[note_index].t_ms <= up_to:
            note = notes[note_index]
            parts = [f"#{note.kind}", str(note.t_ms), *note.args]
            lines.append(" ".join(parts))
            note_index += 1

    for sample in trace.samples:
        # annotations strictly before this sample's time go first
        flush_notes(sample.t_ms - 1)
        row = [str(sample.t_ms), _format_float(sample.gyro_x), _format_float(sample.gyro_y), _format_float(sample.gyro_z)]
        if trace.has_accel:
            row.extend(_format_float(v) for v in sample.accel)
        lines.append(",".join(row))
    flush_notes(math.inf)
    return "\n".join(lines) + "\n"


def decode_trace(text: str) -> TraceFile:
    """Parse trace CSV text, rejecting bad lines with their line number."""
    lines = text.splitlines()
    if not lines:
        raise MalformedTrace(1, "empty file, expected header")
    header = lines[0].strip()
    if header == TRACE_HEADER:
        has_accel = False
    elif header == TRACE_HEADER_ACCEL:
        has_accel = True
    else:
        raise MalformedTrace(1, f"bad header {header!r}")

    samples: list[ImuSample] = []
    annotations: list[TraceAnnotation] = []
    prev_t: int | None = None
    expected_fields = 7 if has_accel else 4
    for line_no, raw_line in enumerate(lines[1:], start=2):
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith("#"):
            note = _parse_annotation(line, line_no)
            if note is not None:
                if annotations and note.t_ms < annotations[-1].t_ms:
                    raise MalformedTrace(line_no, "annotation timestamp out of order")
                annotations.append(note)
            continue
        fields = line.split(",")
        if len(fields) != expected_fields:
            raise MalformedTrace(line_no, f"expected {expected_fields} fields, got {len(fields)}")
        try:
            t_ms = int(fields[0])
        except ValueError:
            raise MalformedTrace(line_no, f"bad timestamp {fields[0]!r}") from None
        try:
            values = [float(v) for v in fields[1:]]
        except ValueError as exc:
            raise MalformedTrace(line_no, str(exc)) from None
        accel = tuple(values[3:6]) if has_accel else None
        sample = ImuSample(t_ms, values[0], values[1], values[2], accel)
        try:
            validate_sample(sample, prev_t)
        except SampleError as exc:
            raise MalformedTrace(line_no, str(exc)) from exc
        samples.append(sample)
        prev_t = t_ms
    return TraceFile(tuple(samples), tuple(annotations), has_accel)


def _parse_annotation(line: str, line_no: int) -> TraceAnnotation | None:
    parts = line[1:].split()
    if not parts or parts[0] not in ANNOTATION_KINDS:
        return None  # plain comment
    if len(parts) < 2:
        raise MalformedTrace(line_no, f"#{parts[0]} needs a timestamp")
    try:
        t_ms = int(parts[1])
    except ValueError:
        raise MalformedTrace(line_no, f"bad annotation timestamp {parts[1]!r}") from None
    if t_ms < 0:
        raise MalformedTrace(line_no, "annotation timestamp must be non-negative")
    return TraceAnnotation(t_ms, parts[0], tuple(parts[2:]))


def load_trace(path: str | Path) -> TraceFile:
    return decode_trace(Path(path).read_text())


def save_trace(trace: TraceFile, path: str | Path) -> None:
    Path(path).write_text(encode_trace(trace))


# ---------------------------------------------------------------------------
# Synthetic swing generation (the detection oracle)

DEFAULT_AXIS_WEIGHTS = (0.6, 0.48, 0.64)  # unit vector


@dataclass(frozen=True)
class PulseSpec:
    """One synthetic swing: a half-sine burst of angular speed.

    The burst contributes ``peak_dps * sin(pi * (t - start) / duration)`` on
    [start, start + duration), split across the gyro axes by the unit vector
    ``axis_weights``. Closed-form peak and support make generated traces an
    exact oracle for the detector.
    """

    peak_dps: float
    duration_ms: int
    start_ms: int
    axis_weights: tuple[float, float, float] = DEFAULT_AXIS_WEIGHTS

    def __post_init__(self) -> None:
        if self.peak_dps <= 0:
            raise ValueError("peak_dps must be positive")
        if self.duration_ms <= 0:
            raise ValueError("duration_ms must be positive")
        if self.start_ms < 0:
            raise ValueError("start_ms must be non-negative")
        norm = math.sqrt(sum(w * w for w in self.axis_weights))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"axis_weights must be a unit vector, norm {norm}")

    @property
    def end_ms(self) -> int:
        return self.start_ms + self.duration_ms

    def magnitude_at(self, t_ms: float) -> float:
        if not self.start_ms <= t_ms < self.end_ms:
            return 0.0
        return self.peak_dps * math.sin(math.pi * (t_ms - self.start_ms) / self.duration_ms)


def generate_trace(
    pulses: Sequence[PulseSpec],
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ,
    seed: int = 0,
    noise_dps: float = 0.0,
    duration_ms: int | None = None,
) -> TraceFile:
    """Build a deterministic synthetic trace from non-overlapping pulses.

    Noise is per-axis uniform in +/- noise_dps from a generator seeded with
    ``seed``; identical arguments always produce byte-identical traces.
    """
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    ordered = sorted(pulses, key=lambda p: p.start_ms)
    for first, second in zip(ordered, ordered[1:]):
        if second.start_ms < first.end_ms:
            raise OverlappingPulses(
                f"pulse at {second.start_ms}ms overlaps pulse ending {first.end_ms}ms"
            )
    if duration_ms is None:
        duration_ms = (ordered[-1].end_ms + 500) if ordered else 1000

    rng = random.Random(seed)
    samples: list[ImuSample] = []
    count = duration_ms * sample_rate_hz // 1000 + 1
    pulse_index = 0
    for i in range(count):
        t_ms = round(i * 1000 / sample_rate_hz)
        while pulse_index < len(ordered) and ordered[pulse_index].end_ms <= t_ms:
            pulse_index += 1
        magnitude = (
            ordered[pulse_index].magnitude_at(t_ms) if pulse_index < len(ordered) else 0.0
        )
        weights = ordered[pulse_index].axis_weights if pulse_index < len(ordered) else DEFAULT_AXIS_WEIGHTS
        axes = [magnitude * w for w in weights]
        if noise_dps > 0:
            axes = [a + rng.uniform(-noise_dps, noise_dps) for a in axes]
        samples.append(ImuSample(t_ms, axes[0], axes[1], axes[2]))
    return TraceFile(tuple(samples))


def sampled_pulse_peak(pulse: PulseSpec, sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> float:
    """The largest magnitude a noise-free sampling of this pulse can contain."""
    best = 0.0
    step = 1000 / sample_rate_hz
    i = math.ceil(pulse.start_ms / step)
    while True:
        t_ms = round(i * step)
        if t_ms >= pulse.end_ms:
            break
        best = max(best, pulse.magnitude_at(t_ms))
        i += 1
    return best


# ---------------------------------------------------------------------------
# Paced replay

@dataclass(frozen=True)
class ReplaySummary:
    samples_delivered: int
    annotations_delivered: int
    span_ms: int
    wall_seconds: float


def replay(
    trace: TraceFile,
    rate_multiplier: float,
    sink: Callable[[ImuSample], None],
    on_annotation: Callable[[TraceAnnotation], None] | None = None,
) -> ReplaySummary:
    """Deliver a trace to ``sink`` with inter-sample pacing.

    ``rate_multiplier`` scales down the recorded inter-sample delays;
    ``math.inf`` delivers as fast as possible. Annotations are delivered at
    their own timestamps via ``on_annotation`` when provided.
    """
    if not (rate_multiplier > 0):
        raise ValueError("rate_multiplier must be positive (or math.inf)")
    timeline: list[tuple[int, int, object]] = []
    # samples sort ahead of annotations at the same timestamp
    for sample in trace.samples:
        timeline.append((sample.t_ms, 0, sample))
    for note in trace.annotations:
        timeline.append((note.t_ms, 1, note))
    timeline.sort(key=lambda item: (item[0], item[1]))

    start = time.monotonic()
    paced = math.isfinite(rate_multiplier)
    sample_count = 0
    note_count = 0
    for t_ms, _, item in timeline:
        if paced:
            target = start + (t_ms / 1000.0) / rate_multiplier
            delay = target - time.monotonic()
            if delay > 0:
                time.sleep(delay)
        if isinstance(item, ImuSample):
            sink(item)
            sample_count += 1
        else:
            if on_annotation is not None:
                on_annotation(item)
            note_count += 1
    return ReplaySummary(
        samples_delivered=sample_count,
        annotations_delivered=note_count,
        span_ms=trace.span_ms,
        wall_seconds=time.monotonic() - start,
    )


def replay_file(
    path: str | Path,
    rate_multiplier: float,
    sink: Callable[[ImuSample], None],
    on_annotation: Callable[[TraceAnnotation], None] | None = None,
) -> ReplaySummary:
    """Decode then replay a trace file; decoding errors carry line numbers."""
    return replay(load_trace(path), rate_multiplier, sink, on_annotation)


# ---------------------------------------------------------------------------
# Session documents

_SESSION_FLOAT_FIELDS = ("peak_omega_dps", "peak_speed_mph", "peak_power_pct")
_BOOL_WORDS = {"yes": True, "no": False}


def format_session(record: SessionRecord) -> str:
    """Render a session record to its document form (exact inverse of parse)."""
    lines = [
        f"participant_id: {record.participant_id}",
        f"condition: {record.condition}",
        f"duration_ms: {record.duration_ms}",
    ]
    for event, outcome in record.swings:
        parts = [
            f"start_ms={event.start_ms}",
            f"end_ms={event.end_ms}",
            f"peak_omega_dps={_format_float(event.peak_omega_dps)}",
            f"peak_speed_mph={_format_float(event.peak_speed_mph)}",
            f"peak_power_pct={_format_float(event.peak_power_pct)}",
        ]
        if outcome is not None:
            parts.append(f"accurate={'yes' if outcome.accurate else 'no'}")
            parts.append(f"won={'yes' if outcome.won_point else 'no'}")
        lines.append("swing: " + " ".join(parts))
    return "\n".join(lines) + "\n"


def parse_session(text: str) -> SessionRecord:
    """Parse a session document, raising SchemaViolation with a field path."""
    headers: dict[str, str] = {}
    swings: list[tuple[SwingEvent, ShotOutcome | None]] = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise SchemaViolation(f"line {line_no}", f"expected 'key: value', got {line!r}")
        key = key.strip()
        value = value.strip()
        if key == "swing":
            swings.append(_parse_swing_line(value, index=len(swings)))
        elif key in ("participant_id", "condition", "duration_ms"):
            if key in headers:
                raise SchemaViolation(key, "duplicate header")
            headers[key] = value
        else:
            raise SchemaViolation(key, "unknown field")

    if "participant_id" not in headers or not headers["participant_id"]:
        raise SchemaViolation("participant_id", "missing")
    condition = headers.get("condition")
    if condition not in CONDITIONS:
        raise SchemaViolation("condition", f"must be one of {CONDITIONS}, got {condition!r}")
    duration = DEFAULT_SESSION_DURATION_MS
    if "duration_ms" in headers:
        try:
            duration = int(headers["duration_ms"])
        except ValueError:
            raise SchemaViolation("duration_ms", f"not an integer: {headers['duration_ms']!r}") from None
    try:
        return SessionRecord(
            participant_id=headers["participant_id"],
            condition=condition,
            swings=tuple(swings),
            duration_ms=duration,
        )
    except ValueError as exc:
        raise SchemaViolation("session", str(exc)) from exc


def _parse_swing_line(value: str, index: int) -> tuple[SwingEvent, ShotOutcome | None]:
    path = f"swings[{index}]"
    fields: dict[str, str] = {}
    for token in value.split():
        key, sep, val = token.partition("=")
        if not sep:
            raise SchemaViolation(path, f"expected key=value, got {token!r}")
        if key in fields:
            raise SchemaViolation(f"{path}.{key}", "duplicate field")
        fields[key] = val

    def take_int(name: str) -> int:
        if name not in fields:
            raise SchemaViolation(f"{path}.{name}", "missing")
        try:
            return int(fields.pop(name))
        except ValueError:
            raise SchemaViolation(f"{path}.{name}", "not an integer") from None

    def take_float(name: str) -> float:
        if name not in fields:
            raise SchemaViolation(f"{path}.{name}", "missing")
        try:
            result = float(fields.pop(name))
        except ValueError:
            raise SchemaViolation(f"{path}.{name}", "not a number") from None
        if not math.isfinite(result):
            raise SchemaViolation(f"{path}.{name}", "not finite")
        return result

    start_ms = take_int("start_ms")
    end_ms = take_int("end_ms")
    floats = {name: take_float(name) for name in _SESSION_FLOAT_FIELDS}

    outcome: ShotOutcome | None = None
    has_accurate = "accurate" in fields
    has_won = "won" in fields
    if has_accurate != has_won:
        raise SchemaViolation(f"{path}.outcome", "accurate and won must appear together")
    if has_accurate:
        raw_accurate = fields.pop("accurate")
        raw_won = fields.pop("won")
        if raw_accurate not in _BOOL_WORDS:
            raise SchemaViolation(f"{path}.accurate", f"expected yes/no, got {raw_accurate!r}")
        if raw_won not in _BOOL_WORDS:
            raise SchemaViolation(f"{path}.won", f"expected yes/no, got {raw_won!r}")
        accurate = _BOOL_WORDS[raw_accurate]
        won = _BOOL_WORDS[raw_won]
        if won and not accurate:
            raise SchemaViolation(f"{path}.outcome", "won=yes requires accurate=yes")
        outcome = ShotOutcome(accurate=accurate, won_point=won)
    if fields:
        raise SchemaViolation(f"{path}.{sorted(fields)[0]}", "unknown field")

    try:
        event = SwingEvent(
            start_ms=start_ms,
            end_ms=end_ms,
            peak_omega_dps=floats["peak_omega_dps"],
            peak_speed_mph=floats["peak_speed_mph"],
            peak_power_pct=floats["peak_power_pct"],
        )
    except ValueError as exc:
        raise SchemaViolation(path, str(exc)) from exc
    return event, outcome


def load_session(path: str | Path) -> SessionRecord:
    return parse_session(Path(path).read_text())


def save_session(record: SessionRecord, path: str | Path) -> None:
    Path(path).write_text(format_session(record))


def load_session_dir(directory: str | Path) -> dict[str, SessionRecord]:
    """Load every ``*.session`` file in a directory, keyed by participant id."""
    records: dict[str, SessionRecord] = {}
    for path in sorted(Path(directory).glob("*.session")):
        record = load_session(path)
        if record.participant_id in records:
            raise SchemaViolation(
                "participant_id", f"{record.participant_id!r} appears in more than one file"
            )
        records[record.participant_id] = record
    return records
