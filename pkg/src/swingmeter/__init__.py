"""swingmeter: gyroscope swing analytics.

Turns streamed gyro samples into per-swing speed (mph) and normalised power
(%) metrics, gates on sensor calibration, broadcasts live metrics to viewer
dashboards, and statistically compares baseline vs visualisation sessions.
"""

from .model import (
    CalibrationState,
    ImuSample,
    NonFiniteValue,
    PhysicalConfig,
    SampleError,
    SwingEvent,
    TimestampRegression,
    validate_sample,
)
from .engine import (
    DetectorConfig,
    NormalizerState,
    SwingDetector,
    angular_speed_dps,
    detect_swings,
    normalize_power,
    raw_power_joules,
    swing_speed_mph,
)
from .sessions import (
    SessionRecord,
    SessionSummary,
    ShotOutcome,
    SpeedBracket,
    compare,
    compare_groups,
    speed_bracket,
    summarize,
)
from .stats import LengthMismatch, PairedTestResult, paired_t, student_t_sf
from .traceio import (
    MalformedTrace,
    OverlappingPulses,
    PulseSpec,
    SchemaViolation,
    TraceFile,
    decode_trace,
    encode_trace,
    generate_trace,
    load_session,
    load_trace,
    replay,
    save_session,
    save_trace,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationState",
    "DetectorConfig",
    "ImuSample",
    "LengthMismatch",
    "MalformedTrace",
    "NonFiniteValue",
    "NormalizerState",
    "OverlappingPulses",
    "PairedTestResult",
    "PhysicalConfig",
    "PulseSpec",
    "SampleError",
    "SchemaViolation",
    "SessionRecord",
    "SessionSummary",
    "ShotOutcome",
    "SpeedBracket",
    "SwingDetector",
    "SwingEvent",
    "TimestampRegression",
    "TraceFile",
    "angular_speed_dps",
    "compare",
    "compare_groups",
    "decode_trace",
    "detect_swings",
    "encode_trace",
    "generate_trace",
    "load_session",
    "load_trace",
    "normalize_power",
    "paired_t",
    "raw_power_joules",
    "replay",
    "save_session",
    "save_trace",
    "speed_bracket",
    "student_t_sf",
    "summarize",
    "swing_speed_mph",
    "validate_sample",
]
