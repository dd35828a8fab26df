"""Per-participant session aggregation and baseline/visualisation comparison.

A session is one five-minute play period for one participant under one
condition. Each detected swing may carry a shot outcome annotation (was the
shot accurate, did it win the point); unannotated swings are practice
waggles and stay out of the shot statistics.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .model import SwingEvent
from .stats import PairedTestResult, paired_t

CONDITIONS = ("baseline", "visualisation")
DEFAULT_SESSION_DURATION_MS = 300_000
POWER_THRESHOLD_PCT = 75.0


class SpeedBracket(enum.Enum):
    ABOVE_40 = "above40"
    MID = "mid"
    BELOW_25 = "below25"


# Column order used by every bracket table: fast, moderate, slow.
BRACKET_ORDER = (SpeedBracket.ABOVE_40, SpeedBracket.MID, SpeedBracket.BELOW_25)
BRACKET_LABELS = {
    SpeedBracket.ABOVE_40: "greater than 40 mph",
    SpeedBracket.MID: "between 25 mph and 40 mph",
    SpeedBracket.BELOW_25: "less than 25 mph",
}


def speed_bracket(speed_mph: float) -> SpeedBracket:
    """Band a swing speed: below 25, 25..40 inclusive, above 40 mph.

    The boundary speeds 25.0 and 40.0 land in the middle bracket.
    """
    if speed_mph < 0:
        raise ValueError(f"speed must be >= 0, got {speed_mph}")
    if speed_mph < 25.0:
        return SpeedBracket.BELOW_25
    if speed_mph <= 40.0:
        return SpeedBracket.MID
    return SpeedBracket.ABOVE_40


@dataclass(frozen=True)
class ShotOutcome:
    """Observed outcome of one shot; a point can only be won by an accurate shot."""

    accurate: bool
    won_point: bool

    def __post_init__(self) -> None:
        if self.won_point and not self.accurate:
            raise ValueError("won_point requires accurate")


@dataclass(frozen=True)
class SessionRecord:
    """An ordered swing log for one participant under one condition."""

    participant_id: str
    condition: str
    swings: tuple[tuple[SwingEvent, ShotOutcome | None], ...]
    duration_ms: int = DEFAULT_SESSION_DURATION_MS

    def __post_init__(self) -> None:
        if not self.participant_id:
            raise ValueError("participant_id must be non-empty")
        if self.condition not in CONDITIONS:
            raise ValueError(f"condition must be one of {CONDITIONS}, got {self.condition!r}")
        if self.duration_ms <= 0:
            raise ValueError("duration_ms must be positive")

    def annotated(self) -> list[tuple[SwingEvent, ShotOutcome]]:
        return [(event, outcome) for event, outcome in self.swings if outcome is not None]


@dataclass(frozen=True)
class SessionSummary:
    """Shot statistics for one session.

    Percentage fields are None for the corresponding empty denominator
    (no annotated shots, or no accurate shots). Bracket triples follow
    BRACKET_ORDER: (above 40, 25-40, below 25).
    """

    total_shots: int
    points_won: int
    shots_power_above_75: int
    accurate_shots: int
    accurate_pct: float | None
    bracket_total_pct: tuple[float, float, float] | None
    bracket_accurate_pct: tuple[float, float, float] | None

    @property
    def is_empty(self) -> bool:
        return self.total_shots == 0


def summarize(session: SessionRecord) -> SessionSummary:
    """Aggregate a session's annotated shots into its summary statistics."""
    shots = session.annotated()
    total = len(shots)
    if total == 0:
        return SessionSummary(
            total_shots=0,
            points_won=0,
            shots_power_above_75=0,
            accurate_shots=0,
            accurate_pct=None,
            bracket_total_pct=None,
            bracket_accurate_pct=None,
        )
    accurate = [(event, outcome) for event, outcome in shots if outcome.accurate]
    points = sum(1 for _, outcome in shots if outcome.won_point)
    power_hits = sum(1 for event, _ in shots if event.peak_power_pct > POWER_THRESHOLD_PCT)

    def bracket_counts(pairs: Sequence[tuple[SwingEvent, ShotOutcome]]) -> dict[SpeedBracket, int]:
        counts = {bracket: 0 for bracket in SpeedBracket}
        for event, _ in pairs:
            counts[speed_bracket(event.peak_speed_mph)] += 1
        return counts

    total_counts = bracket_counts(shots)
    bracket_total = tuple(100.0 * total_counts[b] / total for b in BRACKET_ORDER)
    bracket_accurate = None
    if accurate:
        accurate_counts = bracket_counts(accurate)
        bracket_accurate = tuple(100.0 * accurate_counts[b] / len(accurate) for b in BRACKET_ORDER)
    return SessionSummary(
        total_shots=total,
        points_won=points,
        shots_power_above_75=power_hits,
        accurate_shots=len(accurate),
        accurate_pct=100.0 * len(accurate) / total,
        bracket_total_pct=bracket_total,
        bracket_accurate_pct=bracket_accurate,
    )


@dataclass(frozen=True)
class MetricDelta:
    """visualisation - baseline for one metric, with a sign classification."""

    metric: str
    baseline: float | None
    visualisation: float | None
    delta: float | None
    trend: str  # improved | worse | unchanged | undefined

    @staticmethod
    def of(metric: str, baseline: float | None, visualisation: float | None) -> "MetricDelta":
        if baseline is None or visualisation is None:
            return MetricDelta(metric, baseline, visualisation, None, "undefined")
        delta = visualisation - baseline
        if delta > 0:
            trend = "improved"
        elif delta < 0:
            trend = "worse"
        else:
            trend = "unchanged"
        return MetricDelta(metric, baseline, visualisation, delta, trend)


def compare(baseline: SessionSummary, visualisation: SessionSummary) -> tuple[MetricDelta, ...]:
    """Per-metric deltas between two summaries of the same participant."""
    deltas = [
        MetricDelta.of("accurate_pct", baseline.accurate_pct, visualisation.accurate_pct),
        MetricDelta.of("points_won", baseline.points_won, visualisation.points_won),
    ]
    for index, bracket in enumerate(BRACKET_ORDER):
        base = baseline.bracket_total_pct[index] if baseline.bracket_total_pct else None
        vis = visualisation.bracket_total_pct[index] if visualisation.bracket_total_pct else None
        deltas.append(MetricDelta.of(f"total_{bracket.value}_pct", base, vis))
    for index, bracket in enumerate(BRACKET_ORDER):
        base = baseline.bracket_accurate_pct[index] if baseline.bracket_accurate_pct else None
        vis = visualisation.bracket_accurate_pct[index] if visualisation.bracket_accurate_pct else None
        deltas.append(MetricDelta.of(f"accurate_{bracket.value}_pct", base, vis))
    deltas.append(
        MetricDelta.of(
            "shots_power_above_75",
            baseline.shots_power_above_75,
            visualisation.shots_power_above_75,
        )
    )
    return tuple(deltas)


class ParticipantMismatch(ValueError):
    """The two condition groups do not cover the same participants."""

    def __init__(self, missing_baseline: Sequence[str], missing_visualisation: Sequence[str]):
        self.missing_baseline = tuple(missing_baseline)
        self.missing_visualisation = tuple(missing_visualisation)
        parts = []
        if self.missing_baseline:
            parts.append(f"missing from baseline: {', '.join(self.missing_baseline)}")
        if self.missing_visualisation:
            parts.append(f"missing from visualisation: {', '.join(self.missing_visualisation)}")
        super().__init__("; ".join(parts))


def round1(value: float) -> float:
    """Round half away from zero to one decimal, as the result tables do."""
    return math.floor(abs(value) * 10.0 + 0.5) / 10.0 * (1 if value >= 0 else -1)


@dataclass(frozen=True)
class GroupComparison:
    """All cross-participant result tables for one baseline/visualisation pair.

    Column values are tabulated at one decimal (counts stay exact); the
    statistics rows run on the tabulated columns, so the reported t and p
    correspond exactly to the printed tables.
    """

    participants: tuple[str, ...]
    accurate_pct: dict[str, tuple[float, float]]
    points_won: dict[str, tuple[int, int]]
    power_above_75: dict[str, tuple[int, int]]
    total_brackets: dict[str, tuple[tuple[float, float, float], tuple[float, float, float]]]
    accurate_brackets: dict[str, tuple[tuple[float, float, float], tuple[float, float, float]]]
    points_stat: PairedTestResult
    total_bracket_stats: tuple[PairedTestResult, PairedTestResult, PairedTestResult]
    accurate_bracket_stats: tuple[PairedTestResult, PairedTestResult, PairedTestResult]


def compare_groups(
    baseline: Mapping[str, SessionSummary],
    visualisation: Mapping[str, SessionSummary],
) -> GroupComparison:
    """Build the full baseline-vs-visualisation report across participants."""
    base_ids = set(baseline)
    vis_ids = set(visualisation)
    if base_ids != vis_ids:
        raise ParticipantMismatch(
            missing_baseline=sorted(vis_ids - base_ids),
            missing_visualisation=sorted(base_ids - vis_ids),
        )
    participants = tuple(sorted(base_ids))
    for pid in participants:
        for side, summary in (("baseline", baseline[pid]), ("visualisation", visualisation[pid])):
            if summary.is_empty:
                raise ValueError(f"{side} session for {pid} has no annotated shots")

    accurate_pct = {}
    points = {}
    power = {}
    total_brackets = {}
    accurate_brackets = {}
    for pid in participants:
        b, v = baseline[pid], visualisation[pid]
        accurate_pct[pid] = (round1(b.accurate_pct), round1(v.accurate_pct))
        points[pid] = (b.points_won, v.points_won)
        power[pid] = (b.shots_power_above_75, v.shots_power_above_75)
        total_brackets[pid] = (
            tuple(round1(x) for x in b.bracket_total_pct),
            tuple(round1(x) for x in v.bracket_total_pct),
        )
        if b.bracket_accurate_pct is None or v.bracket_accurate_pct is None:
            raise ValueError(f"participant {pid} has no accurate shots in one condition")
        accurate_brackets[pid] = (
            tuple(round1(x) for x in b.bracket_accurate_pct),
            tuple(round1(x) for x in v.bracket_accurate_pct),
        )

    def bracket_stats(table: dict) -> tuple[PairedTestResult, ...]:
        results = []
        for index in range(3):
            base_col = [table[pid][0][index] for pid in participants]
            vis_col = [table[pid][1][index] for pid in participants]
            results.append(paired_t(base_col, vis_col))
        return tuple(results)

    return GroupComparison(
        participants=participants,
        accurate_pct=accurate_pct,
        points_won=points,
        power_above_75=power,
        total_brackets=total_brackets,
        accurate_brackets=accurate_brackets,
        points_stat=paired_t(
            [points[pid][0] for pid in participants],
            [points[pid][1] for pid in participants],
        ),
        total_bracket_stats=bracket_stats(total_brackets),
        accurate_bracket_stats=bracket_stats(accurate_brackets),
    )
