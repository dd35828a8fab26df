#!/usr/bin/env python3
"""Regenerate the packaged reference study data.

Writes two kinds of fixtures under src/swingmeter/data/study/:

* CSV column tables with the per-participant results of the reference
  ten-person study (accurate-shot %, points won, speed-bracket mixes,
  shots above 75% power).
* Reconstructed session documents whose summaries reproduce those tables.
  The study published only rounded percentages, so this script searches for
  integer shot counts that round back to the published cells; rows where no
  exact integer reconstruction exists are approximated as closely as
  possible and reported below.

Run from the repository root:  python tools/build_reference_data.py
"""
from __future__ import annotations

import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from swingmeter.model import DEG_TO_RAD, PhysicalConfig, SwingEvent
from swingmeter.sessions import SessionRecord, ShotOutcome, round1, summarize
from swingmeter.traceio import format_session

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "swingmeter" / "data" / "study"

PARTICIPANTS = [f"p{i:02d}" for i in range(1, 11)]

# Published per-participant results. Bracket rows are (above 40, 25-40,
# below 25) percentages. The p06 baseline below-25 cell is 30.9, reconciling
# the row with its published column mean (the row as printed does not sum to
# 100); p08's visualisation accurate row sums to 95.6 as published and has
# no exact reconstruction.
ACCURATE_PCT = {
    "p01": (92, 83), "p02": (61, 54), "p03": (35, 47), "p04": (48, 26),
    "p05": (42, 51), "p06": (36, 27), "p07": (50, 37), "p08": (18, 39),
    "p09": (64, 59), "p10": (31, 48),
}
POINTS_WON = {
    "p01": (6, 11), "p02": (5, 4), "p03": (2, 4), "p04": (1, 1), "p05": (2, 6),
    "p06": (1, 1), "p07": (2, 3), "p08": (0, 1), "p09": (4, 6), "p10": (6, 3),
}
POWER_ABOVE_75 = {
    "p01": (0, 6), "p02": (14, 0), "p03": (8, 16), "p04": (12, 2), "p05": (1, 4),
    "p06": (15, 11), "p07": (13, 21), "p08": (0, 0), "p09": (4, 1), "p10": (0, 6),
}
TOTAL_BRACKETS = {
    "baseline": {
        "p01": (18.2, 45.5, 36.4), "p02": (54.5, 20.5, 25.0), "p03": (25.8, 30.6, 43.5),
        "p04": (22.7, 59.1, 18.2), "p05": (6.1, 60.6, 33.3), "p06": (54.8, 14.3, 30.9),
        "p07": (50.0, 39.6, 10.4), "p08": (9.1, 42.4, 48.5), "p09": (2.6, 51.3, 46.2),
        "p10": (0.0, 37.1, 62.9),
    },
    "visualisation": {
        "p01": (25.0, 50.0, 25.0), "p02": (45.7, 42.9, 11.4), "p03": (0.0, 34.2, 65.8),
        "p04": (31.4, 54.3, 14.3), "p05": (11.1, 60.0, 28.9), "p06": (75.8, 3.0, 21.2),
        "p07": (63.4, 29.3, 7.3), "p08": (20.5, 47.7, 31.8), "p09": (5.4, 67.6, 27.0),
        "p10": (0.0, 66.7, 33.3),
    },
}
ACCURATE_BRACKETS = {
    "baseline": {
        "p01": (15.5, 46.5, 38.0), "p02": (59.3, 22.2, 18.5), "p03": (23.8, 23.8, 52.4),
        "p04": (23.8, 66.7, 9.5), "p05": (14.3, 64.3, 21.4), "p06": (40.0, 13.3, 46.7),
        "p07": (58.3, 37.5, 4.2), "p08": (0.0, 50.0, 50.0), "p09": (0.0, 56.0, 44.0),
        "p10": (0.0, 9.1, 90.9),
    },
    "visualisation": {
        "p01": (24.5, 49.1, 26.4), "p02": (57.9, 36.8, 5.3), "p03": (0.0, 27.8, 72.2),
        "p04": (33.3, 55.6, 11.1), "p05": (4.3, 65.2, 30.4), "p06": (77.8, 0.0, 22.2),
        "p07": (60.0, 33.3, 6.7), "p08": (5.9, 52.9, 36.8), "p09": (0.0, 77.3, 22.7),
        "p10": (0.0, 62.5, 37.5),
    },
}

MPH_PER_DPS = DEG_TO_RAD * PhysicalConfig().racket_length_m * 2.23694 * 1.15


def round_int(value: float) -> int:
    return int(value + 0.5)


def matching_triples(total: int, row: tuple[float, float, float]) -> list[tuple[int, int, int]]:
    """Integer count triples summing to ``total`` that round back to ``row``."""
    candidates = []
    for target in row:
        exact = total * target / 100.0
        options = sorted(
            {k for k in (int(exact) - 1, int(exact), int(exact) + 1, round_int(exact)) if 0 <= k <= total}
        )
        options = [k for k in options if round1(100.0 * k / total) == target]
        if not options:
            return []
        candidates.append(options)
    triples = []
    for a in candidates[0]:
        for b in candidates[1]:
            c = total - a - b
            if c in candidates[2]:
                triples.append((a, b, c))
    return triples


def nearest_triples(total: int, row: tuple[float, float, float], spread: int = 3) -> list[tuple[int, int, int]]:
    """Count triples summing to ``total`` near the target percentages."""
    ranges = []
    for target in row:
        center = round_int(total * target / 100.0)
        ranges.append(range(max(0, center - spread), min(total, center + spread) + 1))
    triples = []
    for a in ranges[0]:
        for b in ranges[1]:
            c = total - a - b
            if c in ranges[2]:
                triples.append((a, b, c))
    return triples


def row_error(total: int, triple: tuple[int, int, int], row: tuple[float, float, float]) -> float:
    return sum(abs(100.0 * k / total - target) for k, target in zip(triple, row))


def solve_counts(pid: str, condition: str) -> tuple[int, tuple, int, tuple, float]:
    """Find (total, bracket counts, accurate, accurate bracket counts, error)."""
    side = 0 if condition == "baseline" else 1
    acc_target = ACCURATE_PCT[pid][side]
    points = POINTS_WON[pid][side]
    power = POWER_ABOVE_75[pid][side]
    total_row = TOTAL_BRACKETS[condition][pid]
    accurate_row = ACCURATE_BRACKETS[condition][pid]

    def candidates(exact_only: bool):
        # ~0.4 shots/second is already a brisk rally; larger totals are not
        # plausible for a five-minute session
        for total in range(4, 121):
            if power > total:
                continue
            totals = matching_triples(total, total_row)
            if not exact_only and not totals:
                totals = nearest_triples(total, total_row)
            for accurate in range(1, total + 1):
                if round_int(100.0 * accurate / total) != acc_target or points > accurate:
                    continue
                accs = matching_triples(accurate, accurate_row)
                if not exact_only and not accs:
                    accs = nearest_triples(accurate, accurate_row)
                for c in totals:
                    for a in accs:
                        if all(x <= y for x, y in zip(a, c)):
                            error = row_error(total, c, total_row) + row_error(accurate, a, accurate_row)
                            yield total, c, accurate, a, error

    for found in candidates(exact_only=True):
        if found[4] < 0.3:  # every cell rounds back exactly
            return found
    # No exact reconstruction: take the closest fit, preferring plausible
    # session sizes when the error is comparable (0.1 percentage-point bins).
    best = min(
        candidates(exact_only=False),
        key=lambda item: (math.ceil(item[4] * 10 - 1e-9), item[0]),
        default=None,
    )
    if best is None:
        raise RuntimeError(f"no count reconstruction for {pid} {condition}")
    return best


BRACKET_SPEEDS = ((43.0, 52.0), (26.0, 39.0), (10.0, 24.0))  # mph per bracket


def build_session(pid: str, condition: str, counts: tuple) -> SessionRecord:
    total, c, accurate_total, a, _ = counts
    side = 0 if condition == "baseline" else 1
    points = POINTS_WON[pid][side]
    power = POWER_ABOVE_75[pid][side]
    rng = random.Random(f"{pid}/{condition}")

    shots = []  # (speed_mph, accurate)
    for bracket in range(3):
        low, high = BRACKET_SPEEDS[bracket]
        for i in range(c[bracket]):
            speed = low + (high - low) * ((i * 7 + 3) % 11) / 11.0
            shots.append([speed, i < a[bracket], False, 0.0])
    accurate_indices = [i for i, shot in enumerate(shots) if shot[1]]
    for i in accurate_indices[:points]:
        shots[i][2] = True
    for rank, i in enumerate(rng.sample(range(total), total)[:power]):
        shots[i][3] = 78.0 + (rank * 3) % 22  # above the 75% threshold
    rank = 0
    for shot in shots:
        if shot[3] == 0.0:
            shot[3] = 18.0 + (rank * 5) % 53  # at most 71, under the threshold
            rank += 1
    rng.shuffle(shots)

    swings = []
    t = 1500
    spacing = max(800, 295_000 // (total + 2))
    # unannotated warm-up waggle; the first swing of a run always reads 100%
    warmup = SwingEvent(t, t + 400, 30.0 / MPH_PER_DPS, 30.0, 100.0)
    swings.append((warmup, None))
    t += spacing
    for speed, accurate, won, power_pct in shots:
        event = SwingEvent(
            start_ms=t,
            end_ms=t + 400,
            peak_omega_dps=speed / MPH_PER_DPS,
            peak_speed_mph=speed,
            peak_power_pct=power_pct,
        )
        swings.append((event, ShotOutcome(accurate=accurate, won_point=won)))
        t += spacing
    return SessionRecord(participant_id=pid, condition=condition, swings=tuple(swings))


def verify(record: SessionRecord, counts: tuple) -> list[str]:
    side = 0 if record.condition == "baseline" else 1
    pid = record.participant_id
    summary = summarize(record)
    problems = []
    if round_int(summary.accurate_pct) != ACCURATE_PCT[pid][side]:
        problems.append(f"accurate_pct {summary.accurate_pct:.2f} != {ACCURATE_PCT[pid][side]}")
    if summary.points_won != POINTS_WON[pid][side]:
        problems.append("points mismatch")
    if summary.shots_power_above_75 != POWER_ABOVE_75[pid][side]:
        problems.append("power count mismatch")
    for label, got, want in (
        ("total", summary.bracket_total_pct, TOTAL_BRACKETS[record.condition][pid]),
        ("accurate", summary.bracket_accurate_pct, ACCURATE_BRACKETS[record.condition][pid]),
    ):
        for g, w in zip(got, want):
            if round1(g) != w:
                problems.append(f"{label} bracket {round1(g)} != {w}")
    return problems


def write_csvs() -> None:
    def pair_csv(name: str, table: dict, note: str | None = None) -> None:
        lines = []
        if note:
            lines.append(f"# {note}")
        lines.append("participant,baseline,visualisation")
        for pid in PARTICIPANTS:
            b, v = table[pid]
            lines.append(f"{pid},{b},{v}")
        (OUT_DIR / name).write_text("\n".join(lines) + "\n")

    def bracket_csv(name: str, table: dict, note: str | None = None) -> None:
        lines = []
        if note:
            lines.append(f"# {note}")
        lines.append("participant,above40,mid,below25")
        for pid in PARTICIPANTS:
            a, m, b = table[pid]
            lines.append(f"{pid},{a},{m},{b}")
        (OUT_DIR / name).write_text("\n".join(lines) + "\n")

    pair_csv("accurate_shot_pct.csv", ACCURATE_PCT)
    pair_csv("points_won.csv", POINTS_WON)
    pair_csv("shots_power_above_75.csv", POWER_ABOVE_75)
    bracket_csv(
        "total_shot_speed_mix_baseline.csv",
        TOTAL_BRACKETS["baseline"],
        "p06 below25 reconciled with the column mean (source row did not sum to 100)",
    )
    bracket_csv("total_shot_speed_mix_visualisation.csv", TOTAL_BRACKETS["visualisation"])
    bracket_csv("accurate_shot_speed_mix_baseline.csv", ACCURATE_BRACKETS["baseline"])
    bracket_csv(
        "accurate_shot_speed_mix_visualisation.csv",
        ACCURATE_BRACKETS["visualisation"],
        "p08 row as published (sums to 95.6); shipped sessions approximate it",
    )


def main() -> int:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    write_csvs()
    approximations = []
    for condition in ("baseline", "visualisation"):
        directory = OUT_DIR / "sessions" / condition
        directory.mkdir(parents=True, exist_ok=True)
        for pid in PARTICIPANTS:
            counts = solve_counts(pid, condition)
            record = build_session(pid, condition, counts)
            problems = verify(record, counts)
            if problems:
                approximations.append((pid, condition, problems))
            (directory / f"{pid}.session").write_text(format_session(record))
            print(f"{pid} {condition}: total={counts[0]} accurate={counts[2]} error={counts[4]:.3f}")
    if approximations:
        print("\napproximated rows (no exact integer reconstruction exists):")
        for pid, condition, problems in approximations:
            print(f"  {pid} {condition}: {'; '.join(problems)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
