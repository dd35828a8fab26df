"""Loaders for the packaged reference study data.

The package ships the per-participant results of a ten-person baseline vs
visualisation study in two forms: plain CSV column tables (used by the
statistics reproduction tests) and full session documents reconstructed to
match those tables (used by the compare pipeline end to end). Lines starting
with ``#`` in the CSVs are notes.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

PAIR_TABLES = {
    "accurate_pct": "accurate_shot_pct.csv",
    "points_won": "points_won.csv",
    "power_above_75": "shots_power_above_75.csv",
}
BRACKET_TABLES = {
    ("total", "baseline"): "total_shot_speed_mix_baseline.csv",
    ("total", "visualisation"): "total_shot_speed_mix_visualisation.csv",
    ("accurate", "baseline"): "accurate_shot_speed_mix_baseline.csv",
    ("accurate", "visualisation"): "accurate_shot_speed_mix_visualisation.csv",
}


def study_dir() -> Path:
    return Path(resources.files("swingmeter").joinpath("data/study"))


def sessions_dir(condition: str) -> Path:
    """Directory of shipped ``*.session`` documents for one condition."""
    path = study_dir() / "sessions" / condition
    if not path.is_dir():
        raise FileNotFoundError(f"no shipped sessions for condition {condition!r}")
    return path


def _read_rows(name: str) -> list[list[str]]:
    text = (study_dir() / name).read_text()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([cell.strip() for cell in line.split(",")])
    return rows


def load_pair_table(metric: str) -> tuple[list[str], list[float], list[float]]:
    """A (participants, baseline, visualisation) column pair for one metric."""
    rows = _read_rows(PAIR_TABLES[metric])
    header, data = rows[0], rows[1:]
    assert header == ["participant", "baseline", "visualisation"], header
    ids = [row[0] for row in data]
    return ids, [float(row[1]) for row in data], [float(row[2]) for row in data]


def load_bracket_table(kind: str, condition: str) -> tuple[list[str], dict[str, tuple[float, float, float]]]:
    """Per-participant speed-bracket percentages (above 40, 25-40, below 25)."""
    rows = _read_rows(BRACKET_TABLES[(kind, condition)])
    header, data = rows[0], rows[1:]
    assert header == ["participant", "above40", "mid", "below25"], header
    ids = [row[0] for row in data]
    table = {row[0]: (float(row[1]), float(row[2]), float(row[3])) for row in data}
    return ids, table


def bracket_columns(kind: str, condition: str) -> tuple[list[float], list[float], list[float]]:
    """The three bracket columns in participant order, ready for paired_t."""
    ids, table = load_bracket_table(kind, condition)
    above = [table[pid][0] for pid in ids]
    mid = [table[pid][1] for pid in ids]
    below = [table[pid][2] for pid in ids]
    return above, mid, below
