"""Command-line entry points: gen, analyze, replay, serve, compare, summarize.

Every subcommand is a thin composition of library operations. Commands that
print tables also accept ``--json FILE`` to write the same content in a
machine-readable form.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import math
import socket
import sys
import threading
from dataclasses import asdict
from pathlib import Path

from . import wire
from .calibration import CalibrationProcedure, apply_gesture, feed_calibration
from .engine import DetectorConfig, detect_swings
from .model import CalibrationState, ImuSample, PhysicalConfig
from .sessions import (
    BRACKET_LABELS,
    BRACKET_ORDER,
    GroupComparison,
    ParticipantMismatch,
    SessionSummary,
    compare_groups,
    round1,
    summarize,
)
from .server import ServerConfig, run_server
from .stats import PairedTestResult
from .traceio import (
    MalformedTrace,
    PulseSpec,
    SchemaViolation,
    TraceAnnotation,
    generate_trace,
    load_session,
    load_session_dir,
    load_trace,
    replay,
    save_trace,
)


class CliError(Exception):
    """Fatal command error carrying the single-line diagnostic."""


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except CliError as exc:
        print(f"swingmeter: {exc}", file=sys.stderr)
        return 1
    except (MalformedTrace, SchemaViolation, ParticipantMismatch, ValueError) as exc:
        print(f"swingmeter: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swingmeter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic swing trace")
    gen.add_argument("--pulses", default="", help="comma list of PEAKxDURATION@START, e.g. 400x300@1000")
    gen.add_argument("--rate", type=int, default=100, help="sample rate in Hz")
    gen.add_argument("--noise", type=float, default=0.0, help="uniform noise amplitude, deg/s")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--duration", type=int, default=None, help="trace length in ms")
    gen.add_argument("-o", "--output", required=True, help="output trace path")
    gen.set_defaults(handler=cmd_gen)

    analyze = sub.add_parser("analyze", help="detect swings in a recorded trace")
    analyze.add_argument("trace")
    analyze.add_argument("--config", default=None, help="JSON config file")
    analyze.add_argument("--json", dest="json_out", default=None, help="write machine-readable report")
    analyze.set_defaults(handler=cmd_analyze)

    rep = sub.add_parser("replay", help="stream a trace to a telemetry server as the device")
    rep.add_argument("trace")
    rep.add_argument("--connect", required=True, metavar="HOST:PORT")
    rep.add_argument("--speed", default="1", help="rate multiplier, number or 'inf'")
    rep.add_argument("--session", default="default", help="session id")
    rep.add_argument("--participant", default=None)
    rep.add_argument("--condition", default=None, choices=["baseline", "visualisation"])
    rep.add_argument(
        "--precalibrated",
        action="store_true",
        help="report full calibration immediately instead of running the procedure",
    )
    rep.set_defaults(handler=cmd_replay)

    serve = sub.add_parser("serve", help="run the telemetry server")
    serve.add_argument("--port", type=int, default=7350)
    serve.add_argument("--ws-port", type=int, default=None, help="optional WebSocket listener port")
    serve.add_argument("--host", default="0.0.0.0")
    serve.add_argument("--data-dir", default="swingmeter-data")
    serve.add_argument("--config", default=None, help="JSON config file")
    serve.set_defaults(handler=cmd_serve)

    comp = sub.add_parser("compare", help="compare baseline and visualisation session directories")
    comp.add_argument("baseline_dir")
    comp.add_argument("visualisation_dir")
    comp.add_argument("--json", dest="json_out", default=None)
    comp.set_defaults(handler=cmd_compare)

    summ = sub.add_parser("summarize", help="summarize one session document")
    summ.add_argument("session")
    summ.add_argument("--json", dest="json_out", default=None)
    summ.set_defaults(handler=cmd_summarize)

    return parser


# -- config ------------------------------------------------------------------

def _load_configs(path: str | None) -> tuple[PhysicalConfig, DetectorConfig]:
    if path is None:
        return PhysicalConfig(), DetectorConfig()
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CliError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"bad config file {path}: {exc}") from None
    try:
        physical = PhysicalConfig(**raw.get("physical", {}))
        detector = DetectorConfig(**raw.get("detector", {}))
    except (TypeError, ValueError) as exc:
        raise CliError(f"bad config values in {path}: {exc}") from None
    return physical, detector


# -- gen -----------------------------------------------------------------------

def _parse_pulses(spec: str) -> list[PulseSpec]:
    pulses = []
    if not spec:
        return pulses
    for part in spec.split(","):
        try:
            peak_text, rest = part.split("x", 1)
            duration_text, start_text = rest.split("@", 1)
            pulses.append(
                PulseSpec(
                    peak_dps=float(peak_text),
                    duration_ms=int(duration_text),
                    start_ms=int(start_text),
                )
            )
        except ValueError:
            raise CliError(f"bad pulse spec {part!r}, expected PEAKxDURATION@START") from None
    return pulses


def cmd_gen(args: argparse.Namespace) -> int:
    trace = generate_trace(
        _parse_pulses(args.pulses),
        sample_rate_hz=args.rate,
        seed=args.seed,
        noise_dps=args.noise,
        duration_ms=args.duration,
    )
    save_trace(trace, args.output)
    print(f"wrote {len(trace.samples)} samples to {args.output}")
    return 0


# -- analyze ---------------------------------------------------------------------

def cmd_analyze(args: argparse.Namespace) -> int:
    physical, detector = _load_configs(args.config)
    path = Path(args.trace)
    if not path.exists():
        raise CliError(f"trace not found: {path}")
    trace = load_trace(path)
    events = detect_swings(trace.samples, detector, physical)
    print(f"{'start_ms':>9} {'end_ms':>9} {'peak_mph':>9} {'power_pct':>9}")
    for event in events:
        print(
            f"{event.start_ms:>9} {event.end_ms:>9} "
            f"{event.peak_speed_mph:>9.2f} {event.peak_power_pct:>9.1f}"
        )
    print(f"{len(events)} swings in {trace.span_ms} ms")
    if args.json_out:
        report = {
            "trace": str(path),
            "span_ms": trace.span_ms,
            "total_swings": len(events),
            "swings": [asdict(event) for event in events],
        }
        Path(args.json_out).write_text(json.dumps(report, indent=2) + "\n")
    return 0


# -- replay ------------------------------------------------------------------------

def cmd_replay(args: argparse.Namespace) -> int:
    host, _, port_text = args.connect.rpartition(":")
    try:
        port = int(port_text)
    except ValueError:
        raise CliError(f"bad --connect value {args.connect!r}, expected HOST:PORT") from None
    speed = math.inf if args.speed in ("inf", "max") else float(args.speed)
    if not speed > 0:
        raise CliError("--speed must be positive or 'inf'")
    path = Path(args.trace)
    if not path.exists():
        raise CliError(f"trace not found: {path}")
    trace = load_trace(path)

    try:
        sock = socket.create_connection((host or "127.0.0.1", port))
    except OSError as exc:
        raise CliError(f"cannot connect to {args.connect}: {exc}") from None
    outfile = sock.makefile("w", encoding="utf-8", newline="")
    infile = sock.makefile("r", encoding="utf-8")

    def drain_replies() -> None:
        for line in infile:
            try:
                message = wire.decode_line(line)
            except wire.WireError:
                continue
            if message.get("kind") == wire.KIND_ERROR:
                print(f"server error: {message.get('code')}: {message.get('detail')}", file=sys.stderr)

    reader = threading.Thread(target=drain_replies, daemon=True)
    reader.start()

    session_id = args.session
    extra = {}
    if args.participant:
        extra["participant_id"] = args.participant
    if args.condition:
        extra["condition"] = args.condition
    outfile.write(wire.encode_line(wire.hello(wire.ROLE_DEVICE, session_id, **extra)))
    outfile.flush()

    calibration = CalibrationProcedure()
    reported: CalibrationState | None = None

    def report_calibration(state: CalibrationState) -> None:
        nonlocal reported
        if state != reported:
            outfile.write(wire.encode_line(wire.calibration_message(session_id, state)))
            reported = state

    if args.precalibrated:
        report_calibration(CalibrationState(3, 3, 3, 3))

    def sink(sample: ImuSample) -> None:
        if not args.precalibrated:
            feed_calibration(calibration, sample)
            report_calibration(calibration.current)
        outfile.write(wire.encode_line(wire.sample_message(session_id, sample)))
        outfile.flush()

    def on_annotation(note: TraceAnnotation) -> None:
        if note.kind == "gesture" and not args.precalibrated:
            apply_gesture(calibration, note)
            report_calibration(calibration.current)

    try:
        summary = replay(trace, speed, sink, on_annotation)
    except (BrokenPipeError, ConnectionError) as exc:
        raise CliError(f"connection lost during replay: {exc}") from None
    outfile.flush()
    sock.shutdown(socket.SHUT_WR)
    reader.join(timeout=2.0)
    sock.close()
    print(
        f"replayed {summary.samples_delivered} samples "
        f"({summary.span_ms} ms of data) in {summary.wall_seconds:.2f} s"
    )
    return 0


# -- serve ---------------------------------------------------------------------------

def cmd_serve(args: argparse.Namespace) -> int:
    physical, detector = _load_configs(args.config)
    config = ServerConfig(physical=physical, detector=detector, data_dir=Path(args.data_dir))

    def ready(server) -> None:
        print(f"listening tcp={server.port} ws={server.ws_port} data={config.data_dir}", flush=True)

    try:
        asyncio.run(
            run_server(config, host=args.host, port=args.port, ws_port=args.ws_port, ready=ready)
        )
    except OSError as exc:
        raise CliError(f"cannot listen on port {args.port}: {exc}") from None
    return 0


# -- summarize ------------------------------------------------------------------------

def _summary_dict(summary: SessionSummary) -> dict:
    return {
        "total_shots": summary.total_shots,
        "accurate_shots": summary.accurate_shots,
        "accurate_pct": summary.accurate_pct,
        "points_won": summary.points_won,
        "shots_power_above_75": summary.shots_power_above_75,
        "bracket_total_pct": list(summary.bracket_total_pct) if summary.bracket_total_pct else None,
        "bracket_accurate_pct": list(summary.bracket_accurate_pct) if summary.bracket_accurate_pct else None,
    }


def cmd_summarize(args: argparse.Namespace) -> int:
    path = Path(args.session)
    if not path.exists():
        raise CliError(f"session not found: {path}")
    record = load_session(path)
    summary = summarize(record)
    print(f"participant {record.participant_id} ({record.condition}), {len(record.swings)} swings")
    if summary.is_empty:
        print("no annotated shots")
    else:
        print(f"shots: {summary.total_shots}  accurate: {summary.accurate_shots} ({round1(summary.accurate_pct)}%)")
        print(f"points won: {summary.points_won}  shots above 75% power: {summary.shots_power_above_75}")
        for index, bracket in enumerate(BRACKET_ORDER):
            total_pct = round1(summary.bracket_total_pct[index])
            line = f"{BRACKET_LABELS[bracket]}: {total_pct}% of shots"
            if summary.bracket_accurate_pct is not None:
                line += f", {round1(summary.bracket_accurate_pct[index])}% of accurate shots"
            print(line)
    if args.json_out:
        payload = {
            "participant_id": record.participant_id,
            "condition": record.condition,
            "swing_count": len(record.swings),
            "summary": _summary_dict(summary),
        }
        Path(args.json_out).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


# -- compare ---------------------------------------------------------------------------

def _stat_dict(result: PairedTestResult) -> dict:
    return {
        "n": result.n,
        "df": result.df,
        "mean_diff": result.mean_diff,
        "t_statistic": result.t_statistic,
        "p_value": result.p_value,
        "zero_variance": result.zero_variance,
    }


def _stat_text(result: PairedTestResult) -> str:
    if result.zero_variance:
        return f"mean diff {round(result.mean_diff, 4)}, t n/a (zero variance)"
    return (
        f"mean diff {round(result.mean_diff, 4)}, "
        f"t {result.t_statistic:.4f}, p {result.p_value:.4f}"
    )


def _print_pair_table(title: str, rows: dict[str, tuple], integer: bool = False) -> None:
    print(f"\n{title}")
    print(f"{'participant':<14} {'baseline':>10} {'visualisation':>14} {'change':>8}")
    for pid, (base, vis) in rows.items():
        delta = vis - base
        if integer:
            print(f"{pid:<14} {base:>10d} {vis:>14d} {delta:>+8d}")
        else:
            print(f"{pid:<14} {base:>10.1f} {vis:>14.1f} {delta:>+8.1f}")


def _print_bracket_table(title: str, rows: dict[str, tuple], side: int) -> None:
    print(f"\n{title}")
    print(f"{'participant':<14} {'>40 mph':>9} {'25-40 mph':>10} {'<25 mph':>9}")
    for pid, pair in rows.items():
        above, mid, below = pair[side]
        print(f"{pid:<14} {above:>9.1f} {mid:>10.1f} {below:>9.1f}")


def _report_dict(report: GroupComparison) -> dict:
    return {
        "participants": list(report.participants),
        "accurate_pct": {pid: list(v) for pid, v in report.accurate_pct.items()},
        "points_won": {pid: list(v) for pid, v in report.points_won.items()},
        "power_above_75": {pid: list(v) for pid, v in report.power_above_75.items()},
        "total_brackets": {
            pid: [list(pair[0]), list(pair[1])] for pid, pair in report.total_brackets.items()
        },
        "accurate_brackets": {
            pid: [list(pair[0]), list(pair[1])] for pid, pair in report.accurate_brackets.items()
        },
        "stats": {
            "points_won": _stat_dict(report.points_stat),
            "total_brackets": [_stat_dict(r) for r in report.total_bracket_stats],
            "accurate_brackets": [_stat_dict(r) for r in report.accurate_bracket_stats],
        },
    }


def cmd_compare(args: argparse.Namespace) -> int:
    for directory in (args.baseline_dir, args.visualisation_dir):
        if not Path(directory).is_dir():
            raise CliError(f"not a directory: {directory}")
    baseline = {pid: summarize(rec) for pid, rec in load_session_dir(args.baseline_dir).items()}
    visualisation = {
        pid: summarize(rec) for pid, rec in load_session_dir(args.visualisation_dir).items()
    }
    if not baseline:
        raise CliError(f"no *.session files in {args.baseline_dir}")
    report = compare_groups(baseline, visualisation)

    _print_pair_table("Accurate shots (% of total)", report.accurate_pct)
    _print_pair_table("Points won", report.points_won, integer=True)
    _print_bracket_table("Total shots by swing speed, baseline (%)", report.total_brackets, side=0)
    _print_bracket_table("Total shots by swing speed, visualisation (%)", report.total_brackets, side=1)
    _print_bracket_table("Accurate shots by swing speed, baseline (%)", report.accurate_brackets, side=0)
    _print_bracket_table("Accurate shots by swing speed, visualisation (%)", report.accurate_brackets, side=1)
    _print_pair_table("Shots above 75% swing power", report.power_above_75, integer=True)

    print("\nPaired statistics (visualisation - baseline)")
    print(f"points won: {_stat_text(report.points_stat)}")
    for index, bracket in enumerate(BRACKET_ORDER):
        print(f"total shots {BRACKET_LABELS[bracket]}: {_stat_text(report.total_bracket_stats[index])}")
    for index, bracket in enumerate(BRACKET_ORDER):
        print(
            f"accurate shots {BRACKET_LABELS[bracket]}: "
            f"{_stat_text(report.accurate_bracket_stats[index])}"
        )

    if args.json_out:
        Path(args.json_out).write_text(json.dumps(_report_dict(report), indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
