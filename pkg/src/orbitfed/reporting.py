"""
CSV emission for windows, event logs, round metrics, comparisons and shards.

Floats are written with fixed decimals (times to 1e-6 s, metrics to 1e-6) so
repeated runs with the same scenario produce byte-identical files.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .fl_engine import DataShard
from .orbital_mechanics import windows_to_csv
from .sim_runner import Comparison, SimulationResult

EVENT_COLUMNS = ("time_s", "kind", "subject", "round", "detail")
METRIC_COLUMNS = ("round", "t_broadcast_s", "t_aggregate_s", "wall_time_s", "cumulative_s", "accuracy", "loss", "complete")
ROUND_COLUMNS = (
    "round", "orbit", "wait_broadcast_s", "uplink_s", "train_s", "relay_s", "wait_sink_s",
    "downlink_s", "round_time_s", "star_same_start_s", "sink_slot", "second_waits", "complete",
)
COMPARISON_COLUMNS = (
    "round", "fedleo_round_s", "star_round_s", "fedleo_cum_s", "star_cum_s",
    "fedleo_accuracy", "star_accuracy", "dominance",
)


def _num(x: float, digits: int = 6) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return f"{x:.{digits}f}"


def _table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def events_csv(result: SimulationResult) -> str:
    return _table(EVENT_COLUMNS, (
        (_num(e.time), e.kind, e.subject, e.round, e.detail) for e in result.events
    ))


def metrics_csv(result: SimulationResult) -> str:
    rows = []
    for r in result.rounds:
        rows.append((
            r.round, _num(r.t_broadcast), _num(r.t_aggregate), _num(r.round_wall_time),
            _num(r.t_aggregate), _num(r.global_accuracy), _num(r.global_loss), int(r.complete),
        ))
    return _table(METRIC_COLUMNS, rows)


def rounds_csv(result: SimulationResult) -> str:
    rows = []
    for r in result.rounds:
        for o in r.orbits:
            rows.append((
                r.round, o.orbit, _num(o.wait_broadcast), _num(o.uplink), _num(o.train), _num(o.relay),
                _num(o.wait_sink), _num(o.downlink), _num(o.round_time), _num(o.baseline_time),
                o.sink_slot, o.second_waits, int(o.complete),
            ))
    return _table(ROUND_COLUMNS, rows)


def comparison_csv(c: Comparison) -> str:
    return _table(COMPARISON_COLUMNS, (
        (
            row.round, _num(row.fedleo_round_s), _num(row.star_round_s), _num(row.fedleo_cum_s),
            _num(row.star_cum_s), _num(row.fedleo_accuracy), _num(row.star_accuracy), int(row.dominance),
        )
        for row in c.rows
    ))


def comparison_summary(c: Comparison) -> str:
    """Human-readable summary table, also written to summary.txt."""
    def opt(v, fmt):
        return "not reached" if v is None else fmt.format(v)

    lines = [
        f"{'metric':<34}{'fedleo':>16}{'star':>16}",
        f"{'completed rounds':<34}{c.fedleo_rounds:>16d}{c.star_rounds:>16d}",
        f"{'rounds to target':<34}{opt(c.fedleo_rounds_to_target, '{:d}'):>16}{opt(c.star_rounds_to_target, '{:d}'):>16}",
        f"{'time to target [h]':<34}{opt(c.fedleo_time_to_target and c.fedleo_time_to_target / 3600, '{:.3f}'):>16}"
        f"{opt(c.star_time_to_target and c.star_time_to_target / 3600, '{:.3f}'):>16}",
        f"target accuracy: {c.target_accuracy:.4f}",
        f"speedup ratio (cumulative wall time, common rounds): {_num(c.speedup, 4)}",
        f"per-orbit speedup (same-start star chain): {_num(c.orbit_speedup, 4)}",
        f"rounds where FedLEO fails to dominate: {c.dominance_violations}",
    ]
    return "\n".join(lines) + "\n"


def partition_csv(shards: Mapping[tuple[int, int], DataShard], num_classes: int) -> str:
    header = ("orbit", "slot", "samples", *[f"class_{c}" for c in range(num_classes)])
    rows = []
    for sat in sorted(shards):
        s = shards[sat]
        rows.append((sat[0], sat[1], s.size, *map(int, s.histogram)))
    return _table(header, rows)


def write_text(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text, encoding="utf-8", newline="")
    return path


def write_run(result: SimulationResult, out_dir: Path) -> list[Path]:
    return [
        write_text(out_dir, "events.csv", events_csv(result)),
        write_text(out_dir, "metrics.csv", metrics_csv(result)),
        write_text(out_dir, "rounds.csv", rounds_csv(result)),
    ]


def write_comparison(c: Comparison, fedleo: SimulationResult, star: SimulationResult, out_dir: Path) -> list[Path]:
    paths = write_run(fedleo, out_dir / "fedleo") + write_run(star, out_dir / "star")
    paths.append(write_text(out_dir, "comparison.csv", comparison_csv(c)))
    paths.append(write_text(out_dir, "summary.txt", comparison_summary(c)))
    return paths


def write_windows(windows, out_dir: Path) -> Path:
    return write_text(out_dir, "windows.csv", windows_to_csv(windows))
