"""Batch command-line front end.

Commands: measure, event, sweep, two-phase, uniform, revenue-check. Flags may
also come from a flat JSON file via --config (command-line flags win). Output
is the fixed CSV schema or JSON; a one-line summary goes to standard output.
Exit status: 0 success, 1 usage error, 2 runtime error. The IAM_WORKERS
environment variable caps the Monte Carlo worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from typing import Optional

from . import auctions, montecarlo
from .distributions import parse_distribution
from .errors import IamsimError, UsageError
from .montecarlo import CSchedule, EstimateReport, SweepRow, rows_to_csv

COMMANDS = ("measure", "event", "sweep", "two-phase", "uniform", "revenue-check")

_SCHEDULE_TOKENS = {
    "one-over-n": "one-over-n",
    "m-over-n": "m-over-n",
    "cuberoot": "cuberoot-log",
    "cuberoot-log": "cuberoot-log",
}


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    dist: str
    n: tuple[int, ...] = ()
    m: int = 1
    c: Optional[float] = None
    c_schedule: Optional[str] = None
    kappa: float = 0.2
    reps: int = 1000
    seed: int = 0
    out: Optional[str] = None
    format: str = "csv"
    metric: str = "delta_worst"
    bound: Optional[str] = None
    cmp: str = "lt"
    t1: int = 1
    t2: int = 1
    k1: int = 1
    k2: int = 1
    m1: int = 1
    m2: int = 1
    units: int = 1
    group: int = 1
    k: int = 2
    price: Optional[float] = None

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            key = f.name.replace("_", "-")
            if f.name == "n":
                out[key] = ",".join(str(x) for x in value)
            elif value is not None:
                out[key] = value
        return out

    def schedule(self) -> CSchedule:
        if self.c is not None:
            return CSchedule("constant", c=self.c)
        if self.c_schedule is not None:
            kind = _SCHEDULE_TOKENS[self.c_schedule]
            if kind == "cuberoot-log":
                return CSchedule(kind, kappa=self.kappa)
            return CSchedule(kind)
        raise UsageError("one of --c or --c-schedule is required")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_n(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    if isinstance(text, int):
        return (text,)
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"--n expects an integer or comma-separated integers, got {text!r}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="iamsim", add_help=True)
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name, prog=f"iamsim {name}")
        p.add_argument("--config", default=None)
        p.add_argument("--dist", default=None)
        p.add_argument("--n", default=None)
        p.add_argument("--m", type=int, default=None)
        group_c = p.add_mutually_exclusive_group()
        group_c.add_argument("--c", type=float, default=None)
        group_c.add_argument("--c-schedule", dest="c_schedule", choices=sorted(_SCHEDULE_TOKENS), default=None)
        p.add_argument("--kappa", type=float, default=None)
        p.add_argument("--reps", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["csv", "json"], default=None)
        if name == "sweep":
            p.add_argument("--metric", choices=["delta_worst", "event_prob"], default=None)
        if name in ("event", "sweep"):
            p.add_argument("--bound", default=None)
            p.add_argument("--cmp", choices=["lt", "le"], default=None)
        if name == "two-phase":
            for flag in ("t1", "t2", "k1", "k2", "m1", "m2", "units"):
                p.add_argument(f"--{flag}", type=int, default=None)
        if name == "uniform":
            p.add_argument("--group", type=int, default=None)
        if name == "revenue-check":
            p.add_argument("--k", type=int, default=None)
            p.add_argument("--units", type=int, default=None)
            p.add_argument("--price", type=float, default=None)
    return parser


_CONFIG_FIELDS = {f.name.replace("_", "-"): f.name for f in fields(ExperimentConfig)}


def parse_args(argv: list[str]) -> ExperimentConfig:
    parser = _build_parser()
    namespace = parser.parse_args(argv)
    if namespace.command is None:
        raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
    values = {k: v for k, v in vars(namespace).items() if k != "config" and v is not None}

    if namespace.config:
        try:
            with open(namespace.config) as handle:
                raw = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: cannot read {namespace.config!r}: {exc}") from exc
        if not isinstance(raw, dict):
            raise UsageError("--config: file must hold a flat JSON object")
        for key, value in raw.items():
            if key not in _CONFIG_FIELDS:
                raise UsageError(f"--config: unknown key {key!r}")
            if key == "command":
                if value != values["command"]:
                    raise UsageError(f"--config: command {value!r} conflicts with {values['command']!r}")
                continue
            values.setdefault(_CONFIG_FIELDS[key], value)

    if "dist" not in values:
        raise UsageError("--dist is required")
    if "n" in values:
        values["n"] = _parse_n(values["n"])
    if "c" in values and "c_schedule" in values:
        raise UsageError("--c and --c-schedule are mutually exclusive")
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def _require_n(config: ExperimentConfig) -> tuple[int, ...]:
    if not config.n:
        raise UsageError("--n is required for this command")
    return config.n


def _run_rows(config: ExperimentConfig) -> list[SweepRow]:
    dist = parse_distribution(config.dist)
    schedule = config.schedule()
    label = schedule.label()

    if config.command in ("measure", "event", "sweep"):
        metric = {"measure": "delta_worst", "event": "event_prob"}.get(config.command, config.metric)
        bound = config.bound
        if bound is not None and bound != "2c":
            bound = float(bound)
        return montecarlo.sweep(
            dist, list(_require_n(config)), config.m, schedule, config.reps, config.seed,
            metric=metric, bound=bound, strict=config.cmp == "lt",
        )

    if config.command == "two-phase":
        n = config.t1 * config.k1
        tp = auctions.TwoPhaseConfig(
            dist=dist, t1=config.t1, t2=config.t2, k1=config.k1, k2=config.k2,
            m1=config.m1, m2=config.m2, c=schedule.value(n, config.m1), units_k=config.units,
        )
        realized, bound = auctions.estimate_deviation_gain(tp, config.reps, config.seed)
        return [
            SweepRow(dist.spec_string(), label, "deviation_gain_realized", realized, realized.n, realized.m),
            SweepRow(dist.spec_string(), label, "deviation_gain_bound", bound, bound.n, bound.m),
        ]

    if config.command == "uniform":
        n = _require_n(config)[0]
        outcome = auctions.run_uniform_price(dist, n, config.group, config.reps, config.seed)
        return [SweepRow(dist.spec_string(), label, "group_gain", outcome.gain, n, config.group)]

    if config.command == "revenue-check":
        if config.price is None:
            raise UsageError("--price is required for revenue-check")
        result = auctions.revenue_ratio_check(dist, config.price, config.k, config.units, config.reps, config.seed)
        return [
            SweepRow(dist.spec_string(), label, "revenue_ratio", result.ratio_single, 1, 1),
            SweepRow(dist.spec_string(), label, "revenue_ratio", result.ratio_multi, config.k, config.units),
        ]

    raise UsageError(f"unknown command {config.command!r}")


def _report_json(report: EstimateReport) -> dict:
    return {
        "mean": report.mean, "stderr": report.stderr,
        "ci95_lo": report.ci95_lo, "ci95_hi": report.ci95_hi,
        "reps": report.reps, "seed": report.seed,
        "n": report.n, "m": report.m, "c": report.c,
    }


def _rows_json(config: ExperimentConfig, rows: list[SweepRow]) -> str:
    if config.command == "measure" and len(rows) == 1 and rows[0].report is not None:
        payload = _report_json(rows[0].report)
    else:
        payload = []
        for row in rows:
            entry = {"distribution": row.distribution, "schedule": row.schedule, "metric": row.metric,
                     "n": row.n, "m": row.m, "error": row.error}
            if row.report is not None:
                entry.update(_report_json(row.report))
            payload.append(entry)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def run(config: ExperimentConfig) -> int:
    rows = _run_rows(config)
    text = _rows_json(config, rows) if config.format == "json" else rows_to_csv(rows)
    if config.out:
        with open(config.out, "w") as handle:
            handle.write(text)
        stream = sys.stdout
    else:
        sys.stdout.write(text)
        stream = sys.stderr
    failures = sum(1 for r in rows if r.report is None)
    summary = f"{config.command} dist={config.dist} rows={len(rows)} errors={failures} seed={config.seed}"
    if config.out:
        summary += f" out={config.out}"
    print(summary, file=stream)
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    try:
        config = parse_args(sys.argv[1:] if argv is None else list(argv))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return run(config)
    except (IamsimError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
