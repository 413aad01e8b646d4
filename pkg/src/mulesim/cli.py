"""Command-line front end.

Subcommands:

- ``run <config> -o <dir> [--jobs N]``: sweep a batch experiment and
  write results.csv, summary.csv and significance.csv.
- ``plotdata <results.csv> --objective <name> [-o file] [--svg file]``:
  pivot per-strategy means over fix durations, optionally as an SVG
  line chart.
- ``replay <scenario> --strategy <name> [--mules N] -o <log>``: run one
  serialized scenario and dump the event log.

Exit codes: 0 success, 2 bad input, 3 I/O failure. Machine-readable
floats are printed with 17 significant digits so reruns are
byte-identical; the console summary rounds to 3.
"""

import argparse
import csv
import sys
from collections import OrderedDict

from .experiments import (
    ConfigError,
    ExperimentConfig,
    parse_strategy,
    run_batch,
)
from .metrics import aggregate, welch_t_test
from .scenario import load_scenario
from .simulation import run as run_simulation

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3

OBJECTIVES = ("avg_downtime", "max_downtime", "avg_travel", "max_travel")

_CONFIG_KEYS = {
    "area_width": float,
    "area_height": float,
    "nodes": int,
    "mules": int,
    "failures": int,
    "horizon": float,
    "fix_durations": "float_list",
    "distribution": str,
    "vicinity_radius": float,
    "boost_factor": float,
    "strategies": "str_list",
    "seed_base": int,
    "repetitions": int,
    "mule_speed": float,
}

_REQUIRED_KEYS = (
    "area_width",
    "area_height",
    "nodes",
    "mules",
    "failures",
    "horizon",
    "fix_durations",
    "strategies",
)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse the line-oriented ``key = value`` experiment format."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        kind = _CONFIG_KEYS[key]
        try:
            if kind == "float_list":
                values[key] = tuple(float(v) for v in val.split(",") if v.strip())
            elif kind == "str_list":
                values[key] = tuple(v.strip() for v in val.split(",") if v.strip())
            else:
                values[key] = kind(val)
        except ValueError:
            raise ConfigError(f"bad value for {key!r}: {val!r}", lineno) from None
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    config = ExperimentConfig(
        area_width=values["area_width"],
        area_height=values["area_height"],
        n_nodes=values["nodes"],
        n_mules=values["mules"],
        f_count=values["failures"],
        horizon=values["horizon"],
        fix_durations=values["fix_durations"],
        strategies=values["strategies"],
        distribution=values.get("distribution", "uniform"),
        vicinity_radius=values.get("vicinity_radius", 20.0),
        boost_factor=values.get("boost_factor", 2.0),
        seed_base=values.get("seed_base", 0),
        repetitions=values.get("repetitions", 50),
        mule_speed=values.get("mule_speed", 1.0),
    )
    config.validate()
    return config


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def write_results_csv(path, records) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "strategy",
                "f_d",
                "seed",
                "avg_downtime",
                "max_downtime",
                "avg_travel",
                "max_travel",
                "unserved_count",
            ]
        )
        for rec in records:
            s = rec.summary
            writer.writerow(
                [
                    rec.strategy,
                    _fmt(rec.f_d),
                    rec.seed,
                    _fmt(s.avg_downtime),
                    _fmt(s.max_downtime),
                    _fmt(s.avg_travel),
                    _fmt(s.max_travel),
                    rec.unserved,
                ]
            )


def _grouped(records):
    """records keyed by (strategy, f_d), preserving record order."""
    groups = OrderedDict()
    for rec in records:
        groups.setdefault((rec.strategy, rec.f_d), []).append(rec)
    return groups


def write_summary_csv(path, records) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["strategy", "f_d"]
        for name in OBJECTIVES:
            header += [f"{name}_mean", f"{name}_sd"]
        writer.writerow(header)
        for (strategy, f_d), group in _grouped(records).items():
            stats = aggregate([rec.summary for rec in group])
            row = [strategy, _fmt(f_d)]
            for name in OBJECTIVES:
                row += [_fmt(getattr(stats.mean, name)), _fmt(getattr(stats.sd, name))]
            writer.writerow(row)


def write_significance_csv(path, records, strategies) -> None:
    """Pairwise Welch tests on avg_downtime per fix duration.

    Degenerate pairs (fewer than two runs, or both sides constant) are
    skipped, so the file may hold only its header for tiny batches.
    """
    samples = {}
    fds = []
    for rec in records:
        key = (rec.strategy, rec.f_d)
        samples.setdefault(key, []).append(rec.summary.avg_downtime)
        if rec.f_d not in fds:
            fds.append(rec.f_d)
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["f_d", "strategy_a", "strategy_b", "t", "dof", "p"])
        for f_d in sorted(fds):
            for i in range(len(strategies)):
                for j in range(i + 1, len(strategies)):
                    a = samples.get((strategies[i], f_d), [])
                    b = samples.get((strategies[j], f_d), [])
                    try:
                        res = welch_t_test(a, b)
                    except ValueError:
                        continue
                    writer.writerow(
                        [
                            _fmt(f_d),
                            strategies[i],
                            strategies[j],
                            _fmt(res.t),
                            _fmt(res.dof),
                            _fmt(res.p),
                        ]
                    )


def _print_console_summary(records) -> None:
    print(f"{'strategy':<48} {'f_d':>10} {'avg_downtime':>14} {'sd':>10}")
    for (strategy, f_d), group in _grouped(records).items():
        stats = aggregate([rec.summary for rec in group])
        print(
            f"{strategy:<48} {f_d:>10.3g} "
            f"{stats.mean.avg_downtime:>14.3f} {stats.sd.avg_downtime:>10.3f}"
        )


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    records = run_batch(config, jobs=args.jobs)
    try:
        import os

        os.makedirs(args.output, exist_ok=True)
        write_results_csv(os.path.join(args.output, "results.csv"), records)
        write_summary_csv(os.path.join(args.output, "summary.csv"), records)
        write_significance_csv(
            os.path.join(args.output, "significance.csv"),
            records,
            list(config.strategies),
        )
    except OSError as exc:
        print(f"error: cannot write results: {exc}", file=sys.stderr)
        return EXIT_IO
    _print_console_summary(records)
    print(f"wrote {len(records)} runs to {args.output}")
    return EXIT_OK


def read_results_csv(path):
    """Rows of results.csv as dicts; raises ValueError when malformed."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "strategy" not in reader.fieldnames:
            raise ValueError("not a results.csv file")
        rows = list(reader)
    if not rows:
        raise ValueError("results file has no data rows")
    return rows


def pivot_objective(rows, objective):
    """Mean objective per (strategy, f_d), pivoted for plotting.

    Returns (fix_durations ascending, strategy names in first-appearance
    order, column-major means[strategy][f_d index]).
    """
    if objective not in OBJECTIVES:
        raise ValueError(
            f"unknown objective {objective!r}; pick one of {', '.join(OBJECTIVES)}"
        )
    strategies = []
    sums = {}
    counts = {}
    fds = []
    for row in rows:
        try:
            strategy = row["strategy"]
            f_d = float(row["f_d"])
            value = float(row[objective])
        except (KeyError, TypeError, ValueError):
            raise ValueError("malformed results row") from None
        if strategy not in strategies:
            strategies.append(strategy)
        if f_d not in fds:
            fds.append(f_d)
        key = (strategy, f_d)
        sums[key] = sums.get(key, 0.0) + value
        counts[key] = counts.get(key, 0) + 1
    fds.sort()
    table = []
    for strategy in strategies:
        col = []
        for f_d in fds:
            key = (strategy, f_d)
            if key not in counts:
                raise ValueError(
                    f"missing runs for strategy {strategy!r} at f_d={f_d}"
                )
            col.append(sums[key] / counts[key])
        table.append(col)
    return fds, strategies, table


def write_plot_csv(path_or_file, fds, strategies, table) -> None:
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", encoding="ascii", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["f_d"] + list(strategies))
        for i, f_d in enumerate(fds):
            writer.writerow([_fmt(f_d)] + [_fmt(col[i]) for col in table])
    finally:
        if own:
            fh.close()


_SVG_COLORS = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)


def render_svg(fds, strategies, table, objective) -> str:
    """A static polyline chart: one line per strategy over fix duration."""
    width, height = 640, 420
    left, right, top, bottom = 70, 160, 30, 50
    px = width - left - right
    py = height - top - bottom
    x_min, x_max = min(fds), max(fds)
    x_span = (x_max - x_min) or 1.0
    y_max = max(max(col) for col in table) or 1.0
    y_max *= 1.05

    def sx(v):
        return left + (v - x_min) / x_span * px

    def sy(v):
        return top + py - v / y_max * py

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + py}" x2="{left + px}" y2="{top + py}" '
        'stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + py}" stroke="black"/>',
        f'<text x="{left + px / 2:.1f}" y="{height - 12}" text-anchor="middle" '
        'font-size="13">failure duration</text>',
        f'<text x="16" y="{top + py / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {top + py / 2:.1f})">{objective}</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = x_min + frac * x_span
        yv = frac * y_max
        parts.append(
            f'<text x="{sx(xv):.1f}" y="{top + py + 16}" text-anchor="middle" '
            f'font-size="11">{xv:.6g}</text>'
        )
        parts.append(
            f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end" '
            f'font-size="11">{yv:.6g}</text>'
        )
    for s, (strategy, col) in enumerate(zip(strategies, table)):
        color = _SVG_COLORS[s % len(_SVG_COLORS)]
        points = " ".join(f"{sx(f):.2f},{sy(v):.2f}" for f, v in zip(fds, col))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{points}"/>'
        )
        ly = top + 14 + 16 * s
        parts.append(
            f'<line x1="{left + px + 8}" y1="{ly - 4}" x2="{left + px + 28}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{left + px + 32}" y="{ly}" font-size="11">{strategy}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plotdata(args) -> int:
    try:
        rows = read_results_csv(args.results)
        fds, strategies, table = pivot_objective(rows, args.objective)
    except OSError as exc:
        print(f"error: cannot read results: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.output:
            write_plot_csv(args.output, fds, strategies, table)
        else:
            write_plot_csv(sys.stdout, fds, strategies, table)
        if args.svg:
            with open(args.svg, "w", encoding="ascii", newline="\n") as fh:
                fh.write(render_svg(fds, strategies, table, args.objective))
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: malformed scenario: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        strategy = parse_strategy(args.strategy, args.speed)
        result = run_simulation(scenario, strategy, args.mules, record_log=True)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        with open(args.output, "w", encoding="ascii", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["time", "event_kind", "mule_id", "failure_id", "x", "y"])
            for t, kind, mule_id, failure_id, x, y in result.event_log:
                writer.writerow([_fmt(t), kind, mule_id, failure_id, _fmt(x), _fmt(y)])
    except OSError as exc:
        print(f"error: cannot write log: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mulesim",
        description="Simulate mobile repair mules maintaining a sensor field.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a batch experiment from a config file")
    p_run.add_argument("config", help="experiment config (key = value lines)")
    p_run.add_argument("-o", "--output", required=True, help="output directory")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel worker count")
    p_run.set_defaults(func=cmd_run)

    p_plot = sub.add_parser("plotdata", help="pivot results for plotting")
    p_plot.add_argument("results", help="results.csv from a run")
    p_plot.add_argument("--objective", required=True, help="|".join(OBJECTIVES))
    p_plot.add_argument("-o", "--output", help="pivoted CSV path (default stdout)")
    p_plot.add_argument("--svg", help="also render a static SVG line chart here")
    p_plot.set_defaults(func=cmd_plotdata)

    p_replay = sub.add_parser("replay", help="replay one scenario with an event log")
    p_replay.add_argument("scenario", help="serialized scenario file")
    p_replay.add_argument("--strategy", required=True, help="preset or trait tuple")
    p_replay.add_argument("--mules", type=int, default=1, help="mule count")
    p_replay.add_argument("--speed", type=float, default=1.0, help="mule speed")
    p_replay.add_argument("-o", "--output", required=True, help="event log path")
    p_replay.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
