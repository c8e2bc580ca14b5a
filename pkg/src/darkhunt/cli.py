"""Operator command line: simulate, analyze, model, population.

Exit codes: 0 success, 1 usage error, 2 data/config error.  Every
artifact-producing command writes a manifest.json next to its outputs so
runs can be reproduced (manifests carry no timestamps and no secrets).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from datetime import timedelta

from . import __version__
from .population import (
    always_on,
    density_profile,
    peaks_to_rates,
    write_density_csv,
    write_peaks_json,
)
from .ranking import (
    DEFAULT_TOP_N,
    discoverability,
    time_series_report,
    write_report_csv,
    write_report_json,
)
from .records import CsvFormatError, LabeledDataset, day_of_ts, read_csv
from .sim import (
    load_config,
    read_labels_csv,
    simulate,
    write_dataset,
)
from .telescope import (
    DEFAULT_TABLE_PREFIXES,
    ScanPopulation,
    TelescopeSpec,
    days_to_coverage,
    observability_table,
    p_collision,
    time_to_n_packets,
    visible_rate,
)
from .metrics import METRIC_IDS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

WINDOWS = {
    "15m": timedelta(minutes=15),
    "3h": timedelta(hours=3),
    "1d": timedelta(days=1),
}


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class DataError(Exception):
    """Bad input data or config; mapped to exit code 2."""


def _parse_telescope(spec: str) -> TelescopeSpec:
    """Parse `--telescope`: comma-separated CIDRs, @file, or /N shorthand."""
    spec = spec.strip()
    try:
        if spec.startswith("@"):
            with open(spec[1:]) as fh:
                cidrs = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
            return TelescopeSpec.from_cidrs(cidrs)
        if spec.startswith("/"):
            return TelescopeSpec.from_prefix(int(spec[1:]))
        return TelescopeSpec.from_cidrs(spec.split(","))
    except (ValueError, OSError) as exc:
        raise DataError(f"bad telescope spec {spec!r}: {exc}") from None


def _write_manifest(out_dir, command: str, params: dict, outputs: list[str]) -> None:
    blob = json.dumps(params, sort_keys=True, separators=(",", ":")).encode()
    manifest = {
        "tool": "darkhunt",
        "version": __version__,
        "command": command,
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "params": params,
        "outputs": outputs,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_simulate(args) -> int:
    if not os.path.exists(args.config):
        raise DataError(f"config file not found: {args.config}")
    try:
        config = load_config(
            args.config,
            secret_override=args.secret,
            seed_override=args.seed,
            scale_override=args.scale,
        )
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"bad config {args.config}: {exc}") from None
    dataset = simulate(config)
    manifest = write_dataset(
        dataset, args.out, config, inputs={"config": os.path.abspath(args.config)}
    )
    print(
        f"wrote {manifest['records']} records over {manifest['days']} days to {args.out} "
        f"(config {manifest['config_sha256'][:12]})"
    )
    return EXIT_OK


def _load_labeled(csv_path, labels_path) -> LabeledDataset:
    try:
        records = read_csv(csv_path)
    except OSError as exc:
        raise DataError(f"cannot read {csv_path}: {exc}") from None
    except CsvFormatError as exc:
        raise DataError(f"{csv_path}: {exc}") from None
    if not records:
        raise DataError(f"{csv_path}: no records")
    try:
        labels = read_labels_csv(labels_path)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read labels {labels_path}: {exc}") from None
    missing = sorted({day_of_ts(r.ts_us) for r in records} - set(labels))
    if missing:
        raise DataError(
            "unlabeled days: " + ", ".join(d.isoformat() for d in missing)
        )
    return LabeledDataset(records=tuple(records), labels=labels)


def _cmd_analyze(args) -> int:
    dataset = _load_labeled(args.csv, args.labels)
    window = WINDOWS[args.window]
    metrics = args.metrics.split(",") if args.metrics else list(METRIC_IDS)
    for m in metrics:
        if m not in METRIC_IDS:
            raise DataError(f"unknown metric {m!r}; choose from {','.join(METRIC_IDS)}")
    os.makedirs(args.out, exist_ok=True)
    outputs = []
    reports = []
    for metric_id in metrics:
        rows = time_series_report(dataset, metric_id, window=window)
        name = f"report_{metric_id}.csv"
        write_report_csv(rows, os.path.join(args.out, name))
        outputs.append(name)
        per_period = {row.period: row.rank for row in rows}
        reports.append(discoverability(per_period, n=args.top_n, metric_id=metric_id))
        print(f"{metric_id}: D_{args.top_n} = {reports[-1].score:.3f} over {len(rows)} periods")
    write_report_json(reports, os.path.join(args.out, "discoverability.json"))
    outputs.append("discoverability.json")
    _write_manifest(
        args.out,
        "analyze",
        {
            "csv": os.path.abspath(args.csv),
            "labels": os.path.abspath(args.labels),
            "metrics": metrics,
            "top_n": args.top_n,
            "window": args.window,
        },
        outputs,
    )
    return EXIT_OK


def _cmd_model_table(args) -> int:
    prefixes = []
    for tok in args.prefixes.split(","):
        tok = tok.strip().lstrip("/")
        if not tok.isdigit() or not 0 <= int(tok) <= 32:
            raise DataError(f"bad prefix length {tok!r}")
        prefixes.append(int(tok))
    rows = observability_table(prefixes, rate_pps=args.rate, duration_s=args.duration)
    lines = [["size", "p_collision", "p_observe", "expected_packets"]]
    for r in rows:
        lines.append(
            [r["size"], f"{r['p_collision']:.3g}", f"{r['p_observe']:.3g}", f"{r['expected_packets']:.3g}"]
        )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "table.csv"), "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(lines)
        _write_manifest(
            args.out,
            "model table",
            {"prefixes": prefixes, "rate": args.rate, "duration": args.duration},
            ["table.csv"],
        )
        print(f"wrote {os.path.join(args.out, 'table.csv')}")
    else:
        for line in lines:
            print(",".join(str(v) for v in line))
    return EXIT_OK


def _cmd_model_coverage(args) -> int:
    tel = _parse_telescope(args.size)
    pop = ScanPopulation(host_count=1, rate_pps=args.rate, duration_s=args.duration)
    days = days_to_coverage(tel, pop, args.target)
    print(days)
    return EXIT_OK


def _cmd_model_tte(args) -> int:
    if args.packets < 1:
        raise DataError("--packets must be >= 1")
    sizes = args.sizes.split(",") if args.sizes else [args.size]
    if not sizes or sizes == [None]:
        raise DataError("give --size or --sizes")
    rows = [["telescope_size", "visible_pps", "seconds", "hours"]]
    for size in sizes:
        tel = _parse_telescope(size)
        pop = ScanPopulation(host_count=args.hosts, rate_pps=args.rate)
        rate = visible_rate(tel, pop)
        if rate <= 0:
            raise DataError("visible rate is zero; check --hosts/--rate/size")
        seconds = time_to_n_packets(rate, args.packets)
        rows.append([size, f"{rate:.6g}", f"{seconds:.6g}", f"{seconds / 3600:.4g}"])
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "time_to_entropy.csv"), "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
        _write_manifest(
            args.out,
            "model time-to-entropy",
            {"sizes": sizes, "hosts": args.hosts, "rate": args.rate, "packets": args.packets},
            ["time_to_entropy.csv"],
        )
        print(f"wrote {os.path.join(args.out, 'time_to_entropy.csv')}")
    else:
        for line in rows:
            print(",".join(str(v) for v in line))
    return EXIT_OK


def _cmd_population(args) -> int:
    tel = _parse_telescope(args.telescope)
    try:
        records = read_csv(args.csv)
    except OSError as exc:
        raise DataError(f"cannot read {args.csv}: {exc}") from None
    except CsvFormatError as exc:
        raise DataError(f"{args.csv}: {exc}") from None
    by_day: dict = {}
    for rec in records:
        by_day.setdefault(day_of_ts(rec.ts_us), []).append(rec)
    os.makedirs(args.out, exist_ok=True)
    day_reports = {}
    samples = []
    for day in sorted(by_day):
        report = always_on(by_day[day], telescope=tel)
        day_reports[day.isoformat()] = {
            "always_on_count": len(report.always_on_ips),
            "daily_packets": dict(
                sorted(
                    (str(ip), n) for ip, n in report.per_ip_daily_packets.items()
                )
            ),
        }
        samples.extend(report.per_ip_daily_packets.values())
    with open(os.path.join(args.out, "always_on.json"), "w") as fh:
        json.dump(day_reports, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs = ["always_on.json"]
    if len(samples) >= 2:
        profile = density_profile(samples, bandwidth=args.bandwidth)
        write_density_csv(profile, os.path.join(args.out, "density.csv"))
        write_peaks_json(profile, os.path.join(args.out, "peaks.json"), k_telescope=tel.k)
        outputs += ["density.csv", "peaks.json"]
        rates = peaks_to_rates(profile, tel.k) if profile.peaks else []
        print(
            f"{len(samples)} always-on host-days; peaks at "
            + ", ".join(f"{p:.1f} pkts/day ({r:.2f} pps)" for p, r in zip(profile.peaks, rates))
        )
    else:
        print(f"{len(samples)} always-on host-days; too few for a density profile")
    _write_manifest(
        args.out,
        "population",
        {
            "csv": os.path.abspath(args.csv),
            "telescope": str(tel),
            "bandwidth": args.bandwidth,
        },
        outputs,
    )
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="darkhunt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"darkhunt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate labeled telescope traffic")
    p.add_argument("--config", required=True, help="JSON simulator config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--secret", default=None, help="override oracle secret (or set DARKHUNT_SECRET)")
    p.add_argument("--scale", type=float, default=None, help="override population scale")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="rank ports per period and score discoverability")
    p.add_argument("--csv", required=True, help="canonical traffic CSV")
    p.add_argument("--labels", required=True, help="day,port ground-truth CSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--metrics", default=None, help=f"comma list from: {','.join(METRIC_IDS)}")
    p.add_argument("--top-n", type=int, default=DEFAULT_TOP_N, help="rank cutoff (default 100)")
    p.add_argument("--window", choices=sorted(WINDOWS), default="1d", help="ranking window")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("model", help="analytic observability model")
    msub = p.add_subparsers(dest="model_command", required=True)

    t = msub.add_parser("table", help="observability vs telescope size")
    t.add_argument("--prefixes", default=",".join(f"/{n}" for n in DEFAULT_TABLE_PREFIXES))
    t.add_argument("--rate", type=float, default=10.0, help="per-host pps")
    t.add_argument("--duration", type=float, default=86400.0, help="seconds on one port")
    t.add_argument("--out", default=None, help="write table.csv + manifest here")
    t.set_defaults(func=_cmd_model_table)

    c = msub.add_parser("coverage", help="days until a host is seen w.p. >= target")
    c.add_argument("--size", required=True, help="telescope: /N, CIDR list, or @file")
    c.add_argument("--target", type=float, required=True)
    c.add_argument("--rate", type=float, default=10.0)
    c.add_argument("--duration", type=float, default=86400.0)
    c.set_defaults(func=_cmd_model_coverage)

    e = msub.add_parser("time-to-entropy", help="collection time until n packets")
    e.add_argument("--size", default=None, help="telescope: /N, CIDR list, or @file")
    e.add_argument("--sizes", default=None, help="comma list of sizes for a curve")
    e.add_argument("--hosts", type=int, required=True, help="visible scanning hosts")
    e.add_argument("--rate", type=float, default=10.0, help="per-host pps")
    e.add_argument("--packets", type=int, default=128)
    e.add_argument("--out", default=None, help="write time_to_entropy.csv + manifest here")
    e.set_defaults(func=_cmd_model_tte)

    p = sub.add_parser("population", help="always-on hosts and scan-rate density")
    p.add_argument("--csv", required=True, help="canonical traffic CSV")
    p.add_argument("--telescope", required=True, help="telescope: /N, CIDR list, or @file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--bandwidth", type=float, default=None, help="KDE bandwidth override")
    p.set_defaults(func=_cmd_population)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"darkhunt: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"darkhunt: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
