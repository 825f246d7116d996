"""Command-line experiment runner.

Subcommands:
    security-bench  recommendation-attack sweep over the four aggregation schemes
    netsim          one simulation per (point, scheme, seed) of a mesh config
    sweep           netsim over a blackhole-count or grayhole-drop-rate axis

Every output file gets a ``<stem>.config.yaml`` sibling holding the fully
resolved configuration, seeds included, so any row can be reproduced.

Seeds: ``--seed`` lists run seeds directly. With ``--replicates R`` the first
seed is a master seed and run i uses ``derive_seed(master, i)``, the first
eight bytes of sha256("<master>:<i>") as an integer below 2**31. Adding
replicates therefore never changes the seeds of earlier ones.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path
from typing import Any

from dstrust import bench
from dstrust.netsim.config import SCHEMES as NET_SCHEMES
from dstrust.netsim.config import ConfigError, SimConfig, dump_config, load_config, parse_override
from dstrust.netsim.sim import run_simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

NETSIM_HEADER = ("scheme", "seed", "n_attackers", "attack", "drop_prob", "pdr", "nro", "throughput_bps", "fpr")
SWEEP_ATTACKS = ("blackhole", "grayhole")
DEFAULT_BLACKHOLE_COUNTS = tuple(range(13))
DEFAULT_DROP_RATES = tuple(round(0.1 * i, 1) for i in range(11))
DEFAULT_GRAYHOLE_FRACTION = 0.1


def derive_seed(master: int, index: int) -> int:
    digest = hashlib.sha256(f"{master}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % 2**31


def record_path(out: Path) -> Path:
    return out.with_name(out.stem + ".config.yaml")


def _parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"seeds must be integers, got {text!r}") from exc
    if not seeds:
        raise ConfigError("at least one seed is required")
    return seeds


def resolve_seeds(seed_text: str, replicates: int | None) -> list[int]:
    seeds = _parse_seeds(seed_text)
    if replicates is None:
        return seeds
    if replicates < 1:
        raise ConfigError("--replicates must be at least 1")
    return [derive_seed(seeds[0], i) for i in range(replicates)]


def _overrides(pairs: list[str] | None) -> dict[str, Any]:
    return dict(parse_override(p) for p in pairs or ())


def _schemes(text: str | None, allowed: tuple[str, ...]) -> tuple[str, ...] | None:
    if text is None:
        return None
    schemes = tuple(s.strip() for s in text.split(",") if s.strip())
    unknown = [s for s in schemes if s not in allowed]
    if unknown or not schemes:
        raise ConfigError(f"--scheme must name some of {', '.join(allowed)}")
    return schemes


# security bench


def build_sweep_config(args: argparse.Namespace) -> bench.SweepConfig:
    data = load_config(args.config) if args.config else {}
    data.update(_overrides(args.set))
    if args.attack:
        data["attack"] = args.attack
    schemes = _schemes(args.scheme, bench.SCHEMES)
    if schemes:
        data["schemes"] = schemes
    if "schemes" in data:
        data["schemes"] = tuple(data["schemes"])
    known = {f.name for f in fields(bench.SweepConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    try:
        return bench.SweepConfig(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def run_security_bench(args: argparse.Namespace) -> int:
    cfg = build_sweep_config(args)
    out = Path(args.out)
    curves = bench.run_sweep(cfg)
    bench.write_curves(curves, out)
    dump_config({"command": "security-bench", "config": bench.config_record(cfg)}, record_path(out))
    for curve in curves:
        crossing = "none" if curve.crossing is None else str(curve.crossing)
        print(f"{curve.scheme}\t{curve.attack.value}\tcrossing={crossing}")
    return EXIT_OK


# simulator


def sweep_points(axis: dict[str, Any] | None, n_nodes: int) -> list[dict[str, Any]]:
    """Expand a sweep axis into per-point config overrides."""
    if not axis:
        return [{}]
    attack = axis.get("attack", "blackhole")
    if attack == "blackhole":
        counts = axis.get("counts", DEFAULT_BLACKHOLE_COUNTS)
        return [{"n_blackholes": int(c), "n_grayholes": 0} for c in counts]
    if attack == "grayhole":
        rates = axis.get("drop_rates", DEFAULT_DROP_RATES)
        count = int(axis.get("count", round(DEFAULT_GRAYHOLE_FRACTION * n_nodes)))
        return [{"n_blackholes": 0, "n_grayholes": count, "grayhole_drop_prob": float(r)} for r in rates]
    raise ConfigError(f"sweep attack must be one of {', '.join(SWEEP_ATTACKS)}, got {attack!r}")


def _attack_label(cfg: SimConfig, seed: int) -> tuple[int, str, float]:
    attackers = cfg.resolved_attackers(seed)
    roles = {a.role for a in attackers}
    if not attackers:
        return 0, "none", 0.0
    if roles == {"blackhole"}:
        return len(attackers), "blackhole", 1.0
    if roles == {"grayhole"}:
        return len(attackers), "grayhole", attackers[0].drop_prob
    return len(attackers), "mixed", max(a.drop_prob for a in attackers)


def _run_row(job: tuple[SimConfig, int]) -> list[str]:
    cfg, seed = job
    report = run_simulation(cfg, seed)
    n_attackers, attack, drop_prob = _attack_label(cfg, seed)
    return [
        cfg.scheme,
        str(seed),
        str(n_attackers),
        attack,
        repr(drop_prob),
        repr(report.pdr),
        report.nro_text(),
        repr(report.throughput_bps),
        repr(report.false_positive_rate),
    ]


def build_netsim_jobs(args: argparse.Namespace, default_axis: dict[str, Any] | None):
    data = load_config(args.config) if args.config else {}
    axis = data.pop("sweep", None)
    if axis is not None and not isinstance(axis, dict):
        raise ConfigError("sweep must be a mapping")
    if default_axis is not None:
        axis = {**default_axis, **(axis or {})}
    if args.attack:
        axis = {**(axis or {}), "attack": args.attack}
    data.update(_overrides(args.set))
    base = SimConfig.from_dict(data)
    schemes = _schemes(args.scheme, NET_SCHEMES)
    if schemes is None:
        schemes = (base.scheme,) if "scheme" in data else NET_SCHEMES
    seeds = resolve_seeds(args.seed, args.replicates)
    try:
        jobs = [
            (base.with_overrides(scheme=scheme, **point), seed)
            for point in sweep_points(axis, base.n_nodes)
            for scheme in schemes
            for seed in seeds
        ]
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    record = {
        "command": args.command,
        "config": base.to_dict(),
        "sweep": axis,
        "schemes": list(schemes),
        "seeds": seeds,
        "seed_scheme": None if args.replicates is None else f"derive_seed({_parse_seeds(args.seed)[0]}, i)",
    }
    return jobs, record


def run_netsim(args: argparse.Namespace, default_axis: dict[str, Any] | None = None) -> int:
    jobs, record = build_netsim_jobs(args, default_axis)
    out = Path(args.out)
    dump_config(record, record_path(out))
    append = args.append and out.exists() and out.stat().st_size > 0
    with open(out, "a" if append else "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if not append:
            writer.writerow(NETSIM_HEADER)
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = pool.map(_run_row, jobs)
                for row in rows:
                    writer.writerow(row)
                    fh.flush()
        else:
            for job in jobs:
                writer.writerow(_run_row(job))
                fh.flush()
    print(f"wrote {len(jobs)} rows to {out}")
    return EXIT_OK


def run_sweep_command(args: argparse.Namespace) -> int:
    return run_netsim(args, default_axis={"attack": "blackhole"})


# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dstrust", description="DS-Trust experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out_default: str) -> None:
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--out", default=out_default, help="output CSV path")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
        p.add_argument("--scheme", help="comma-separated scheme list")

    sb = sub.add_parser("security-bench", help="recommendation-attack sweep")
    common(sb, "security_bench.csv")
    sb.add_argument("--attack", choices=[a.value for a in bench.Attack])

    for name, helptext in (("netsim", "mesh simulation runs"), ("sweep", "mesh simulation attack sweep")):
        p = sub.add_parser(name, help=helptext)
        common(p, f"{name}.csv")
        p.add_argument("--seed", default="0", help="seed list N[,N...]; master seed with --replicates")
        p.add_argument("--replicates", type=int, help="derive this many run seeds from the first seed")
        p.add_argument("--attack", choices=SWEEP_ATTACKS, help="sweep axis; overrides the config's sweep.attack")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--append", action="store_true", help="append rows to an existing CSV")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"security-bench": run_security_bench, "netsim": run_netsim, "sweep": run_sweep_command}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failing run maps to the runtime exit code
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
