"""Command-line front end: canned experiments, custom grids, self test.

Configuration is flat key=value text (comma-separated lists), with every
key also available as a flag; flags override file values. Exit codes:
0 success, 1 configuration error, 2 selftest failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import chansim, plots, rankanalysis
from .codeparams import ImportanceClass, load_profiles
from .selftest import selftest

_EXPERIMENTS = {
    # id: (K, overhead) for the failure-curve experiments
    "1": (55, 0),
    "2": (101, 0),
    "3": (213, 0),
    "4": (101, 1),
}

CONFIG_KEYS = ("experiment", "k", "trials", "seed", "out", "overhead",
               "grid", "profiles", "workers", "runs", "symbol_size", "plot")


class ConfigError(Exception):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    k: int | None = None
    trials: int = 100_000
    seed: int = chansim.DEFAULT_SEED
    out: str = "."
    overhead: int | None = None
    grid: tuple = chansim.DEFAULT_GRID
    profiles: str | None = None
    workers: int = 1
    runs: int = 5000
    symbol_size: int = 1
    plot: bool = True

    def validate(self):
        known = set(_EXPERIMENTS) | {"5", "rank", "custom"}
        if self.experiment not in known:
            raise ConfigError("experiment must be one of %s"
                              % ", ".join(sorted(known)))
        if self.experiment == "custom" and self.k is None:
            raise ConfigError("custom experiment needs k=<source block size>")
        for g in self.grid:
            if not 0.0 <= g <= 1.0:
                raise ConfigError("grid values must lie in [0, 1], got %r" % (g,))
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.runs < 100:
            raise ConfigError("runs must be >= 100")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.symbol_size < 1:
            raise ConfigError("symbol_size must be >= 1")


def parse_config(text, source="<config>"):
    """Flat key=value lines; # comments; keys restricted to the allowlist."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("%s:%d: expected key=value" % (source, lineno))
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError("%s:%d: unknown key %r (allowed: %s)"
                              % (source, lineno, key, ", ".join(CONFIG_KEYS)))
        values[key] = val
    return values


def serialize_config(cfg):
    """Inverse of parse_config + config_from_values for a full round trip."""
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        if f.name == "grid":
            v = ",".join(repr(x) for x in v)
        elif f.name == "plot":
            v = "true" if v else "false"
        lines.append("%s=%s" % (f.name, v))
    return "\n".join(lines) + "\n"


def _coerce(values):
    out = dict(values)
    for key in ("k", "trials", "seed", "overhead", "workers", "runs",
                "symbol_size"):
        if key in out and out[key] is not None and not isinstance(out[key], int):
            try:
                out[key] = int(out[key])
            except ValueError:
                raise ConfigError("%s must be an integer, got %r" % (key, out[key]))
    if "grid" in out and isinstance(out["grid"], str):
        try:
            out["grid"] = tuple(float(x) for x in out["grid"].split(","))
        except ValueError:
            raise ConfigError("grid must be comma-separated numbers")
    if "plot" in out and isinstance(out["plot"], str):
        low = out["plot"].lower()
        if low not in ("true", "false"):
            raise ConfigError("plot must be true or false")
        out["plot"] = low == "true"
    return out


def config_from_values(values):
    values = _coerce(values)
    if "experiment" not in values:
        raise ConfigError("experiment is required (1-5, rank, or custom)")
    return ExperimentConfig(**values)


def _resolve_profiles(cfg):
    if cfg.profiles is None:
        return None
    try:
        return load_profiles(cfg.profiles)
    except (OSError, ValueError) as exc:
        raise ConfigError("cannot load profiles from %s: %s" % (cfg.profiles, exc))


def _run_failure_experiment(cfg, ident, K, overhead, profiles, outdir):
    try:
        report = chansim.run_experiment(
            K, grid=cfg.grid, trials=cfg.trials, overhead=overhead,
            seed=cfg.seed, workers=cfg.workers, profiles=profiles,
            T=cfg.symbol_size)
    except ValueError as exc:
        raise ConfigError(str(exc))
    base = outdir / ("experiment%s" % ident)
    chansim.write_experiment_csv(report, str(base) + ".csv")
    chansim.write_shortfall_csv(report, str(base) + "_shortfall.csv")
    if cfg.plot:
        plots.failure_curves(report, str(base) + ".png")
    for i, p in enumerate(report.grid):
        lib = report.stats[ImportanceClass.LIB][i]
        mib = report.stats[ImportanceClass.MIB][i]
        print("p=%.2f: LIB %d/%d (%.3g)  MIB %d/%d (%.3g)  shortfall %d"
              % (p, lib.failures, lib.trials, lib.failure_rate,
                 mib.failures, mib.trials, mib.failure_rate,
                 lib.shortfall_trials))
    return 0


def _run_timing(cfg, profiles, outdir):
    ks = (cfg.k,) if cfg.k is not None else (55, 101, 213)
    reports = []
    for K in ks:
        try:
            rep = chansim.measure_timing(K, runs=cfg.runs, seed=cfg.seed,
                                         profiles=profiles, T=cfg.symbol_size)
        except ValueError as exc:
            raise ConfigError(str(exc))
        reports.append(rep)
        print("K=%d: LIB %.0f ns, MIB %.0f ns, increase %.2f%% (ops %.2f%%)"
              % (K,
                 rep.median_encode_ns[ImportanceClass.LIB]
                 + rep.median_decode_ns[ImportanceClass.LIB],
                 rep.median_encode_ns[ImportanceClass.MIB]
                 + rep.median_decode_ns[ImportanceClass.MIB],
                 rep.pct_increase(), rep.ops_pct_increase()))
    chansim.write_timing_csv(reports, str(outdir / "experiment5_timing.csv"))
    if cfg.plot:
        plots.timing_bars(reports, str(outdir / "experiment5_timing.png"))
    return 0


def _run_rank(cfg, outdir):
    rows = rankanalysis.rank_table(range(1, 17))
    rankanalysis.write_rank_csv(rows, str(outdir / "rank_analysis.csv"))
    if cfg.plot:
        plots.rank_curves(rows, str(outdir / "rank_analysis.png"))
    for r in rows:
        print("H=%d: p_r=%.6f p_K=%.6f (approx %.6f) p_N=%.6f"
              % (r.H, r.p_r_exact, r.p_K_exact, r.p_K_approx, r.p_N))
    return 0


def run(config):
    """Execute one configured experiment; returns a process exit status."""
    try:
        config.validate()
        profiles = _resolve_profiles(config)
        outdir = Path(config.out)
        outdir.mkdir(parents=True, exist_ok=True)
        if config.experiment in _EXPERIMENTS:
            k, oh = _EXPERIMENTS[config.experiment]
            if config.k is not None:
                k = config.k
            if config.overhead is not None:
                oh = config.overhead
            return _run_failure_experiment(config, config.experiment, k, oh,
                                           profiles, outdir)
        if config.experiment == "5":
            return _run_timing(config, profiles, outdir)
        if config.experiment == "rank":
            return _run_rank(config, outdir)
        k = config.k
        oh = config.overhead if config.overhead is not None else 0
        return _run_failure_experiment(config, "_custom_k%d" % k, k, oh,
                                       profiles, outdir)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 1


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="raptorq-uep",
        description="erasure-code experiments with per-class precode sizing")
    sub = ap.add_subparsers(dest="command", required=True)
    rp = sub.add_parser("run", help="run an experiment from config/flags")
    rp.add_argument("--config", help="key=value config file")
    rp.add_argument("--experiment", help="1-5, rank, or custom")
    rp.add_argument("--k", type=int, help="source block size override")
    rp.add_argument("--trials", type=int, help="trials per grid point")
    rp.add_argument("--seed", type=int, help="master RNG seed")
    rp.add_argument("--out", help="output directory")
    rp.add_argument("--overhead", type=int, help="extra symbols the decoder waits for")
    rp.add_argument("--profiles", help="precode profile file; defaults to the shipped set")
    rp.add_argument("--grid", help="comma-separated erasure probabilities")
    rp.add_argument("--workers", type=int, help="parallel trial workers")
    rp.add_argument("--runs", type=int, help="timing runs (experiment 5)")
    rp.add_argument("--symbol-size", type=int, dest="symbol_size",
                    help="symbol payload bytes")
    rp.add_argument("--no-plot", action="store_true", help="skip figure output")
    sub.add_parser("selftest", help="run the built-in sanity suites")
    return ap


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "selftest":
        report = selftest()
        return 0 if report.ok else 2
    try:
        values = {}
        if args.config:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise ConfigError("cannot read config file: %s" % exc)
            values = parse_config(text, source=args.config)
        for key in CONFIG_KEYS:
            if key == "plot":
                continue
            flag = getattr(args, key, None)
            if flag is not None:
                values[key] = flag
        if args.no_plot:
            values["plot"] = False
        config = config_from_values(values)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
