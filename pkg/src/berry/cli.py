"""Command-line entry point: ``berry <command> --config FILE``."""
import argparse
import csv
import io
import sys
from dataclasses import replace

from .errors import ConfigError, InvalidArgumentError, ResolutionError
from .experiments import dumps, load_config, run

EXIT_OK, EXIT_CONFIG, EXIT_RESOLUTION, EXIT_IO = 0, 2, 3, 4

COMMANDS = {
    "simulate": None,  # whatever the config names
    "nodal": "clt",
    "cov": None,
    "chaos": "chaos",
    "asymptotics": "asymptotics",
    "sheet": "sheet",
}


def _parser():
    p = argparse.ArgumentParser(prog="berry", description="Random wave nodal statistics")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="YAML or JSON experiment file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (default: config output.path or stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--jobs", type=int)
    return p


def _asymptotics_csv(cfg):
    from .asymptotics import covariance_rate_check

    doms = cfg.domain_objects
    D1, D2 = doms[0], doms[1] if len(doms) > 1 else doms[0]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("pair", "E", "numeric", "predicted", "ratio"))
    for E in cfg.energies:
        for row in covariance_rate_check(list(cfg.pairs), E, D1, D2):
            w.writerow((row["pair"], repr(E), repr(row["numeric"]),
                        repr(row["predicted"]), repr(row["ratio"])))
    return buf.getvalue()


def _configure(args):
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.jobs is not None:
        changes["jobs"] = args.jobs
    target = COMMANDS[args.command]
    if args.command == "cov" and cfg.experiment not in ("clt", "vortex"):
        target = "clt"
    if target is not None and cfg.experiment != target:
        changes["experiment"] = target
    return replace(cfg, **changes) if changes else cfg


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = _configure(args)
    except OSError as exc:
        print(f"berry: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"berry: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fmt = args.format or cfg.output.get("format") or ("json" if args.command == "cov" else "csv")
    try:
        if cfg.experiment == "asymptotics":
            text = _asymptotics_csv(cfg)
        else:
            text = dumps(run(cfg), fmt)
    except ResolutionError as exc:
        print(f"berry: resolution error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"berry: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.output.get("path")
    try:
        if out in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"berry: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
