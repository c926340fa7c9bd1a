"""Command line entry point ``rwsum``."""
from __future__ import annotations

import argparse
import math
import sys

from ..errors import ConfigError, InvalidParameter, NumericError, RwsumError
from . import report
from .config import ExperimentConfig, _as_int, load, validate
from .pipelines import run_experiment, run_tail_eval

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment INI file")
    common.add_argument("--seed", type=int, help="override the seed")
    common.add_argument("--samples", type=_as_int, help="override the Monte-Carlo sample count")
    common.add_argument("--threads", type=int, help="worker threads for simulation blocks")
    common.add_argument("--out", help="output directory")
    common.add_argument("--model", help="increment model, e.g. 'two_sided_pareto(alpha=1,beta=2)'")
    common.add_argument("--x", type=_floats, help="comma separated x grid")
    common.add_argument("--n", type=_ints, help="comma separated n list")

    p = argparse.ArgumentParser(prog="rwsum", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("tail-eval", parents=[common], help="evaluate the tail of a zoo model")
    v = sub.add_parser("verify", parents=[common], help="ratio table for weighted sums")
    v.add_argument("--estimator", choices=("auto", "oracle", "crude", "conditional", "ak"))
    r = sub.add_parser("ruin", parents=[common], help="finite, infinite or random-time ruin")
    r.add_argument("--estimator", choices=("auto", "crude", "conditional", "ak"))
    r.add_argument("--discount", help="law of the discount factor Y")
    r.add_argument("--stopping", help="e.g. 'geometric(q=0.5,n_max=60)'")
    b = sub.add_parser("breiman", parents=[common], help="extended Breiman tails by quadrature")
    b.add_argument("--discount", help="law of the discount factor Y")
    sub.add_parser("checks", parents=[common], help="weight and long-tail condition checks")
    rep = sub.add_parser("report", help="summarize a ratio-table CSV")
    rep.add_argument("csv", nargs="+")
    return p


def _config_from_args(args):
    if args.config:
        cfg = load(args.config)
    elif args.model and args.x:
        cfg = ExperimentConfig(increments=args.model, x_grid=args.x)
    else:
        raise ConfigError("give --config, or --model together with --x", position="argv")
    upd = {"pipeline": args.command}
    for attr, key in (("seed", "seed"), ("N", "samples"), ("threads", "threads"),
                      ("output", "out"), ("increments", "model"), ("x_grid", "x"),
                      ("n_list", "n"), ("estimator", "estimator"), ("discount", "discount"),
                      ("stopping", "stopping")):
        val = getattr(args, key, None)
        if val is not None:
            upd[attr] = val
    return validate(cfg.replace(**upd))


def _report(paths, out=None):
    out = out or sys.stdout
    for path in paths:
        rows = report.read_table(path)
        print(f"{path}: {len(rows)} rows", file=out)
        print(f"{'x':>12} {'n':>4} {'ratio':>12} {'|ratio-1|':>12} flag", file=out)
        for r in rows:
            ratio = float(r["ratio"])
            dev = abs(ratio - 1.0) if math.isfinite(ratio) else math.nan
            print(f"{float(r['x']):>12.4g} {r['n']:>4} {ratio:>12.6g} {dev:>12.3g} {r['flag']}",
                  file=out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            _report(args.csv)
            return EXIT_OK
        cfg = _config_from_args(args)
        if args.command == "tail-eval" and not args.out and not args.config:
            rows, diag = run_tail_eval(cfg)
            print("x,tail,cdf")
            for x, t, c in rows:
                print(f"{report.num(x)},{report.num(t)},{report.num(c)}")
            if diag is not None:
                print("# flags " + " ".join(f"{k}={v}" for k, v in sorted(diag.flags.items())))
            return EXIT_OK
        man = run_experiment(cfg)
        for a in man.artifacts:
            print(a["path"])
        for e in man.errors:
            print(f"row error: {e}", file=sys.stderr)
        # artifacts are written either way; failed rows still count as a numeric failure
        return EXIT_NUMERIC if man.errors else EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidParameter as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, RwsumError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
