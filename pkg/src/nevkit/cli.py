"""``nevkit run [config] [overrides]``: run experiment suites and write CSV."""

import argparse
import logging
import sys

from . import harness


def build_parser():
    p = argparse.ArgumentParser(prog="nevkit", description="Numerical Nevanlinna-theory experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one or more experiment suites")
    r.add_argument("config", nargs="?", help="INI-style config file (key = value, one section per experiment)")
    r.add_argument("--suite", choices=harness.SUITES)
    r.add_argument("--function", help="catalog function, e.g. gamma, exppoly[1,0,0], tan[1.5707963267948966]")
    r.add_argument("--c", help="shift, or comma-separated shifts, e.g. 1,i,2")
    r.add_argument("--r-start", type=float)
    r.add_argument("--r-stop", type=float)
    r.add_argument("--r-count", type=int)
    r.add_argument("--r-log", action=argparse.BooleanOptionalAction, default=None,
                   help="log-spaced (default) or linear r-grid")
    r.add_argument("--alpha", help="alpha value(s), comma-separated")
    r.add_argument("--delta", help="delta value(s), comma-separated")
    r.add_argument("--epsilon", type=float)
    r.add_argument("--strict-statement", action="store_true", default=None,
                   help="divide the shift bound by r^delta twice")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="CSV output path")
    r.add_argument("--quad-tol", type=float)
    r.add_argument("--quad-max-nodes", type=int)
    r.add_argument("--threshold", type=float, help="o(T) ratio threshold for clunie/mohonko")
    r.add_argument("--workers", type=int, help="threads for per-radius work")
    r.add_argument("-v", "--verbose", action="store_true")
    return p


_FLAG_KEYS = ("suite", "function", "c", "r_start", "r_stop", "r_count", "r_log", "alpha", "delta",
              "epsilon", "strict_statement", "seed", "out", "quad_tol", "quad_max_nodes",
              "threshold", "workers")


def overrides_from(args):
    out = {}
    for key in _FLAG_KEYS:
        val = getattr(args, key)
        if val is None:
            continue
        if isinstance(val, (bool, int, float)):
            val = str(val).lower() if isinstance(val, bool) else repr(val)
        out[key] = val
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = overrides_from(args)
    try:
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise harness.ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
            configs = harness.load_config(text, overrides)
        else:
            configs = [harness.make_config(overrides)]
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return harness.run(configs)


if __name__ == "__main__":
    sys.exit(main())
