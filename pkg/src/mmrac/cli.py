"""Command-line interface.

    mmrac simulate --builtin example1 --out results/
    mmrac simulate --scenario my.json --out results/ --seed 3 --step 1e-3 --t-end 30
    mmrac compare --builtin experiment2 --out results/
    mmrac list-builtins

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace

from .errors import ConfigInvalid, NumericalError, UnknownScenario
from .scenarios import builtins as _builtins
from .scenarios import config as _config
from .scenarios.export import export_csv, write_gnuplot, write_metrics
from .scenarios.metrics import compare_levels, compute_metrics
from .scenarios.simulate import run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("mmrac")


def _load_config(args):
    if args.builtin:
        cfg = _builtins.builtin(args.builtin)
    else:
        cfg = _config.load(args.scenario)
    changes = {}
    if getattr(args, "step", None) is not None:
        changes["step"] = args.step
    if getattr(args, "t_end", None) is not None:
        changes["t_end"] = args.t_end
    if getattr(args, "seed", None) is not None:
        changes["noise"] = replace(cfg.noise, seed=args.seed)
    return _config.validate(cfg.replace(**changes)) if changes else _config.validate(cfg)


def _window(name, t_end):
    start, end = _builtins.METRIC_WINDOWS.get(name, (0.0, t_end))
    return (start, min(end, t_end))


def cmd_simulate(args):
    cfg = _load_config(args)
    os.makedirs(args.out, exist_ok=True)
    traj = run_scenario(cfg)
    stem = os.path.join(args.out, cfg.name)
    export_csv(traj, stem + ".csv")
    report = compute_metrics(traj, cfg.controller.kind, _window(cfg.name, cfg.t_end),
                             cfg.vertex_set() if cfg.controller.second_level else None)
    write_metrics(stem + "_metrics.txt", report)
    _config.dump(cfg, stem + "_config.json")
    if args.gnuplot:
        write_gnuplot(stem + ".csv", stem + ".gp", traj)
    print(f"wrote {stem}.csv ({len(traj)} samples)")
    return EXIT_OK


def cmd_compare(args):
    cfg = _load_config(args)
    os.makedirs(args.out, exist_ok=True)
    cmp = compare_levels(cfg, _window(cfg.name, cfg.t_end))
    for traj in (cmp.first_trajectory, cmp.second_trajectory):
        export_csv(traj, os.path.join(args.out, traj.name + ".csv"))
    h1, h2 = cmp.input_hashes
    path = os.path.join(args.out, cfg.name + "_compare.txt")
    write_metrics(path, cmp.first, cmp.second,
                  extra={"speedup": cmp.speedup(), "identical_input": h1 == h2})
    print(f"wrote {path}")
    return EXIT_OK


def cmd_list(args):
    for name in sorted(_builtins.BUILTINS):
        cfg = _builtins.builtin(name)
        print(f"{name:12s} {cfg.controller.kind:24s} m={cfg.dim} t_end={cfg.t_end:g}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="mmrac", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario and write CSV + metrics")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="scenario JSON file")
    src.add_argument("--builtin", help="name of a built-in scenario")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--step", type=float)
    sim.add_argument("--t-end", dest="t_end", type=float)
    sim.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
    sim.set_defaults(func=cmd_simulate)

    cmp = sub.add_parser("compare", help="first- vs second-level control on one plant")
    src = cmp.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin")
    src.add_argument("--scenario")
    cmp.add_argument("--out", required=True)
    cmp.set_defaults(func=cmd_compare)

    lst = sub.add_parser("list-builtins", help="list built-in scenarios")
    lst.set_defaults(func=cmd_list)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigInvalid, UnknownScenario) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
