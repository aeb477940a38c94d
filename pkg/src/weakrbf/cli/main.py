"""Command-line entry point."""

from __future__ import annotations

import argparse
import logging
import sys

from weakrbf.cli.config import load_config, preset_names, preset_path
from weakrbf.cli.driver import convergence_study, run
from weakrbf.errors import ConfigError, FactorizationError, InvalidNodesError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BLOWUP = 3

_OVERRIDES = [
    ("--problem", str), ("--bc", str), ("--method", str), ("--kernel", str), ("--eps", float),
    ("--P", int), ("--N", int), ("--nodes", str), ("--quadrature", str), ("--flux", str),
    ("--cfl", float), ("--tend", float), ("--scheme", str), ("--boundary-mode", str), ("--out", str),
]


def _add_common(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--preset", help="named preset shipped with the package")
    for flag, typ in _OVERRIDES:
        p.add_argument(flag, type=typ, dest=flag.lstrip("-").replace("-", "_"))
    p.add_argument("--snapshots", help="comma-separated snapshot times")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="weakrbf", description="Weak and strong RBF solvers for conservation laws")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="run one configuration"))
    conv = sub.add_parser("convergence", help="convergence study over several N")
    _add_common(conv)
    conv.add_argument("--Ns", help="comma-separated node counts")
    sub.add_parser("presets", help="list the figure presets")
    return parser


def _config_from_args(args):
    path = args.config
    if args.preset:
        if path:
            raise ConfigError("use either --config or --preset")
        path = preset_path(args.preset)
    overrides = {flag.lstrip("-").replace("-", "_"): getattr(args, flag.lstrip("-").replace("-", "_")) for flag, _ in _OVERRIDES}
    if args.snapshots:
        overrides["snapshots"] = tuple(float(v) for v in args.snapshots.split(","))
    if getattr(args, "Ns", None):
        overrides["Ns"] = tuple(int(v) for v in args.Ns.split(","))
    return load_config(path, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name in preset_names():
            print(name)
        return EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config_from_args(args)
        if args.command == "convergence":
            table = convergence_study(cfg)
            for key in ("inf", "2"):
                order = table[f"lsq_order_{key}"]
                print(f"order_{key}=" + ("undefined (zero error)" if order is None else f"{order:.4f}"))
            return EXIT_OK
        res = run(cfg)
    except (ConfigError, InvalidNodesError, FactorizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    s = res.summary
    if res.blowup:
        print(f"blow-up at t={res.blowup_time:.6g}; partial output in {cfg.out}", file=sys.stderr)
        return EXIT_BLOWUP
    err = "" if s["err_inf"] is None else f" err_inf={s['err_inf']:.6e} err_2={s['err_2']:.6e}"
    print(f"{s['method']} {s['kernel']} N={s['N']} t={s['t_final']:g}{err} energy={s['energy_final']:.10g}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
