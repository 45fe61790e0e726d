"""Command-line interface: ``rates``, ``cdf``, ``lownoise`` and ``validate``."""

import argparse
import json
import logging
import sys

from .channel_model import SNR_CONVENTIONS
from .harness import (
    BOB_CHANNELS,
    ScenarioConfig,
    run_cdf,
    run_lownoise_sweep,
    run_rates,
    run_validate,
)


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_dims(p):
    p.add_argument("--n", type=int, default=10, help="transmit antennas")
    p.add_argument("--mb", type=int, default=6, help="legitimate receive antennas")
    p.add_argument("--me", type=int, default=4, help="eavesdropper receive antennas")
    p.add_argument("--k", type=int, default=2, help="number of mixture classes")
    p.add_argument("--power", type=float, default=1.0, help="transmit power budget P")
    p.add_argument("--seed", type=int, default=0)


def _add_rate_flags(p):
    _add_dims(p)
    p.add_argument("--eps", type=float, default=0.01, help="Cayley rotation parameter")
    p.add_argument("--snr-db", type=float, default=25.0)
    p.add_argument("--snr-convention", choices=SNR_CONVENTIONS, default="per-antenna")
    p.add_argument("--samples", type=int, default=20_000, help="Monte-Carlo samples per estimate")
    p.add_argument("--bob", choices=BOB_CHANNELS, default="dct", help="legitimate channel model")


def _config(args, **overrides):
    kw = dict(
        n=args.n,
        mb=args.mb,
        me=args.me,
        K=args.k,
        power=args.power,
        master_seed=args.seed,
    )
    for name, attr in (
        ("eps", "eps"),
        ("snr_db", "snr_db"),
        ("snr_convention", "snr_convention"),
        ("n_samples", "samples"),
        ("bob_channel", "bob"),
        ("n_trials", "trials"),
    ):
        if hasattr(args, attr):
            kw[name] = getattr(args, attr)
    kw.update(overrides)
    return ScenarioConfig(**kw)


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as f:
            f.write(text)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gmm-wiretap",
        description="Secrecy rates of MIMO wiretap channels with Gaussian-mixture signaling.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", help="rate report of one channel draw, as JSON")
    _add_rate_flags(p)

    p = sub.add_parser("cdf", help="per-trial rate reports over random eavesdropper channels, as CSV")
    _add_rate_flags(p)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (output does not depend on it)")
    p.add_argument("--out", default="-")

    p = sub.add_parser("lownoise", help="noiseless-limit secrecy rate over an eps grid, as CSV")
    _add_dims(p)
    p.add_argument("--eps-grid", type=_float_list, default=[0.1, 0.01, 0.001])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="-")

    p = sub.add_parser("validate", help="run the invariant suite; exit status 1 on any failure")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="append", default=[], help=argparse.SUPPRESS)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        if args.command == "rates":
            cfg = _config(args, n_trials=1)
            report = run_rates(cfg, args.seed)
            doc = {"config": cfg.__dict__, "noise_var": cfg.noise_var, "seed": args.seed, "report": report.to_dict()}
            print(json.dumps(doc, indent=2))
        elif args.command == "cdf":
            _write(run_cdf(_config(args), jobs=args.jobs).to_csv(), args.out)
        elif args.command == "lownoise":
            cfg = _config(args, eps=min(args.eps_grid))
            _write(run_lownoise_sweep(cfg, args.eps_grid, jobs=args.jobs).to_csv(), args.out)
        elif args.command == "validate":
            ok, _ = run_validate(args.seed, faults=tuple(args.inject_fault))
            return 0 if ok else 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
