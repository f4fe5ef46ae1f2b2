"""Command-line front end emitting experiment tables as CSV or JSON.

Subcommands map to the figure families:
  bounds          closed-form bound tabulation (MIMO gap sweep or MAC rate sweep)
  fig-outage-2tx  worst-case outage vs gap with bound envelopes
  fig-efficiency  guaranteed efficiency at a target outage level
  mac             MAC experiments (pdf | bounds | outage | ergodic)

Every table starts with '# key=value' metadata lines (version, seed, trials,
search method), then a header row, then numeric rows with 9 significant
digits.  Identical invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bounds import (
    ifsic_wc_outage_upper_lattice,
    ifsic_wc_outage_upper_simple,
    mac2_sym_outage_exact,
    mac_sym_outage_bounds,
    ml_wc_outage_exact,
    rho2_grid,
    st_wc_outage_lower,
)
from .ensembles import RngSeed
from .mac import (
    distributed_rates_given_c,
    ergodic_fraction_data,
    sym_capacity_pdf_data,
    sym_outage_given_c,
)
from .montecarlo import ExperimentSpec, efficiency, worst_case_outage

FAMILIES = ("wc-outage", "efficiency", "mac-pdf", "mac-bounds", "mac-outage", "mac-ergodic")


@dataclass
class RunConfig:
    """Validated run parameters shared by the table writers."""

    subcommand: str
    out_path: str
    fmt: str
    seed: int
    trials: int
    flags: dict = field(default_factory=dict)


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def write_table(cfg: RunConfig, family: str, metadata: dict, header, rows):
    meta = {"iflab": __version__, "family": family, **metadata}
    if cfg.fmt == "csv":
        lines = [f"# {k}={v}" for k, v in meta.items()]
        lines.append(",".join(header))
        for row in rows:
            lines.append(",".join(_fmt_cell(v) for v in row))
        text = "\n".join(lines) + "\n"
        with open(cfg.out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        payload = {
            "metadata": {k: str(v) for k, v in meta.items()},
            "rows": [
                {h: (None if isinstance(v, float) and math.isnan(v) else v)
                 for h, v in zip(header, row)}
                for row in rows
            ],
        }
        with open(cfg.out_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return cfg.out_path


def _grid(lo: float, hi: float, steps: int) -> np.ndarray:
    if steps < 1 or hi < lo:
        raise ValueError("grid needs steps >= 1 and max >= min")
    return np.linspace(lo, hi, steps)


def _delta_grid(args) -> np.ndarray:
    if args.delta_c is not None:
        return np.asarray([args.delta_c])
    return _grid(args.delta_c_min, args.delta_c_max, args.delta_c_steps)


def _r_grid(args, c: float) -> np.ndarray:
    if args.r is not None:
        return np.asarray([args.r])
    hi = args.r_max if args.r_max is not None else c
    return _grid(args.r_min, hi, args.r_steps)


def cmd_bounds(args, cfg: RunConfig) -> list:
    failures = []
    if args.mac:
        rows = []
        for r in _r_grid(args, args.c):
            lo, up = mac_sym_outage_bounds(args.n_t, r, args.c)
            exact = mac2_sym_outage_exact(args.c, r).value if args.n_t == 2 else float("nan")
            rows.append([float(r), lo.value, up.value, exact])
        write_table(
            cfg,
            "mac-bounds",
            {"c": args.c, "n_t": args.n_t, "mode": "closed-form",
             "seed": args.seed, "trials": 0, "a_search": "none",
             "units": "bits-per-complex-use"},
            ["r", "sym_outage_lower", "sym_outage_upper", "sym_outage_exact"],
            rows,
        )
        return failures
    rows = []
    header = ["delta_c", "upper_simple", "upper_lattice", "ml_exact"]
    if args.t > 1:
        header += ["st_lower", "st_lower_abs_error"]
    for dc in _delta_grid(args):
        dc = float(dc)
        simple = ifsic_wc_outage_upper_simple(dc).value if dc > 1.0 else float("nan")
        try:
            lattice = ifsic_wc_outage_upper_lattice(
                args.c, dc, n_dim=args.n_dim, max_points=args.enum_budget
            ).value
        except Exception as exc:  # enumeration budget and similar hard stops
            failures.append(f"upper_lattice at delta_c={dc}: {exc}")
            lattice = float("nan")
        row = [dc, simple, lattice, ml_wc_outage_exact(dc).value]
        if args.t > 1:
            bv = st_wc_outage_lower(args.c, args.c - dc, args.t)
            row += [bv.value, bv.abs_error]
        rows.append(row)
    write_table(
        cfg,
        "wc-outage",
        {"c": args.c, "n_dim": args.n_dim, "mode": "closed-form",
         "seed": args.seed, "trials": 0, "a_search": "none",
         "units": "bits-per-complex-use", "rho2_range": "0..2^(c/2)-1", "rho2_range_alt": "0..2^c/2"},
        header,
        rows,
    )
    return failures


def _outage_spec(args, receiver: str, precoder: str, t: int) -> ExperimentSpec:
    return ExperimentSpec(
        n_t=args.n_t,
        capacity_bits=args.c,
        rho2_grid=tuple(rho2_grid(args.c, args.rho2_points)),
        receiver=receiver,
        trials=args.trials,
        seed=args.seed,
        t=t,
        n_r=args.n_r,
        precoder=precoder,
    )


def cmd_fig_outage_2tx(args, cfg: RunConfig) -> list:
    spec = _outage_spec(args, "if-sic", "cue", 1)
    rows = []
    for dc in _delta_grid(args):
        dc = float(dc)
        simple = ifsic_wc_outage_upper_simple(dc).value if dc > 1.0 else float("nan")
        lattice = ifsic_wc_outage_upper_lattice(args.c, dc, n_dim=args.n_dim).value
        exact = ml_wc_outage_exact(dc).value
        wc = worst_case_outage(spec, args.c - dc)
        p = wc.estimate.p_hat
        if args.complement:
            simple, lattice, exact, p = 1 - simple, 1 - lattice, 1 - exact, 1 - p
        rows.append([dc, simple, lattice, exact, p, wc.estimate.stderr, wc.rho2])
    write_table(
        cfg,
        "wc-outage",
        {
            "c": args.c,
            "seed": args.seed,
            "trials": args.trials,
            "a_search": spec.a_search.method,
            "complement": int(args.complement),
            "receiver": "if-sic",
            "units": "bits-per-complex-use",
        },
        ["delta_c", "upper_simple", "upper_lattice", "ml_exact", "ifsic_emp",
         "ifsic_stderr", "ifsic_rho2"],
        rows,
    )
    return []


EFFICIENCY_SCHEMES = {
    "ml-cue": ("ml", "cue", 1),
    "ifsic-cue": ("if-sic", "cue", 1),
    "if-cue": ("if", "cue", 1),
    "ml-cue-st": ("ml", "cue-st", None),
    "ifsic-cue-st": ("if-sic", "cue-st", None),
    "ifsic-alamouti": ("if-sic", "alamouti", 2),
    "ifsic-golden": ("if-sic", "golden", 2),
}


def cmd_fig_efficiency(args, cfg: RunConfig) -> list:
    schemes = args.schemes.split(",") if args.schemes else (
        ["ml-cue", "ifsic-cue", "if-cue"]
        + (["ml-cue-st", "ifsic-cue-st", "ifsic-alamouti", "ifsic-golden"] if args.t >= 2 else [])
    )
    for s in schemes:
        if s not in EFFICIENCY_SCHEMES:
            raise ValueError(f"unknown scheme {s!r}; choose from {sorted(EFFICIENCY_SCHEMES)}")
        fixed_t = EFFICIENCY_SCHEMES[s][2]
        if fixed_t == 2 and args.t < 2:
            raise ValueError(f"scheme {s!r} needs --t 2")
    c_values = [args.c] if args.c_steps is None else list(
        _grid(args.c_min, args.c_max, args.c_steps)
    )
    failures = []
    rows = []
    for c in c_values:
        row = [float(c)]
        for s in schemes:
            receiver, precoder, fixed_t = EFFICIENCY_SCHEMES[s]
            t = fixed_t if fixed_t is not None else args.t
            spec = ExperimentSpec(
                n_t=args.n_t,
                capacity_bits=float(c),
                rho2_grid=tuple(rho2_grid(float(c), args.rho2_points)),
                receiver=receiver,
                trials=args.trials,
                seed=args.seed,
                t=t,
                n_r=args.n_r,
                precoder=precoder,
            )
            eff = efficiency(spec, args.epsilon)
            row.append(eff.eta)
        rows.append(row)
    write_table(
        cfg,
        "efficiency",
        {
            "epsilon": args.epsilon,
            "seed": args.seed,
            "trials": args.trials,
            "t": args.t,
            "units": "fraction-of-c",
        },
        ["c"] + [f"eta_{s}" for s in schemes],
        rows,
    )
    return failures


MAC_SCHEME_LABELS = {
    "none": "none",
    "bb": "badr-belfiore",
    "badr-belfiore": "badr-belfiore",
    "cuest": "cue-st",
    "cue-st": "cue-st",
}


def cmd_mac(args, cfg: RunConfig) -> list:
    rng = RngSeed(args.seed)
    if args.mode == "pdf":
        pdf = sym_capacity_pdf_data(args.n_t, args.c, args.trials, args.bins, rng)
        rows = [
            [float(lo), float(hi), float(d), pdf.atom]
            for lo, hi, d in zip(pdf.bin_edges[:-1], pdf.bin_edges[1:], pdf.density)
        ]
        write_table(
            cfg,
            "mac-pdf",
            {"c": args.c, "n_t": args.n_t, "seed": args.seed, "trials": args.trials,
             "a_search": "none", "units": "bits-per-complex-use"},
            ["r_lo", "r_hi", "density", "atom"],
            rows,
        )
        return []
    if args.mode == "bounds":
        rows = []
        for r in _r_grid(args, args.c):
            r = float(r)
            lo, up = mac_sym_outage_bounds(args.n_t, r, args.c)
            est = sym_outage_given_c(args.n_t, args.c, r, args.trials, rng)
            rows.append([r, lo.value, up.value, est.p_hat, est.stderr])
        write_table(
            cfg,
            "mac-bounds",
            {"c": args.c, "n_t": args.n_t, "seed": args.seed, "trials": args.trials,
             "a_search": "none", "units": "bits-per-complex-use"},
            ["r", "lower", "upper", "empirical", "stderr"],
            rows,
        )
        return []
    if args.mode == "outage":
        schemes = (args.mac_schemes or "none,bb,cuest").split(",")
        rate_sets = {
            s: distributed_rates_given_c(
                args.n_t, args.c, args.trials, args.seed,
                precoder_label=MAC_SCHEME_LABELS[s], receiver="if-sic",
            )
            for s in schemes
        }
        rows = []
        for r in _r_grid(args, args.c):
            r = float(r)
            row = [r, mac2_sym_outage_exact(args.c, r).value if args.n_t == 2 else float("nan")]
            for s in schemes:
                rates = rate_sets[s]
                p = float(np.count_nonzero(rates < r)) / args.trials
                row += [p, math.sqrt(p * (1 - p) / args.trials)]
            rows.append(row)
        header = ["r", "ml_exact"]
        for s in schemes:
            header += [f"p_ifsic_{s}", f"stderr_ifsic_{s}"]
        write_table(
            cfg,
            "mac-outage",
            {"c": args.c, "n_t": args.n_t, "seed": args.seed, "trials": args.trials,
             "receiver": "if-sic", "a_search": "lll+permutations",
             "units": "bits-per-complex-use"},
            header,
            rows,
        )
        return []
    if args.mode == "ergodic":
        snr_db = _grid(args.snr_db_min, args.snr_db_max, args.snr_steps)
        snrs = tuple(10.0 ** (v / 10.0) for v in snr_db)
        schemes = (args.mac_schemes or "none,bb,cuest").split(",")
        tables = {"ml": ergodic_fraction_data(args.n_t, snrs, "ml", "none", args.trials, rng, bins=args.bins)}
        for s in schemes:
            tables[s] = ergodic_fraction_data(
                args.n_t, snrs, "if-sic", MAC_SCHEME_LABELS[s], args.trials, rng, bins=args.bins
            )
        rows = []
        for i, base in enumerate(tables["ml"]):
            row = [base.c_sum_center, base.count, base.fraction]
            for s in schemes:
                row.append(tables[s][i].fraction if i < len(tables[s]) else float("nan"))
            rows.append(row)
        write_table(
            cfg,
            "mac-ergodic",
            {"n_t": args.n_t, "seed": args.seed, "trials": args.trials,
             "snr_db": f"{args.snr_db_min}..{args.snr_db_max}",
             "a_search": "lll+permutations", "units": "bits-per-complex-use"},
            ["c_sum", "count", "frac_ml"] + [f"frac_ifsic_{s}" for s in schemes],
            rows,
        )
        return []
    raise ValueError(f"unknown mac mode {args.mode!r}")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"{text} must be positive")
        return value

    return parse


def _nonneg_float(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text} must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iflab", description="Integer-forcing outage laboratory"
    )
    parser.add_argument("--version", action="version", version=f"iflab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, trials_default=10_000):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=_positive(int), default=trials_default)
        p.add_argument("--out", default=None)
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    pb = sub.add_parser("bounds", help="tabulate the closed-form bounds")
    pb.add_argument("--c", type=_positive(float), required=True)
    pb.add_argument("--delta-c", type=_positive(float), default=None)
    pb.add_argument("--delta-c-min", type=_positive(float), default=0.5)
    pb.add_argument("--delta-c-max", type=_positive(float), default=8.0)
    pb.add_argument("--delta-c-steps", type=_positive(int), default=16)
    pb.add_argument("--n-dim", type=_positive(int), default=4)
    pb.add_argument("--enum-budget", type=_positive(int), default=10_000_000)
    pb.add_argument("--t", type=_positive(int), default=1)
    pb.add_argument("--mac", action="store_true")
    pb.add_argument("--n-t", type=_positive(int), default=2)
    pb.add_argument("--r", type=_nonneg_float, default=None)
    pb.add_argument("--r-min", type=_nonneg_float, default=0.0)
    pb.add_argument("--r-max", type=_nonneg_float, default=None)
    pb.add_argument("--r-steps", type=_positive(int), default=16)
    common(pb)

    po = sub.add_parser("fig-outage-2tx", help="worst-case outage sweep with envelopes")
    po.add_argument("--c", type=_positive(float), required=True)
    po.add_argument("--delta-c", type=_positive(float), default=None)
    po.add_argument("--delta-c-min", type=_positive(float), default=0.5)
    po.add_argument("--delta-c-max", type=_positive(float), default=8.0)
    po.add_argument("--delta-c-steps", type=_positive(int), default=16)
    po.add_argument("--n-dim", type=_positive(int), default=4)
    po.add_argument("--n-t", type=_positive(int), default=2)
    po.add_argument("--n-r", type=_positive(int), default=2)
    po.add_argument("--rho2-points", type=_positive(int), default=64)
    po.add_argument("--complement", action="store_true")
    common(po)

    pe = sub.add_parser("fig-efficiency", help="guaranteed efficiency sweep")
    pe.add_argument("--c", type=_positive(float), default=14.0)
    pe.add_argument("--c-min", type=_positive(float), default=6.0)
    pe.add_argument("--c-max", type=_positive(float), default=16.0)
    pe.add_argument("--c-steps", type=_positive(int), default=None)
    pe.add_argument("--epsilon", type=_positive(float), default=0.01)
    pe.add_argument("--t", type=_positive(int), default=1)
    pe.add_argument("--n-t", type=_positive(int), default=2)
    pe.add_argument("--n-r", type=_positive(int), default=2)
    pe.add_argument("--rho2-points", type=_positive(int), default=64)
    pe.add_argument("--schemes", default=None)
    common(pe)

    pm = sub.add_parser("mac", help="MAC experiments")
    pm.add_argument("--mode", choices=("pdf", "bounds", "outage", "ergodic"), required=True)
    pm.add_argument("--n-t", type=_positive(int), default=2)
    pm.add_argument("--c", type=_positive(float), default=2.0)
    pm.add_argument("--bins", type=_positive(int), default=40)
    pm.add_argument("--r", type=_nonneg_float, default=None)
    pm.add_argument("--r-min", type=_nonneg_float, default=0.0)
    pm.add_argument("--r-max", type=_nonneg_float, default=None)
    pm.add_argument("--r-steps", type=_positive(int), default=16)
    pm.add_argument("--schemes", dest="mac_schemes", default=None)
    pm.add_argument("--snr-db-min", type=float, default=-5.0)
    pm.add_argument("--snr-db-max", type=float, default=25.0)
    pm.add_argument("--snr-steps", type=_positive(int), default=7)
    common(pm)

    return parser


_DEFAULT_NAMES = {
    "bounds": "bounds.csv",
    "fig-outage-2tx": "wc_outage.csv",
    "fig-efficiency": "efficiency.csv",
    "mac": "mac.csv",
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = args.out
    if out is None:
        name = _DEFAULT_NAMES[args.subcommand]
        if args.fmt == "json":
            name = name.replace(".csv", ".json")
        out = os.path.join(os.environ.get("IFLAB_OUTDIR", "."), name)
    cfg = RunConfig(
        subcommand=args.subcommand,
        out_path=out,
        fmt=args.fmt,
        seed=getattr(args, "seed", 0),
        trials=getattr(args, "trials", 0),
    )
    handlers = {
        "bounds": cmd_bounds,
        "fig-outage-2tx": cmd_fig_outage_2tx,
        "fig-efficiency": cmd_fig_efficiency,
        "mac": cmd_mac,
    }
    try:
        failures = handlers[args.subcommand](args, cfg)
    except (ValueError, KeyError) as exc:
        print(f"iflab: {exc}", file=sys.stderr)
        return 2
    if failures:
        for item in failures:
            print(f"iflab: failed cell: {item}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
