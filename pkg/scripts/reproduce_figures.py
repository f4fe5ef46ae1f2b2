#!/usr/bin/env python3
"""Emit the CSV tables behind every figure family with one command.

    python scripts/reproduce_figures.py --outdir results/
    python scripts/reproduce_figures.py --outdir smoke/ --quick

--quick drops the trial counts by ~50x for a fast end-to-end smoke run.
"""

import argparse
import pathlib
import sys

from iflab.cli import main as iflab_main


def run(outdir: pathlib.Path, quick: bool, seed: int) -> int:
    scale = 50 if quick else 1
    trials_big = max(100_000 // scale, 400)
    trials_mid = max(10_000 // scale, 200)
    jobs = [
        (
            "fig1_wc_outage.csv",
            ["fig-outage-2tx", "--c", "14", "--delta-c-min", "0.5", "--delta-c-max", "8",
             "--delta-c-steps", "16", "--trials", str(trials_mid)],
        ),
        (
            "fig2_efficiency.csv",
            ["fig-efficiency", "--c-min", "6", "--c-max", "16", "--c-steps", "6",
             "--t", "2", "--epsilon", "0.01", "--trials", str(trials_mid)],
        ),
        (
            "fig4_mac_pdf.csv",
            ["mac", "--mode", "pdf", "--n-t", "2", "--c", "2", "--bins", "40",
             "--trials", str(trials_big)],
        ),
        (
            "fig5_mac_bounds.csv",
            ["mac", "--mode", "bounds", "--n-t", "4", "--c", "8", "--r-min", "0.5",
             "--r-steps", "16", "--trials", str(trials_big)],
        ),
        (
            "fig6_mac_outage.csv",
            ["mac", "--mode", "outage", "--n-t", "2", "--c", "10", "--r-min", "1",
             "--r-max", "10", "--r-steps", "19", "--trials", str(trials_mid)],
        ),
        (
            "fig7_mac_ergodic.csv",
            ["mac", "--mode", "ergodic", "--n-t", "2", "--snr-db-min", "-5",
             "--snr-db-max", "25", "--snr-steps", "7", "--bins", "12",
             "--trials", str(max(trials_mid // 2, 100))],
        ),
    ]
    outdir.mkdir(parents=True, exist_ok=True)
    for name, args in jobs:
        target = outdir / name
        print(f"-> {target}")
        code = iflab_main(args + ["--seed", str(seed), "--out", str(target)])
        if code != 0:
            print(f"   failed with exit code {code}", file=sys.stderr)
            return code
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("results"))
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--seed", type=int, default=7)
    ns = parser.parse_args()
    sys.exit(run(ns.outdir, ns.quick, ns.seed))
