#!/usr/bin/env python3
"""Threshold sweep preset: d in {3,5,7}, five p values around the crossing.

Writes one CSV per invocation and prints the crossing estimate.  Defaults
reproduce the headline XZZX eta=100 sweep; variant/basis/eta are flags so
the CSS and bias sweeps reuse the same grid.
"""

import argparse

from spinhex import analysis
from spinhex.cli import main as cli_main

P_GRID = "0.0012,0.0016,0.002,0.0023,0.0026"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--variant", default="xzzx", choices=["xzzx", "css"])
    ap.add_argument("--basis", default=None, help="default: h,v (xzzx) or z,x (css)")
    ap.add_argument("--eta", default="100")
    ap.add_argument("--d", default="3,5,7")
    ap.add_argument("--p", default=P_GRID)
    ap.add_argument("--shots", default="200000")
    ap.add_argument("--seed", default="21")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    basis = args.basis or ("h,v" if args.variant == "xzzx" else "z,x")
    rc = cli_main(
        [
            "memory",
            "--variant", args.variant,
            "--basis", basis,
            "--eta", args.eta,
            "--d", args.d,
            "--p", args.p,
            "--shots", args.shots,
            "--seed", args.seed,
            "--out", args.out,
        ]
    )
    if rc != 0:
        raise SystemExit(rc)
    est = analysis.threshold_estimate(analysis.aggregate_curve(analysis.read_csv(args.out)))
    print(f"{args.out}: threshold {est.value:.6f} +- {est.uncertainty:.6f} crossings {est.crossings}")


if __name__ == "__main__":
    main()
