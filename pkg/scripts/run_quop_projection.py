#!/usr/bin/env python3
"""Sub-threshold scaling at p=0.001: d in {3..11}, fit, project Quop distances."""

import argparse

from spinhex import analysis
from spinhex.cli import main as cli_main


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", default="3,5,7,9,11")
    ap.add_argument("--p", default="0.001")
    ap.add_argument("--shots", default="200000")
    ap.add_argument("--seed", default="22")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    rc = cli_main(
        [
            "memory",
            "--variant", "xzzx",
            "--basis", "h",
            "--eta", "100",
            "--d", args.d,
            "--p", args.p,
            "--shots", args.shots,
            "--seed", args.seed,
            "--out", args.out,
        ]
    )
    if rc != 0:
        raise SystemExit(rc)
    pts = [(c.d, c.p_L_round) for c in analysis.aggregate_curve(analysis.read_csv(args.out))]
    projection = analysis.fit_and_project(pts)
    for target, dist in sorted(projection.items(), reverse=True):
        print(f"{args.out}: target {target:g} -> d = {dist}")


if __name__ == "__main__":
    main()
