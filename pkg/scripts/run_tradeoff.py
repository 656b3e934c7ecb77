#!/usr/bin/env python3
"""SWAP-count trade-off: thresholds for (n_x, n_y) in {(2,3), (4,5)}.

Larger unit cells need more SWAP hops per gate, so the threshold should
decrease monotonically with swaps_per_gate.  The (4,5) sweep uses a lower
p window because its crossing sits well below the (2,3) one.
"""

import argparse

from spinhex import analysis
from spinhex.cli import main as cli_main

GRIDS = {
    (2, 3): "0.0012,0.0016,0.002,0.0023,0.0026",
    (4, 5): "0.0004,0.0006,0.0008,0.001,0.0013",
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shots", default="200000")
    ap.add_argument("--seed", default="23")
    ap.add_argument("--out-prefix", default="results/tradeoff")
    args = ap.parse_args()

    for (nx, ny), grid in GRIDS.items():
        out = f"{args.out_prefix}_nx{nx}ny{ny}.csv"
        rc = cli_main(
            [
                "memory",
                "--variant", "xzzx",
                "--basis", "h",
                "--eta", "100",
                "--nx", str(nx),
                "--ny", str(ny),
                "--d", "3,5,7",
                "--p", grid,
                "--shots", args.shots,
                "--seed", args.seed,
                "--out", out,
            ]
        )
        if rc != 0:
            raise SystemExit(rc)
        est = analysis.threshold_estimate(analysis.aggregate_curve(analysis.read_csv(out)))
        print(f"(nx,ny)=({nx},{ny}): threshold {est.value:.6f} +- {est.uncertainty:.6f}")


if __name__ == "__main__":
    main()
