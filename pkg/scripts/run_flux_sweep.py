#!/usr/bin/env python3
"""Reconstruction quality vs photon flux and code length.

Sweeps the three exposure codes over a flux grid for code lengths 52,
104, and 208 (fluttered codes concatenate the 52-chop base), averaging
RMSE over seeds.  Emits one sweep.csv per code length.

    python scripts/run_flux_sweep.py --out out/flux_sweep --threads 2
"""

import argparse
from pathlib import Path

from codex_ct.cli import load_config, run_sweep

BASE = Path(__file__).resolve().parent.parent / "configs" / "table3_noisy_boxcar_codex.json"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/flux_sweep")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--flux", type=float, nargs="+",
                        default=[100.0, 1000.0, 10000.0, 100000.0, 1000000.0])
    parser.add_argument("--lengths", type=int, nargs="+", default=[52, 104, 208])
    args = parser.parse_args()

    config = load_config(BASE)
    for length in args.lengths:
        sweep = {
            "codes": ["snapshot", "boxcar", "raskar"],
            "code_lengths": [length],
            "lambda0": args.flux,
            "seeds": list(range(args.seeds)),
        }
        out = Path(args.out) / f"len{length}"
        rows = run_sweep(config, sweep, out, threads=args.threads)
        print(f"code length {length}: {len(rows)} cells -> {out}/sweep.csv")


if __name__ == "__main__":
    main()
