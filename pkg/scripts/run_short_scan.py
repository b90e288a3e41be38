#!/usr/bin/env python3
"""Short-duration 40-view scan comparison.

Runs the five scan/reconstruction combinations (slow-MBIR, fast-MBIR,
fast-IFBP, fast-CodEx, coded-CodEx) from the shipped configs and prints
an NRMSE table.  Artifacts land under --out.

    python scripts/run_short_scan.py --out out/short_scan
"""

import argparse
import json
from pathlib import Path

from codex_ct.cli import load_config, run_reconstruct, run_simulate

COMBOS = [
    "shortscan40_slow_mbir",
    "shortscan40_fast_mbir",
    "shortscan40_fast_ifbp",
    "shortscan40_fast_codex",
    "shortscan40_coded_codex",
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/short_scan")
    parser.add_argument("--configs", default=str(Path(__file__).resolve().parent.parent / "configs"))
    args = parser.parse_args()
    out = Path(args.out)

    results = {}
    for name in COMBOS:
        config = load_config(Path(args.configs) / f"{name}.json")
        sim_dir = out / name / "data"
        rec_dir = out / name / "recon"
        run_simulate(config, sim_dir)
        metrics = run_reconstruct(config, sim_dir, rec_dir)
        results[name] = metrics
        print(f"{name}: NRMSE = {metrics['nrmse']:.4f}")

    (out / "summary.json").write_text(json.dumps(results, indent=2, sort_keys=True))
    print(f"\nwrote {out}/summary.json")


if __name__ == "__main__":
    main()
