"""Run the perturbation suite and print pass/skip/fail counts per (dim, profile) cell.

    python scripts/perturb_suite.py scripts/configs/perturb_default.json --out results/perturb.csv
"""

import argparse
import csv
import json
import sys
from collections import Counter
from pathlib import Path

from brownspec.harness import PerturbConfig, config_from_dict, run_perturbation_suite


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config", type=Path)
    ap.add_argument("--out", type=Path, default=Path("results/perturb.csv"))
    args = ap.parse_args(argv)
    cfg = config_from_dict(PerturbConfig, json.loads(args.config.read_text()))
    code = run_perturbation_suite(cfg, args.out)
    counts = Counter()
    with args.out.open() as fh:
        for row in csv.DictReader(fh):
            counts[(int(row["dim"]), row["profile"], row["verdict"])] += 1
    cells = sorted({(d, p) for d, p, _ in counts})
    print(f"{'dim':>4} {'profile':<18} {'pass':>7} {'skip':>7} {'fail':>5}")
    for d, p in cells:
        print(f"{d:>4} {p:<18} {counts[d, p, 'pass']:>7} {counts[d, p, 'skipped']:>7} {counts[d, p, 'fail']:>5}")
    print(f"exit {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
