"""Run the dyadic deviation experiment for one or more configs and print a table.

    python scripts/bm_converge.py scripts/configs/bm_identity_d1.json --out results/
"""

import argparse
import json
import sys
from pathlib import Path

from brownspec.harness import BrownianConfig, config_from_dict, run_brownian_experiment


def _cell(x: str) -> str:
    try:
        return f"{float(x):.6g}"
    except ValueError:
        return x


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("configs", nargs="+", type=Path)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args(argv)
    worst = 0
    for path in args.configs:
        cfg = config_from_dict(BrownianConfig, json.loads(path.read_text()))
        out = args.out / f"{path.stem}.csv"
        code = run_brownian_experiment(cfg, out)
        worst = max(worst, code)
        print(f"# {path.name} -> {out} (exit {code})")
        lines = out.read_text().splitlines()
        print("  " + "  ".join(f"{h:>16}" for h in lines[0].split(",")))
        for line in lines[1:]:
            print("  " + "  ".join(f"{_cell(x):>16}" for x in line.split(",")))
    return worst


if __name__ == "__main__":
    sys.exit(main())
