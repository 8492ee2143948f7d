"""Compare the deflation solver with the Jacobi oracle across sizes and profiles.

Prints the worst eigenvalue discrepancy (relative to ||A||) and mean time of
each solver per cell.
"""

import argparse
import time

import numpy as np

from brownspec.jacobi import oracle_spectrum
from brownspec.perturbation import PROFILES, random_operator_pair
from brownspec.spectral import operator_norm, signed_spectrum
from brownspec.streams import stream


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--dims", type=int, nargs="+", default=[5, 20, 50])
    ap.add_argument("--reps", type=int, default=10)
    args = ap.parse_args(argv)
    print(f"{'dim':>4} {'profile':<18} {'max diff/||A||':>15} {'deflation s':>12} {'oracle s':>10}")
    for d in args.dims:
        for profile in PROFILES:
            worst, t_def, t_orc = 0.0, 0.0, 0.0
            for i in range(args.reps):
                a = np.asarray(random_operator_pair(stream(args.seed, "compare", d, profile, i), d, profile)[0])
                t0 = time.perf_counter()
                spec = signed_spectrum(a)
                t1 = time.perf_counter()
                w = oracle_spectrum(a)[0]
                t2 = time.perf_counter()
                t_def += t1 - t0
                t_orc += t2 - t1
                worst = max(worst, float(np.max(np.abs(spec.values() - w))) / operator_norm(a))
            print(f"{d:>4} {profile:<18} {worst:>15.2e} {t_def / args.reps:>12.4f} {t_orc / args.reps:>10.4f}")


if __name__ == "__main__":
    main()
