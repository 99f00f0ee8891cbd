"""d'_00NN of the balanced NOON state over N and the real product γδ.

    python scripts/noon_scan.py --max-n 6 --output results/noon_scan.csv
"""
import argparse
import math

import numpy as np

from cvwitness.states import NOON
from cvwitness.witness import MinorSpec, analytic_minor

from tables import write_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--product", type=float, nargs=3, default=(-3.0, 3.0, 61), metavar=("LO", "HI", "N"))
    ap.add_argument("--output", default="results/noon_scan.csv")
    args = ap.parse_args(argv)
    rows = []
    for N in range(1, args.max_n + 1):
        fam = NOON(N, 1 / math.sqrt(2))
        for t in np.linspace(args.product[0], args.product[1], int(args.product[2])):
            g = math.sqrt(abs(t))
            value = analytic_minor(fam, MinorSpec(0, 0, N, N), (g, math.copysign(g, t))).value
            rows.append({"N": N, "gamma_delta": t, "dprime_00NN": value, "witnessed": value < 0})
    write_table(rows, args.output, {"state": "balanced NOON", "method": "analytic"})


if __name__ == "__main__":
    main()
