"""Witnessed region of d'_1001 for the TMSV over λ and the real product γδ.

    python scripts/tmsv_scan.py --output results/tmsv_scan.csv
"""
import argparse
import math

import numpy as np

from cvwitness.states import TMSV
from cvwitness.witness import analytic_minor

from tables import write_table


def reference(product):
    g = math.sqrt(abs(product))
    return g, math.copysign(g, product)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, nargs=3, default=(-0.95, 0.95, 39), metavar=("LO", "HI", "N"))
    ap.add_argument("--product", type=float, nargs=3, default=(-2.0, 2.0, 41), metavar=("LO", "HI", "N"))
    ap.add_argument("--output", default="results/tmsv_scan.csv")
    args = ap.parse_args(argv)
    rows = []
    for lam in np.linspace(args.lam[0], args.lam[1], int(args.lam[2])):
        for t in np.linspace(args.product[0], args.product[1], int(args.product[2])):
            value = analytic_minor(TMSV(lam), (1, 0, 0, 1), reference(t)).value
            rows.append({"lambda": lam, "gamma_delta": t, "dprime_1001": value, "witnessed": value < 0})
    write_table(rows, args.output, {"spec": "1,0,0,1", "method": "analytic"})


if __name__ == "__main__":
    main()
